#pragma once

// Relaxation kernels psi_kappa and phi_kappa of the linear fractional
// equation w' + kappa d^{1/2}w + w = 0. psi is the fundamental solution
// (w(tau) = psi(tau) w0), phi its primitive with phi' = -psi, phi(0) = 1.
//
// Closed forms in erfcx, by regime of the factorization
// s + kappa sqrt(s) + 1 = (sqrt(s)+l+)(sqrt(s)+l-), l+- = (kappa +-
// sqrt(kappa^2-4))/2:
//   kappa > 2   psi = [l+ erfcx(l+ rt) - l- erfcx(l- rt)] / (l+ - l-)
//   kappa = 2   psi = erfcx(rt) (1 + 2 tau) - 2 sqrt(tau/pi)
//   kappa < 2   psi = 2 Re[ l+/(l+ - l-) erfcx(l+ rt) ]        (rt = sqrt(tau))
// phi for kappa != 2 follows from partial fractions of (1 - Psi(s))/s:
//   phi = [l+ erfcx(l- rt) - l- erfcx(l+ rt)] / (l+ - l-),
// and for kappa = 2 from quadrature of psi. kappa = 0 is the synthetic
// memoryless mode with psi = phi = exp(-tau).
//
// Two independent backends (Talbot inversion, Voigt functions) evaluate the
// same kernels and exist purely to cross-check the closed forms.

#include <cmath>
#include <complex>
#include <vector>

#include "basset/common.hpp"
#include "basset/erfcx.hpp"
#include "basset/laplace.hpp"
#include "basset/quadrature.hpp"
#include "basset/voigt.hpp"

namespace basset {

enum class KernelBackend { closed_form, laplace_oracle, voigt_oracle };

struct RelaxationKernel {
    double kappa = 0.0;
    std::complex<double> lambda_plus{0.0, 0.0};
    std::complex<double> lambda_minus{0.0, 0.0};
    KernelBackend backend = KernelBackend::closed_form;

    static RelaxationKernel make(double kappa,
                                 KernelBackend backend = KernelBackend::closed_form) {
        if (!std::isfinite(kappa) || kappa < 0.0)
            throw DomainError("RelaxationKernel: kappa must be finite and >= 0");
        RelaxationKernel k;
        k.kappa = kappa;
        k.backend = backend;
        if (kappa > 2.0) {
            const double lp = 0.5 * (kappa + std::sqrt(kappa * kappa - 4.0));
            k.lambda_plus = {lp, 0.0};
            k.lambda_minus = {1.0 / lp, 0.0};  // product is exactly 1
        } else if (kappa == 2.0) {
            k.lambda_plus = {1.0, 0.0};
            k.lambda_minus = {1.0, 0.0};
        } else if (kappa > 0.0) {
            const double im = 0.5 * std::sqrt(4.0 - kappa * kappa);
            k.lambda_plus = {0.5 * kappa, im};
            k.lambda_minus = {0.5 * kappa, -im};
        }
        return k;
    }
};

namespace detail {

inline std::complex<long double> psi_transform(double kappa, std::complex<long double> s) {
    const long double k = kappa;
    return 1.0L / (s + k * std::sqrt(s) + 1.0L);
}

// (1 - Psi(s))/s written without the small-s cancellation.
inline std::complex<long double> phi_transform(double kappa, std::complex<long double> s) {
    const long double k = kappa;
    const std::complex<long double> rs = std::sqrt(s);
    return (1.0L + k / rs) / (s + k * rs + 1.0L);
}

inline double psi_closed(const RelaxationKernel& k, double tau) {
    const double rt = std::sqrt(tau);
    if (k.kappa == 0.0) return std::exp(-tau);
    if (k.kappa > 2.0) {
        const double lp = k.lambda_plus.real();
        const double lm = k.lambda_minus.real();
        return (lp * erfcx(lp * rt) - lm * erfcx(lm * rt)) / (lp - lm);
    }
    if (k.kappa == 2.0) {
        if (tau >= 150.0) {
            // (1+2tau) erfcx(sqrt(tau)) - 2 sqrt(tau/pi) cancels its leading
            // orders; the expanded form sum_{m>=1} (-1)^{m+1} (2m-1)!! 2m /
            // (2 tau)^m / sqrt(pi tau) avoids that.
            double term = 1.0 / tau;  // m = 1
            double sum = term;
            double dfac = 1.0;
            for (int m = 2; m <= 16; ++m) {
                dfac *= 2 * m - 1;
                const double t = dfac * 2.0 * m / std::pow(2.0 * tau, m);
                sum += (m % 2 == 1) ? t : -t;
                if (t < 1e-17 * sum) break;
            }
            return sum / (detail::kSqrtPi * rt);
        }
        return erfcx(rt) * (1.0 + 2.0 * tau) - 2.0 * rt / detail::kSqrtPi;
    }
    const std::complex<double> q = k.lambda_plus / (k.lambda_plus - k.lambda_minus);
    return 2.0 * std::real(q * erfcx(k.lambda_plus * rt));
}

inline double phi_closed(const RelaxationKernel& k, double tau) {
    const double rt = std::sqrt(tau);
    if (k.kappa == 0.0) return std::exp(-tau);
    if (k.kappa > 2.0) {
        const double lp = k.lambda_plus.real();
        const double lm = k.lambda_minus.real();
        return (lp * erfcx(lm * rt) - lm * erfcx(lp * rt)) / (lp - lm);
    }
    if (k.kappa == 2.0) {
        // Adaptive quadrature of psi; the partial-fraction route degenerates
        // at the double root.
        const RelaxationKernel kc = k;
        const double tail = integrate_sqrt_cusp(
            [&](double s) { return psi_closed(kc, s); }, tau, 1e-12);
        return 1.0 - tail;
    }
    // Numerator l+ E(l- rt) - l- E(l+ rt) = 2i Im(l+ conj(E+)); denominator
    // l+ - l- = 2i Im(l+).
    const std::complex<double> ep = erfcx(k.lambda_plus * rt);
    return std::imag(k.lambda_plus * std::conj(ep)) / k.lambda_plus.imag();
}

}  // namespace detail

inline double psi(const RelaxationKernel& k, double tau) {
    if (!(tau >= 0.0)) throw DomainError("psi: tau must be >= 0");
    if (tau == 0.0) return 1.0;
    switch (k.backend) {
        case KernelBackend::closed_form:
            return detail::psi_closed(k, tau);
        case KernelBackend::laplace_oracle:
            return inverse_laplace(
                [kap = k.kappa](std::complex<long double> s) {
                    return detail::psi_transform(kap, s);
                },
                tau);
        case KernelBackend::voigt_oracle:
            return voigt_psi(k.kappa, tau);
    }
    throw DomainError("psi: unknown backend");
}

inline double phi(const RelaxationKernel& k, double tau) {
    if (!(tau >= 0.0)) throw DomainError("phi: tau must be >= 0");
    if (tau == 0.0) return 1.0;
    switch (k.backend) {
        case KernelBackend::closed_form:
            return detail::phi_closed(k, tau);
        case KernelBackend::laplace_oracle:
            return inverse_laplace(
                [kap = k.kappa](std::complex<long double> s) {
                    return detail::phi_transform(kap, s);
                },
                tau);
        case KernelBackend::voigt_oracle: {
            const double integral = integrate_sqrt_cusp(
                [&](double s) { return voigt_psi(k.kappa, s, 1e-10); }, tau, 1e-8);
            return 1.0 - integral;
        }
    }
    throw DomainError("phi: unknown backend");
}

// Leading large-tau term kappa/(2 sqrt(pi)) tau^{-3/2}.
inline double psi_asymptotic(const RelaxationKernel& k, double tau) {
    if (!(tau > 0.0)) throw DomainError("psi_asymptotic: tau must be positive");
    return k.kappa / (2.0 * detail::kSqrtPi) * std::pow(tau, -1.5);
}

// Uniform tabulation of psi and phi, the form consumed by the mild solver
// and the envelope convolutions.
struct KernelTable {
    double dt = 0.0;
    double kappa = 0.0;
    std::vector<double> psi;
    std::vector<double> phi;

    std::size_t size() const { return psi.size(); }
};

inline KernelTable psi_grid(const RelaxationKernel& k, std::size_t n_nodes, double dt) {
    if (n_nodes == 0) throw DomainError("psi_grid: empty grid");
    if (!(dt > 0.0)) throw DomainError("psi_grid: dt must be positive");
    KernelTable t;
    t.dt = dt;
    t.kappa = k.kappa;
    t.psi.resize(n_nodes);
    t.phi.resize(n_nodes);
    t.psi[0] = 1.0;
    t.phi[0] = 1.0;
    if (k.kappa == 2.0 && k.backend == KernelBackend::closed_form) {
        // One cumulative pass; per-interval Gauss panels on psi, with the
        // sqrt cusp of the first interval substituted away.
        for (std::size_t m = 1; m < n_nodes; ++m) t.psi[m] = psi(k, m * dt);
        double acc = integrate_sqrt_cusp([&](double s) { return detail::psi_closed(k, s); }, dt,
                                         1e-13);
        t.phi[1] = 1.0 - acc;
        for (std::size_t m = 2; m < n_nodes; ++m) {
            acc += gauss15([&](double s) { return detail::psi_closed(k, s); }, (m - 1) * dt,
                           m * dt);
            t.phi[m] = 1.0 - acc;
        }
    } else {
        for (std::size_t m = 1; m < n_nodes; ++m) {
            const double tau = m * dt;
            t.psi[m] = psi(k, tau);
            t.phi[m] = phi(k, tau);
        }
    }
    return t;
}

}  // namespace basset
