#pragma once

// The analytic decay envelope and its companions:
//
//   |w(tau)| <= |w0| sum_{j>=1} (eps L_M)^{j-1} psi^{*j}(tau)
//               + eps L_B (1 - phi(tau)) + eps^2 L_M L_B / (1 - eps L_M),
//
// together with the sup bound (|w0| + eps L_B)/(1 - eps L_M), the asymptotic
// bound eps L_B/(1 - eps L_M), and the continuation-window certificate of
// the existence proof. The convolution powers psi^{*j} are built by iterated
// discrete convolution with the trapezoid product rule on the same uniform
// grid the solver uses; the series is truncated once its geometric tail
// bound drops below the requested tolerance, and that bound ships with the
// curve as a certificate.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "basset/common.hpp"
#include "basset/flow.hpp"
#include "basset/params.hpp"
#include "basset/relaxation.hpp"

namespace basset {

struct ConvolutionSeries {
    double dt = 0.0;
    double eps_lm = 0.0;
    int J = 0;                   // number of retained terms
    double truncation_bound = 0.0;  // (eps L_M)^J / (1 - eps L_M)
    // psi^{*j} for j = 1..J.
    std::vector<std::vector<double>> powers;
    // sum_{j<=J} (eps L_M)^{j-1} psi^{*j}; multiplies |w0| in the envelope.
    std::vector<double> series;
    // h = sum_{j<=J} (eps L_M)^j psi^{*j}, the Gronwall resolvent kernel.
    std::vector<double> h;

    std::size_t size() const { return series.size(); }
};

namespace detail {

// Trapezoid product-rule convolution of two grid functions sharing the grid.
inline void convolve_level(const std::vector<double>& psi, const std::vector<double>& g,
                           std::vector<double>& out, double dt, unsigned threads) {
    const std::size_t n = psi.size();
    out.assign(n, 0.0);
    parallel_for(n, threads, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            if (i == 0) continue;
            double acc = 0.5 * (psi[0] * g[i] + psi[i] * g[0]);
            for (std::size_t k = 1; k < i; ++k) acc += psi[k] * g[i - k];
            out[i] = acc * dt;
        }
    });
}

}  // namespace detail

inline ConvolutionSeries convolution_series(const KernelTable& table, double eps_lm,
                                            double tol = 1e-6, unsigned threads = 0) {
    if (!(eps_lm > 0.0 && eps_lm < 1.0))
        throw DomainError("convolution_series: eps*L_M must lie in (0, 1)");
    if (table.size() == 0) throw DomainError("convolution_series: empty kernel table");
    if (!(tol > 0.0)) throw DomainError("convolution_series: tol must be positive");

    ConvolutionSeries cs;
    cs.dt = table.dt;
    cs.eps_lm = eps_lm;

    // Smallest J with (eps L_M)^J / (1 - eps L_M) < tol.
    int J = 1;
    double tail = eps_lm / (1.0 - eps_lm);
    while (tail >= tol && J < 64) {
        ++J;
        tail *= eps_lm;
    }
    cs.J = J;
    cs.truncation_bound = tail;

    cs.powers.reserve(J);
    cs.powers.push_back(table.psi);
    for (int j = 2; j <= J; ++j) {
        std::vector<double> next;
        detail::convolve_level(table.psi, cs.powers.back(), next, table.dt, threads);
        cs.powers.push_back(std::move(next));
    }

    const std::size_t n = table.size();
    cs.series.assign(n, 0.0);
    cs.h.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double coeff = 1.0;
        double acc = 0.0;
        for (int j = 0; j < J; ++j) {
            acc += coeff * cs.powers[static_cast<std::size_t>(j)][i];
            coeff *= eps_lm;
        }
        cs.series[i] = acc;
        cs.h[i] = eps_lm * acc;
    }
    return cs;
}

struct EnvelopeCurve {
    std::vector<double> tau;
    std::vector<double> value;        // E(tau)
    std::vector<double> series_part;  // |w0| Sigma (eps L_M)^{j-1} psi^{*j}
    std::vector<double> phi_part;     // eps L_B (1 - phi)
    double const_part = 0.0;          // eps^2 L_M L_B/(1-eps L_M); 0 if omitted
    int J = 0;
    double truncation_bound = 0.0;    // tail of the series factor, times |w0|
    // Inputs, recorded for provenance.
    double w0_norm = 0.0;
    double eps = 0.0;
    double L_B = 0.0;
    double L_M = 0.0;
    double kappa = 0.0;
    bool omit_eps2_terms = false;

    std::size_t size() const { return value.size(); }
    // Envelope value plus the truncation slack: nothing the theorem bounds
    // may exceed this.
    double certified(std::size_t i) const {
        return value[i] + w0_norm * truncation_bound;
    }
};

template <std::size_t N>
EnvelopeCurve envelope_curve(const ParticleParams<N>& params, const FieldBounds& bounds,
                             double w0_norm, std::size_t n_nodes, double dt, double tol = 1e-6,
                             bool omit_eps2 = false, unsigned threads = 0) {
    const double eps_lm = params.eps * bounds.L_M;
    if (!(eps_lm < 1.0)) throw DomainError("envelope: requires eps*L_M < 1");
    if (!(w0_norm >= 0.0)) throw DomainError("envelope: |w0| must be >= 0");

    const auto kernel = RelaxationKernel::make(params.kappa);
    const KernelTable table = psi_grid(kernel, n_nodes, dt);

    EnvelopeCurve e;
    e.tau.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) e.tau[i] = i * dt;
    e.w0_norm = w0_norm;
    e.eps = params.eps;
    e.L_B = bounds.L_B;
    e.L_M = bounds.L_M;
    e.kappa = params.kappa;
    e.omit_eps2_terms = omit_eps2;

    std::vector<double> series(n_nodes, 0.0);
    if (eps_lm > 0.0) {
        const ConvolutionSeries cs = convolution_series(table, eps_lm, tol, threads);
        series = cs.series;
        e.J = cs.J;
        e.truncation_bound = cs.truncation_bound;
    } else {
        series = table.psi;  // L_M = 0: single term, zero tail
        e.J = 1;
        e.truncation_bound = 0.0;
    }

    e.const_part =
        omit_eps2 ? 0.0
                  : params.eps * params.eps * bounds.L_M * bounds.L_B / (1.0 - eps_lm);
    e.value.resize(n_nodes);
    e.series_part.resize(n_nodes);
    e.phi_part.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        e.series_part[i] = w0_norm * series[i];
        e.phi_part[i] = params.eps * bounds.L_B * (1.0 - table.phi[i]);
        e.value[i] = e.series_part[i] + e.phi_part[i] + e.const_part;
    }
    return e;
}

// limsup bound eps L_B / (1 - eps L_M).
template <std::size_t N>
double asymptotic_bound(const ParticleParams<N>& params, const FieldBounds& bounds) {
    const double eps_lm = params.eps * bounds.L_M;
    if (!(eps_lm < 1.0)) throw DomainError("asymptotic_bound: requires eps*L_M < 1");
    return params.eps * bounds.L_B / (1.0 - eps_lm);
}

// Global bound (|w0| + eps L_B) / (1 - eps L_M).
template <std::size_t N>
double sup_bound(const ParticleParams<N>& params, const FieldBounds& bounds, double w0_norm) {
    const double eps_lm = params.eps * bounds.L_M;
    if (!(eps_lm < 1.0)) throw DomainError("sup_bound: requires eps*L_M < 1");
    return (w0_norm + params.eps * bounds.L_B) / (1.0 - eps_lm);
}

struct ContinuationCertificate {
    double h = 0.0;       // continuation window, scaled time
    double h_phys = 0.0;  // eps * h, physical time
    double K = 0.0;       // invariant ball radius
    // Inputs.
    double eps = 0.0;
    double L_A = 0.0;
    double L_B = 0.0;
    double L_M = 0.0;
    double L_c = 0.0;
    double w0_norm = 0.0;
    // K' in the ball radius is taken as the computable sup bound on |w|,
    // which dominates the sup of the inhomogeneous term.
    std::string provenance = "K' = (|w0| + eps L_B)/(1 - eps L_M)";
};

// Window over which the fixed-point continuation is a contraction:
// h = (1/2) min( 1/(eps (L_M+1)),
//                1/(2 eps [3 L_c + L_M + L_c (|w0|+eps L_B)/(1-eps L_M)]) ).
template <std::size_t N>
ContinuationCertificate continuation_window(const ParticleParams<N>& params,
                                            const FieldBounds& bounds, double w0_norm) {
    const double eps_lm = params.eps * bounds.L_M;
    if (!(eps_lm < 1.0)) throw DomainError("continuation_window: requires eps*L_M < 1");
    if (!bounds.L_c)
        throw CapabilityError("continuation_window: bounds lack the Lipschitz constant L_c");
    const double eps = params.eps;
    const double lc = *bounds.L_c;
    const double kp = sup_bound(params, bounds, w0_norm);
    const double h1 = 1.0 / (eps * (bounds.L_M + 1.0));
    const double h2 = 1.0 / (2.0 * eps * (3.0 * lc + bounds.L_M + lc * kp));
    ContinuationCertificate c;
    c.h = 0.5 * std::min(h1, h2);
    c.h_phys = eps * c.h;
    c.K = kp + (bounds.L_B + bounds.L_A) / (2.0 * (bounds.L_M + 1.0));
    c.eps = eps;
    c.L_A = bounds.L_A;
    c.L_B = bounds.L_B;
    c.L_M = bounds.L_M;
    c.L_c = lc;
    c.w0_norm = w0_norm;
    return c;
}

}  // namespace basset
