#pragma once

// Voigt-function oracle for the oscillatory kernel regime 0 < kappa < 2.
// U and V are computed from their defining integrals by trapezoid sums over
// the substituted Gaussian variable (spectrally accurate; the step is halved
// until the value settles). Independent of both the closed forms and the
// Laplace oracle.

#include <cmath>
#include <complex>

#include "basset/common.hpp"

namespace basset {

struct VoigtUV {
    double U = 0.0;
    double V = 0.0;
};

// U(x,t) = (4 pi t)^{-1/2} Int exp(-(x+s)^2/(4t)) / (1+s^2) ds
// V(x,t) = same with an extra factor s. Substituting s = 2 sqrt(t) u - x
// turns both into integrals of exp(-u^2) times a Lorentzian.
inline VoigtUV voigt_uv(double x, double t, double tol = 1e-12) {
    if (!(t > 0.0)) throw DomainError("voigt_uv: t must be positive");
    const double root_t2 = 2.0 * std::sqrt(t);
    const double half_width = 7.5;  // exp(-7.5^2) ~ 4e-25
    // Lorentzian pole distance in u is 1/(2 sqrt(t)); resolve it.
    double h = std::min(0.25, 0.25 / root_t2);

    auto sum_at = [&](double step) -> VoigtUV {
        const long long n = static_cast<long long>(std::ceil(half_width / step));
        double su = 0.0;
        double sv = 0.0;
        for (long long k = -n; k <= n; ++k) {
            const double u = k * step;
            const double g = std::exp(-u * u);
            const double s = root_t2 * u - x;
            const double lor = 1.0 / (1.0 + s * s);
            su += g * lor;
            sv += g * s * lor;
        }
        const double c = step / 1.7724538509055160273;  // 1/sqrt(pi)
        return {su * c, sv * c};
    };

    VoigtUV prev = sum_at(h);
    for (int round = 0; round < 24; ++round) {
        h *= 0.5;
        const VoigtUV cur = sum_at(h);
        const double du = std::abs(cur.U - prev.U);
        const double dv = std::abs(cur.V - prev.V);
        if (du <= tol * std::max(1.0, std::abs(cur.U)) &&
            dv <= tol * std::max(1.0, std::abs(cur.V)))
            return cur;
        prev = cur;
    }
    throw OracleFailureError("voigt_uv: trapezoid refinement did not settle");
}

// psi_kappa(tau) through the Voigt representation of E_{1/2}, valid only in
// the complex-conjugate regime.
inline double voigt_psi(double kappa, double tau, double tol = 1e-12) {
    if (!(kappa > 0.0 && kappa < 2.0)) throw DomainError("voigt_psi: kappa must lie in (0, 2)");
    if (!(tau > 0.0)) throw DomainError("voigt_psi: tau must be positive");
    const double root = std::sqrt(4.0 - kappa * kappa);
    const double x = -root / kappa;
    const double t = 1.0 / (kappa * kappa * tau);
    const VoigtUV uv = voigt_uv(x, t, tol);
    const double pref = 2.0 / (kappa * std::sqrt(M_PI * tau));
    return pref * (uv.U - (kappa / root) * uv.V);
}

// E_{1/2}(-z) for Re z > 0 via the same representation; used to cross-check
// the erfcx implementation. With these integral definitions and
// z = (1 - ix)/(2 sqrt(t)) the value is sqrt(4t/pi) (U - iV).
inline std::complex<double> voigt_ml_half(std::complex<double> z, double tol = 1e-12) {
    if (!(z.real() > 0.0)) throw DomainError("voigt_ml_half: requires Re z > 0");
    const double re = z.real();
    const double t = 1.0 / (4.0 * re * re);
    const double x = -z.imag() / re;
    const VoigtUV uv = voigt_uv(x, t, tol);
    const double pref = std::sqrt(4.0 * t / M_PI);
    return {pref * uv.U, -pref * uv.V};
}

}  // namespace basset
