#pragma once

// Dimensionless groups of the Maxey-Riley equation and the conversions from
// physical quantities. Everything downstream (kernels, solver, envelopes)
// consumes ParticleParams only.

#include <cmath>
#include <string>
#include <vector>

#include "basset/common.hpp"

namespace basset {

template <std::size_t N>
struct PhysicalSetup {
    double rho_p = 0.0;  // particle density
    double rho_f = 0.0;  // fluid density
    double a = 0.0;      // particle radius
    double nu = 0.0;     // kinematic viscosity
    double U = 0.0;      // characteristic velocity
    double L = 0.0;      // characteristic length
    Vec<N> g = zero_vec<N>();  // gravitational acceleration
};

// Immutable after construction; freely shareable across threads.
template <std::size_t N>
struct ParticleParams {
    double R = 0.0;      // density ratio 2*rho_f/(rho_f + 2*rho_p), in (0,2)
    double St = 0.0;     // Stokes number
    double Re = 0.0;     // Reynolds number
    double mu = 0.0;     // R/St
    double kappa = 0.0;  // sqrt(9R/2), memory strength
    double gamma = 0.0;  // 9R/(2Re), Faxen coefficient
    double eps = 0.0;    // St/R = 1/mu
    Vec<N> g_scaled = zero_vec<N>();
    // kappa = 0 relaxation (memory disabled) is admitted as a synthetic test
    // mode only; no physical R produces it.
    bool synthetic = false;
    std::vector<std::string> notes;
};

namespace detail {

inline void require_positive_finite(double v, const char* field) {
    if (!std::isfinite(v) || v <= 0.0)
        throw ValidationError(std::string("params: ") + field + " must be positive and finite");
}

}  // namespace detail

template <std::size_t N>
ParticleParams<N> from_dimensionless(double R, double St, double Re,
                                     const Vec<N>& g_scaled = zero_vec<N>()) {
    if (!std::isfinite(R) || R <= 0.0 || R >= 2.0)
        throw DomainError("params: R must lie in (0, 2)");
    if (!std::isfinite(St) || St <= 0.0) throw DomainError("params: St must be positive");
    if (!std::isfinite(Re) || Re <= 0.0) throw DomainError("params: Re must be positive");
    ParticleParams<N> p;
    p.R = R;
    p.St = St;
    p.Re = Re;
    p.mu = R / St;
    p.kappa = std::sqrt(4.5 * R);
    p.gamma = 4.5 * R / Re;
    p.eps = St / R;
    p.g_scaled = g_scaled;
    return p;
}

template <std::size_t N>
ParticleParams<N> from_physical(const PhysicalSetup<N>& s) {
    detail::require_positive_finite(s.rho_p, "rho_p");
    detail::require_positive_finite(s.rho_f, "rho_f");
    detail::require_positive_finite(s.a, "a");
    detail::require_positive_finite(s.nu, "nu");
    detail::require_positive_finite(s.U, "U");
    detail::require_positive_finite(s.L, "L");
    for (std::size_t i = 0; i < N; ++i)
        if (!std::isfinite(s.g[i])) throw ValidationError("params: g must be finite");

    const double Re = s.U * s.L / s.nu;
    const double ratio = s.a / s.L;
    const double St = (2.0 / 9.0) * ratio * ratio * Re;
    const double R = 2.0 * s.rho_f / (s.rho_f + 2.0 * s.rho_p);
    Vec<N> g_scaled;
    for (std::size_t i = 0; i < N; ++i) g_scaled[i] = s.g[i] * s.L / (s.U * s.U);
    ParticleParams<N> p = from_dimensionless<N>(R, St, Re, g_scaled);
    if (ratio > 0.1)
        p.notes.push_back("a/L = " + std::to_string(ratio) +
                          " is not small; the equation of motion assumes a << L");
    return p;
}

// Memory-disabled mode: classical Stokes relaxation w' + w = 0 in scaled
// time. Used by tests as an exponential oracle for the solver machinery.
template <std::size_t N>
ParticleParams<N> synthetic_no_memory(double eps, const Vec<N>& g_scaled = zero_vec<N>()) {
    if (!std::isfinite(eps) || eps <= 0.0) throw DomainError("params: eps must be positive");
    ParticleParams<N> p;
    p.R = 0.0;
    p.St = 0.0;
    p.Re = 0.0;
    p.eps = eps;
    p.mu = 1.0 / eps;
    p.kappa = 0.0;
    p.gamma = 0.0;
    p.g_scaled = g_scaled;
    p.synthetic = true;
    return p;
}

// Coefficient of the buoyancy/slip forcing B_u; vanishes exactly for the
// neutrally buoyant case R = 2/3.
inline double buoyancy_coefficient(double R) { return 1.5 * R - 1.0; }

}  // namespace basset
