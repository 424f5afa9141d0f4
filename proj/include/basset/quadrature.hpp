#pragma once

// Scalar quadrature helpers: fixed Gauss-Legendre panels and a recursive
// adaptive Simpson rule. Used for kernel integrals (phi at kappa = 2,
// psi/phi consistency checks) and by the Voigt oracle.

#include <cmath>
#include <functional>

#include "basset/common.hpp"

namespace basset {

// 15-point Gauss-Legendre on [a, b].
template <typename F>
double gauss15(const F& f, double a, double b) {
    // Nodes/weights for [-1, 1], symmetric.
    static const double x[8] = {0.0,
                                0.2011940939974345,
                                0.3941513470775634,
                                0.5709721726085388,
                                0.7244177313601701,
                                0.8482065834104272,
                                0.9372733924007060,
                                0.9879925180204854};
    static const double w[8] = {0.2025782419255609,
                                0.1984314853271112,
                                0.1861610000155619,
                                0.1662692058169938,
                                0.1395706779261539,
                                0.1071592204671718,
                                0.0703660474881081,
                                0.0307532419961186};
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double s = w[0] * f(c);
    for (int i = 1; i < 8; ++i) s += w[i] * (f(c - h * x[i]) + f(c + h * x[i]));
    return s * h;
}

namespace detail {

template <typename F>
double adaptive_simpson_rec(const F& f, double a, double b, double fa, double fm, double fb,
                            double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0) throw OracleFailureError("adaptive quadrature: recursion limit reached");
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return adaptive_simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           adaptive_simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace detail

template <typename F>
double integrate_adaptive(const F& f, double a, double b, double tol = 1e-10,
                          int max_depth = 48) {
    if (a == b) return 0.0;
    const double fa = f(a);
    const double fb = f(b);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return detail::adaptive_simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

// Integral of f over [0, b] when f has a sqrt-type cusp at 0, i.e. f(s) is
// smooth in sqrt(s). Substituting s = u^2 removes the cusp.
template <typename F>
double integrate_sqrt_cusp(const F& f, double b, double tol = 1e-10) {
    if (b <= 0.0) return 0.0;
    const double split = std::min(b, 1.0);
    double v = integrate_adaptive([&](double u) { return 2.0 * u * f(u * u); }, 0.0,
                                  std::sqrt(split), tol);
    if (b > split) v += integrate_adaptive(f, split, b, tol);
    return v;
}

}  // namespace basset
