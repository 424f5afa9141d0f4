#pragma once

// Scaled complementary error function erfcx(z) = exp(z^2) erfc(z) for complex
// arguments. The naive product overflows for moderate |z|, so erfcx is the
// quantity every kernel formula is written in.
//
// Three regimes, all targeting <= 1e-12 relative error on Re z >= 0:
//   |z| <= 0.5   Maclaurin series for erf, then one stable exp.
//   |z| >= 12    asymptotic expansion 1/(z sqrt(pi)) (1 - 1/(2z^2) + ...).
//   otherwise    Weideman's rational approximation of the Faddeeva function.
// Re z < 0 is reached by the reflection erfcx(-z) = 2 exp(z^2) - erfcx(z)
// and inherits the overflow of exp(z^2); kernel evaluations never need it.

#include <array>
#include <cmath>
#include <complex>

#include "basset/common.hpp"

namespace basset {

namespace detail {

inline constexpr double kSqrtPi = 1.7724538509055160273;
inline constexpr double kInvSqrtPi = 0.5641895835477562869;

// Weideman (1994) rational approximation of w(z) = exp(-z^2) erfc(-iz) on the
// closed upper half plane. The polynomial coefficients are the Fourier
// coefficients of a scaled Gaussian on the unit circle; computed once by a
// direct DFT.
template <int NW>
struct WeidemanTable {
    std::array<double, NW> a{};
    double L = 0.0;

    WeidemanTable() {
        const int M = 2 * NW;
        const int M2 = 4 * NW;
        L = std::sqrt(NW / std::sqrt(2.0));
        std::array<double, 4 * NW> f{};
        f[0] = 0.0;
        for (int j = 0; j <= 2 * M - 2; ++j) {
            const double theta = (j - M + 1) * M_PI / M;
            const double t = L * std::tan(0.5 * theta);
            f[j + 1] = std::exp(-t * t) * (L * L + t * t);
        }
        for (int p = 1; p <= NW; ++p) {
            double acc = 0.0;
            for (int i = 0; i < M2; ++i) {
                const double g = f[(i + M) % M2];
                acc += g * std::cos(2.0 * M_PI * p * i / M2);
            }
            a[p - 1] = acc / M2;
        }
    }
};

// Faddeeva w(z) for Im z >= 0.
inline std::complex<double> faddeeva_upper(std::complex<double> z) {
    static const WeidemanTable<64> tab;
    const std::complex<double> iz(-z.imag(), z.real());
    const std::complex<double> den = tab.L - iz;
    const std::complex<double> Z = (tab.L + iz) / den;
    std::complex<double> p(0.0, 0.0);
    for (int m = 64; m-- > 0;) p = p * Z + tab.a[m];
    return 2.0 * p / (den * den) + kInvSqrtPi / den;
}

inline std::complex<double> erfcx_series_small(std::complex<double> z) {
    // erf by Maclaurin series; |z| <= 0.5 so ~12 terms reach 1e-18.
    const std::complex<double> z2 = z * z;
    std::complex<double> term = z;
    std::complex<double> sum = z;
    for (int n = 1; n < 32; ++n) {
        term *= -z2 / static_cast<double>(n);
        const std::complex<double> add = term / static_cast<double>(2 * n + 1);
        sum += add;
        if (std::abs(add) < 1e-18 * std::abs(sum)) break;
    }
    const std::complex<double> erf_z = 2.0 * kInvSqrtPi * sum;
    return std::exp(z2) * (1.0 - erf_z);
}

inline std::complex<double> erfcx_asymptotic(std::complex<double> z) {
    // 1/(z sqrt(pi)) * sum_m (-1)^m (2m-1)!!/(2 z^2)^m, |arg z| < 3pi/4.
    const std::complex<double> inv2z2 = 0.5 / (z * z);
    std::complex<double> term(1.0, 0.0);
    std::complex<double> sum(1.0, 0.0);
    for (int m = 1; m <= 20; ++m) {
        term *= -static_cast<double>(2 * m - 1) * inv2z2;
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum / (z * kSqrtPi);
}

}  // namespace detail

inline std::complex<double> erfcx(std::complex<double> z) {
    const double x = z.real();
    if (x < 0.0) {
        // erfc(-z) = 2 - erfc(z); exp(z^2) can overflow for large |Re z|.
        return 2.0 * std::exp(z * z) - erfcx(-z);
    }
    const double az = std::abs(z);
    if (az == 0.0) return {1.0, 0.0};
    if (az <= 0.5) return detail::erfcx_series_small(z);
    if (az >= 12.0) return detail::erfcx_asymptotic(z);
    // erfcx(z) = w(iz); Im(iz) = Re z >= 0 here.
    return detail::faddeeva_upper(std::complex<double>(-z.imag(), z.real()));
}

inline double erfcx(double x) {
    if (x >= 0.0) return erfcx(std::complex<double>(x, 0.0)).real();
    return 2.0 * std::exp(x * x) - erfcx(std::complex<double>(-x, 0.0)).real();
}

// Order-1/2 Mittag-Leffler function evaluated at -z: E_{1/2}(-z) = erfcx(z).
inline std::complex<double> mittag_leffler_half(std::complex<double> z) {
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw DomainError("mittag_leffler_half: non-finite argument");
    return erfcx(z);
}

}  // namespace basset
