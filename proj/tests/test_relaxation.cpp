#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "basset/erfcx.hpp"
#include "basset/laplace.hpp"
#include "basset/quadrature.hpp"
#include "basset/relaxation.hpp"
#include "basset/voigt.hpp"

using namespace basset;
using cplx = std::complex<double>;

namespace {

// Test-side oracle: Lentz continued fraction for erfcx, independent of the
// rational approximation in the library. Reliable for Re z >= 1.
cplx erfcx_cf(cplx z) {
    const double tiny = 1e-300;
    cplx f = z, C = z, D = 0.0;
    double a = 0.0;
    for (int it = 0; it < 400; ++it) {
        a += 0.5;
        D = z + a * D;
        C = z + a / C;
        if (std::abs(D) == 0.0) D = tiny;
        D = 1.0 / D;
        const cplx delta = C * D;
        f *= delta;
        if (std::abs(1.0 - delta) < 1e-16) break;
    }
    return 1.0 / (f * 1.7724538509055160273);
}

std::vector<double> log_grid(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (n - 1.0));
    return v;
}

}  // namespace

TEST_CASE("erfcx agrees with the real standard library") {
    for (double x : {0.0, 1e-3, 0.3, 0.9, 2.0, 4.9, 11.0, 26.0}) {
        const double ref = x < 5.0 ? std::exp(x * x) * std::erfc(x)
                                   : erfcx_cf(cplx(x, 0.0)).real();
        CHECK(erfcx(x) == doctest::Approx(ref).epsilon(5e-14));
    }
    CHECK(erfcx(0.0) == 1.0);
}

TEST_CASE("erfcx agrees with the continued-fraction oracle off the real axis") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> ur(1.0, 10.0), ui(-10.0, 10.0);
    for (int i = 0; i < 200; ++i) {
        const cplx z(ur(rng), ui(rng));
        const cplx a = erfcx(z);
        const cplx b = erfcx_cf(z);
        CHECK(std::abs(a - b) <= 1e-12 * std::abs(b));
    }
}

TEST_CASE("erfcx agrees with the Voigt integral representation") {
    // Near-imaginary arguments, where the continued fraction is unreliable.
    for (double re : {0.05, 0.2, 0.7}) {
        for (double im : {0.5, 3.0, 9.99}) {
            const cplx z(re, im);
            const cplx a = erfcx(z);
            const cplx b = voigt_ml_half(z, 1e-13);
            CHECK(std::abs(a - b) <= 1e-10 * std::abs(b));
        }
    }
}

TEST_CASE("mittag-leffler conjugation symmetry") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> ur(0.0, 6.0), ui(-6.0, 6.0);
    for (int i = 0; i < 20; ++i) {
        const cplx z(ur(rng), ui(rng));
        const cplx a = mittag_leffler_half(std::conj(z));
        const cplx b = std::conj(mittag_leffler_half(z));
        CHECK(std::abs(a - b) <= 1e-13 * std::max(1.0, std::abs(b)));
    }
    CHECK(mittag_leffler_half(cplx(0.0, 0.0)) == cplx(1.0, 0.0));
    CHECK_THROWS_AS((void)mittag_leffler_half(cplx(std::nan(""), 0.0)), DomainError);
}

TEST_CASE("mittag-leffler large-argument law") {
    // E_{1/2}(-z) ~ (1/(z sqrt(pi))) (1 - 1/(2z^2) + 3/(4 z^4) - ...).
    for (double z : {10.0, 15.0, 25.0, 40.0}) {
        const double lhs = erfcx(z) * z * 1.7724538509055160273;
        const double series = 1.0 - 1.0 / (2.0 * z * z) + 3.0 / (4.0 * std::pow(z, 4)) -
                              15.0 / (8.0 * std::pow(z, 6));
        CHECK(lhs == doctest::Approx(series).epsilon(1e-7));
    }
}

TEST_CASE("kernel initial values and factorization") {
    for (double kap : {0.5, 1.0, std::sqrt(3.0), 2.0, 2.5, 4.0}) {
        const auto k = RelaxationKernel::make(kap);
        CHECK(psi(k, 0.0) == 1.0);
        CHECK(phi(k, 0.0) == 1.0);
        CHECK(std::abs(k.lambda_plus * k.lambda_minus - 1.0) < 1e-13);
        CHECK(std::abs(k.lambda_plus + k.lambda_minus - kap) < 1e-13);
    }
    const auto k25 = RelaxationKernel::make(2.5);
    CHECK(k25.lambda_plus.real() == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(k25.lambda_minus.real() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK_THROWS_AS((void)psi(RelaxationKernel::make(1.0), -1e-9), DomainError);
    CHECK_THROWS_AS((void)phi(RelaxationKernel::make(1.0), -1e-9), DomainError);
}

TEST_CASE("closed form matches the inverse-transform oracle") {
    for (double kap : {0.5, 1.0, 1.5, 2.0, 2.5}) {
        const auto closed = RelaxationKernel::make(kap);
        const auto talbot = RelaxationKernel::make(kap, KernelBackend::laplace_oracle);
        for (double tau : log_grid(1e-3, 1e3, 25)) {
            const double a = psi(closed, tau);
            const double b = psi(talbot, tau);
            CHECK(std::abs(a - b) <= 1e-7 * std::abs(a));
        }
        for (double tau : {0.5, 5.0, 50.0}) {
            const double a = phi(closed, tau);
            const double b = phi(talbot, tau);
            CHECK(std::abs(a - b) <= 1e-7 * std::abs(a));
        }
    }
}

TEST_CASE("closed form matches the Voigt oracle in the oscillatory regime") {
    for (double kap : {0.5, 1.0, 1.5}) {
        const auto closed = RelaxationKernel::make(kap);
        const auto voigt = RelaxationKernel::make(kap, KernelBackend::voigt_oracle);
        for (double tau : log_grid(1e-3, 1e3, 15)) {
            const double a = psi(closed, tau);
            const double b = psi(voigt, tau);
            CHECK(std::abs(a - b) <= 1e-6 * std::abs(a));
        }
    }
    // tau -> 0+: the representation approaches psi(0) = 1.
    CHECK(voigt_psi(1.0, 1e-8) == doctest::Approx(1.0).epsilon(1e-3));
    // Continuity toward the double root.
    const auto k2 = RelaxationKernel::make(2.0);
    for (double tau : {0.1, 1.0, 10.0})
        CHECK(voigt_psi(1.9999, tau) == doctest::Approx(psi(k2, tau)).epsilon(1e-4));
    CHECK_THROWS_AS((void)voigt_psi(2.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)voigt_psi(0.0, 1.0), DomainError);
}

TEST_CASE("inverse transform oracle on elementary pairs") {
    CHECK(inverse_laplace([](std::complex<long double> s) { return 1.0L / (s + 1.0L); }, 1.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
    CHECK(inverse_laplace([](std::complex<long double> s) { return 1.0L / std::sqrt(s); },
                          4.0) == doctest::Approx(1.0 / std::sqrt(4.0 * M_PI)).epsilon(1e-9));
    CHECK(inverse_laplace([](std::complex<long double> s) { return 1.0L / (s * s); }, 3.0) ==
          doctest::Approx(3.0).epsilon(1e-9));
    CHECK_THROWS_AS(
        (void)inverse_laplace([](std::complex<long double> s) { return 1.0L / s; }, 0.0),
        DomainError);
}

TEST_CASE("kappa regimes join continuously at the double root") {
    const auto lo = RelaxationKernel::make(2.0 - 1e-6);
    const auto mid = RelaxationKernel::make(2.0);
    const auto hi = RelaxationKernel::make(2.0 + 1e-6);
    for (double tau : log_grid(1e-3, 1e3, 20)) {
        CHECK(std::abs(psi(lo, tau) - psi(mid, tau)) < 1e-5);
        CHECK(std::abs(psi(hi, tau) - psi(mid, tau)) < 1e-5);
        CHECK(std::abs(phi(lo, tau) - phi(mid, tau)) < 1e-5);
        CHECK(std::abs(phi(hi, tau) - phi(mid, tau)) < 1e-5);
    }
}

TEST_CASE("phi is the primitive: central differences recover psi") {
    const double h = 1e-4;
    for (double kap : {0.7, std::sqrt(3.0), 2.0, 3.0}) {
        const auto k = RelaxationKernel::make(kap);
        for (double tau : {0.5, 5.0, 50.0}) {
            const double dphi = -(phi(k, tau + h) - phi(k, tau - h)) / (2.0 * h);
            CHECK(dphi == doctest::Approx(psi(k, tau)).epsilon(1e-6));
        }
    }
}

TEST_CASE("quadrature of psi equals 1 - phi") {
    for (double kap : {0.5, 1.0, 2.0, 2.5}) {
        const auto k = RelaxationKernel::make(kap);
        for (double tau : {1.0, 10.0, 100.0}) {
            const double integral =
                integrate_sqrt_cusp([&](double s) { return psi(k, s); }, tau, 1e-11);
            CHECK(std::abs(integral - (1.0 - phi(k, tau))) < 1e-6);
        }
    }
}

TEST_CASE("phi decays like kappa/sqrt(pi tau)") {
    const auto k = RelaxationKernel::make(1.0);
    CHECK(phi(k, 1e6) < 1e-2);
    CHECK(phi(k, 1e6) == doctest::Approx(1.0 / std::sqrt(M_PI * 1e6)).epsilon(0.01));
}

TEST_CASE("tail amplitude kappa/(2 sqrt(pi))") {
    const auto k3 = RelaxationKernel::make(std::sqrt(3.0));
    CHECK(std::sqrt(3.0) / (2.0 * std::sqrt(M_PI)) == doctest::Approx(0.48860).epsilon(1e-4));
    CHECK(psi(k3, 1e3) * std::pow(1e3, 1.5) ==
          doctest::Approx(std::sqrt(3.0) / (2.0 * std::sqrt(M_PI))).epsilon(5e-3));

    const auto k2 = RelaxationKernel::make(2.0);
    CHECK(psi_asymptotic(k2, 100.0) == doctest::Approx(5.642e-4).epsilon(1e-3));
    CHECK(psi_asymptotic(k3, 1e4) == doctest::Approx(4.886e-7).epsilon(1e-3));
    // Relative gap of the leading term at tau = 1e3.
    const auto k1 = RelaxationKernel::make(1.0);
    CHECK(std::abs(psi(k1, 1e3) - psi_asymptotic(k1, 1e3)) / psi(k1, 1e3) < 0.05);
    CHECK_THROWS_AS((void)psi_asymptotic(k1, 0.0), DomainError);
}

TEST_CASE("sampled complete monotonicity") {
    for (double kap : {0.5, std::sqrt(3.0), 2.0, 2.5}) {
        const auto k = RelaxationKernel::make(kap);
        const auto taus = log_grid(1e-3, 1e3, 100);
        std::vector<double> ps(taus.size()), ph(taus.size());
        for (std::size_t i = 0; i < taus.size(); ++i) {
            ps[i] = psi(k, taus[i]);
            ph[i] = phi(k, taus[i]);
        }
        for (std::size_t i = 0; i + 2 < taus.size(); ++i) {
            CHECK(ps[i] >= -1e-8);
            CHECK(ph[i] >= -1e-8);
            CHECK(ph[i] <= 1.0 + 1e-12);
            const double d1 = (ps[i + 1] - ps[i]) / (taus[i + 1] - taus[i]);
            const double d2 = (ps[i + 2] - ps[i + 1]) / (taus[i + 2] - taus[i + 1]);
            CHECK(d1 <= 1e-8);
            CHECK((d2 - d1) / (taus[i + 2] - taus[i]) >= -1e-8);  // convexity
            CHECK(ph[i + 1] <= ph[i] + 1e-12);
        }
    }
}

TEST_CASE("synthetic kappa = 0 kernel is the exponential") {
    const auto k = RelaxationKernel::make(0.0);
    for (double tau : {0.1, 1.0, 10.0}) {
        CHECK(psi(k, tau) == doctest::Approx(std::exp(-tau)).epsilon(1e-15));
        CHECK(phi(k, tau) == doctest::Approx(std::exp(-tau)).epsilon(1e-15));
    }
}

TEST_CASE("kernel table") {
    const auto k = RelaxationKernel::make(std::sqrt(3.0));
    const auto t = psi_grid(k, 2001, 0.01);
    CHECK(t.psi[0] == 1.0);
    CHECK(t.phi[0] == 1.0);
    CHECK(t.kappa == doctest::Approx(std::sqrt(3.0)));
    for (std::size_t i = 1; i < t.size(); ++i) CHECK(t.psi[i] <= t.psi[i - 1] + 1e-14);
    // Trapezoid sum approximates 1 - phi at the end to O(step^2)-ish; the
    // sqrt cusp at zero limits the first panel.
    // The trapezoid sum approaches 1 - phi at the end; the sqrt cusp of the
    // first panel limits the rate to O(step^{3/2}).
    auto trap_gap = [&](const KernelTable& kt) {
        double acc = 0.0;
        for (std::size_t i = 1; i < kt.size(); ++i)
            acc += 0.5 * (kt.psi[i - 1] + kt.psi[i]) * kt.dt;
        return std::abs(acc - (1.0 - kt.phi.back()));
    };
    const double g1 = trap_gap(t);
    CHECK(g1 < 1e-3);
    const double g2 = trap_gap(psi_grid(k, 4001, 0.005));
    CHECK(g2 < g1 / 2.0);
    CHECK_THROWS_AS((void)psi_grid(k, 0, 0.01), DomainError);

    // At the double root the table is built by cumulative quadrature; it
    // must agree with the scalar evaluations.
    const auto k2 = RelaxationKernel::make(2.0);
    const auto t2 = psi_grid(k2, 101, 0.05);
    for (std::size_t i = 0; i < t2.size(); i += 20)
        CHECK(t2.phi[i] == doctest::Approx(phi(k2, i * 0.05)).epsilon(1e-9));
}
