#include <doctest.h>

#include <cmath>
#include <complex>

#include "basset/params.hpp"

using namespace basset;

TEST_CASE("equal densities give the neutrally buoyant ratio") {
    PhysicalSetup<2> s;
    s.rho_p = 850.0;
    s.rho_f = 850.0;
    s.a = 1e-4;
    s.nu = 1e-6;
    s.U = 0.5;
    s.L = 0.1;
    const auto p = from_physical(s);
    CHECK(p.R == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(p.kappa == doctest::Approx(std::sqrt(3.0)).epsilon(1e-14));  // sqrt(9R/2)
    CHECK(buoyancy_coefficient(p.R) == 0.0);
}

TEST_CASE("derived groups from physical quantities") {
    PhysicalSetup<2> s;
    s.rho_p = 2.0;
    s.rho_f = 1.0;
    s.a = 1e-3;
    s.nu = 1e-6;
    s.U = 1.0;
    s.L = 1.0;
    s.g = {0.0, -9.81};
    const auto p = from_physical(s);
    CHECK(p.Re == doctest::Approx(1e6));
    CHECK(p.St == doctest::Approx((2.0 / 9.0) * 1e-6 * 1e6));
    CHECK(p.R == doctest::Approx(2.0 / 5.0));
    CHECK(p.mu == doctest::Approx(p.R / p.St).epsilon(1e-15));
    CHECK(p.gamma == doctest::Approx(4.5 * p.R / p.Re).epsilon(1e-15));
    CHECK(p.eps == doctest::Approx(p.St / p.R).epsilon(1e-15));
    CHECK(p.eps * p.mu == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(p.g_scaled[1] == doctest::Approx(-9.81));
}

TEST_CASE("St = R/100 gives mu = 100") {
    const auto p = from_dimensionless<2>(2.0 / 3.0, (2.0 / 3.0) / 100.0, 1000.0);
    CHECK(p.mu == doctest::Approx(100.0).epsilon(1e-14));
    CHECK(p.eps == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("density-ratio limits") {
    PhysicalSetup<2> s;
    s.rho_f = 1.0;
    s.a = 1e-4;
    s.nu = 1e-6;
    s.U = 1.0;
    s.L = 1.0;
    double prev = 2.0;
    for (double rho_p : {1.0, 10.0, 1e3, 1e9, 1e100}) {
        s.rho_p = rho_p;
        const auto p = from_physical(s);
        CHECK(p.R > 0.0);
        CHECK(p.R < prev);  // monotone toward 0+
        prev = p.R;
    }
    s.rho_p = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS((void)from_physical(s), ValidationError);
}

TEST_CASE("validation names the offending field") {
    PhysicalSetup<2> s;
    s.rho_p = 1.0;
    s.rho_f = 1.0;
    s.a = 1e-4;
    s.nu = -1e-6;
    s.U = 1.0;
    s.L = 1.0;
    try {
        (void)from_physical(s);
        FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("nu") != std::string::npos);
    }
}

TEST_CASE("dimensionless constructor checks its domain") {
    CHECK_THROWS_AS((void)from_dimensionless<2>(0.0, 0.01, 1.0), DomainError);
    CHECK_THROWS_AS((void)from_dimensionless<2>(2.0, 0.01, 1.0), DomainError);
    CHECK_THROWS_AS((void)from_dimensionless<2>(1.0, 0.0, 1.0), DomainError);
    CHECK_THROWS_AS((void)from_dimensionless<2>(1.0, 0.01, -1.0), DomainError);

    const auto p = from_dimensionless<2>(1.0, 0.01, 50.0);
    CHECK(p.kappa == doctest::Approx(std::sqrt(4.5)).epsilon(1e-15));  // 2.1213203
    CHECK(p.eps == doctest::Approx(0.01).epsilon(1e-15));
}

TEST_CASE("critically damped memory strength") {
    // kappa = sqrt(9R/2) hits 2 exactly at R = 8/9.
    const auto p = from_dimensionless<2>(8.0 / 9.0, 0.01, 100.0);
    CHECK(p.kappa == 2.0);
}

TEST_CASE("factorization roots multiply to one and sum to kappa") {
    for (double R : {0.1, 0.5, 2.0 / 3.0, 8.0 / 9.0, 1.0, 1.5, 1.9}) {
        const auto p = from_dimensionless<2>(R, 0.01, 100.0);
        CHECK(p.kappa * p.kappa == doctest::Approx(4.5 * R).epsilon(1e-14));
        const std::complex<double> disc = std::sqrt(std::complex<double>(p.kappa * p.kappa - 4.0));
        const std::complex<double> lp = 0.5 * (p.kappa + disc);
        const std::complex<double> lm = 0.5 * (p.kappa - disc);
        CHECK(std::abs(lp * lm - 1.0) < 1e-14);
        CHECK(std::abs(lp + lm - p.kappa) < 1e-14);
    }
}

TEST_CASE("synthetic memoryless mode is flagged") {
    const auto p = synthetic_no_memory<2>(0.02);
    CHECK(p.synthetic);
    CHECK(p.kappa == 0.0);
    CHECK(p.eps == 0.02);
    CHECK_THROWS_AS((void)synthetic_no_memory<2>(0.0), DomainError);
}

TEST_CASE("large particles draw an advisory note, not a rejection") {
    PhysicalSetup<2> s;
    s.rho_p = 1.0;
    s.rho_f = 1.0;
    s.a = 0.5;
    s.nu = 1e-6;
    s.U = 1.0;
    s.L = 1.0;  // a/L = 0.5
    const auto p = from_physical(s);
    CHECK(!p.notes.empty());
}
