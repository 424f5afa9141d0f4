#include <doctest.h>

#include <cmath>

#include "basset/envelope.hpp"
#include "basset/solver.hpp"

using namespace basset;

namespace {

// Fig-3 style inputs.
FieldBounds bench_bounds(double L_B) {
    FieldBounds b;
    b.L_A = 0.3204;
    b.L_B = L_B;
    b.L_M = 1.423688;
    b.L_c = 6.39;
    return b;
}

}  // namespace

TEST_CASE("convolution series truncation rule and shape") {
    const auto kern = RelaxationKernel::make(std::sqrt(3.0));
    const auto table = psi_grid(kern, 2001, 0.01);
    const double eps_lm = 0.014237;
    const auto cs = convolution_series(table, eps_lm, 1e-6);

    // Smallest J with (eps L_M)^J/(1 - eps L_M) < tol.
    int J = 1;
    double tail = eps_lm / (1.0 - eps_lm);
    while (tail >= 1e-6) {
        ++J;
        tail *= eps_lm;
    }
    CHECK(cs.J == J);
    CHECK(cs.J == 4);
    CHECK(cs.truncation_bound == doctest::Approx(std::pow(eps_lm, cs.J) / (1.0 - eps_lm)));

    // psi^{*j}(0) = 0 for j >= 2; all powers within [0, 1].
    for (int j = 1; j < cs.J; ++j) CHECK(cs.powers[j][0] == 0.0);
    for (int j = 0; j < cs.J; ++j)
        for (double v : cs.powers[j]) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0 + 1e-12);
        }

    // Discrete Young inequality: max psi^{*(j+1)} <= (int psi) max psi^{*j}.
    double int_psi = 0.0;
    for (std::size_t i = 1; i < table.size(); ++i)
        int_psi += 0.5 * (table.psi[i - 1] + table.psi[i]) * table.dt;
    for (int j = 0; j + 1 < cs.J; ++j) {
        double mj = 0.0, mj1 = 0.0;
        for (double v : cs.powers[j]) mj = std::max(mj, v);
        for (double v : cs.powers[j + 1]) mj1 = std::max(mj1, v);
        CHECK(mj1 <= int_psi * mj + 1e-6);
    }

    // Discrete integral of h stays below the geometric bound.
    double int_h = 0.0;
    for (std::size_t i = 1; i < cs.size(); ++i)
        int_h += 0.5 * (cs.h[i - 1] + cs.h[i]) * cs.dt;
    CHECK(int_h <= eps_lm / (1.0 - eps_lm) + 1e-6);

    CHECK_THROWS_AS((void)convolution_series(table, 1.0, 1e-6), DomainError);
    CHECK_THROWS_AS((void)convolution_series(table, 0.0, 1e-6), DomainError);
}

TEST_CASE("envelope curve values") {
    const auto params = from_dimensionless<2>(1.0, 0.01, 1000.0);
    const auto bounds = bench_bounds(0.1207);
    const double w0n = std::sqrt(200.0);

    const auto full = envelope_curve(params, bounds, w0n, 2001, 0.01, 1e-6, false);
    const auto plot = envelope_curve(params, bounds, w0n, 2001, 0.01, 1e-6, true);

    // At tau = 0 the series head is psi(0) = 1 and phi(0) = 1.
    CHECK(plot.value[0] == doctest::Approx(w0n).epsilon(1e-14));
    CHECK(full.value[0] == doctest::Approx(w0n + full.const_part).epsilon(1e-14));
    CHECK(full.const_part ==
          doctest::Approx(params.eps * params.eps * bounds.L_M * bounds.L_B /
                          (1.0 - params.eps * bounds.L_M)));

    // Monotone decay toward the asymptotic bound (full envelope).
    const double asym = asymptotic_bound(params, bounds);
    CHECK(asym == doctest::Approx(1.2244e-3).epsilon(1e-4));
    for (std::size_t i = 0; i < full.size(); ++i) CHECK(full.value[i] >= asym - 1e-12);

    // Far out the full envelope settles onto the asymptotic bound up to the
    // residual phi and series tails.
    const auto kern = RelaxationKernel::make(params.kappa);
    const auto far = envelope_curve(params, bounds, w0n, 501, 4.0, 1e-6, false);
    const double tau_far = 500 * 4.0;
    const double slack =
        params.eps * bounds.L_B * phi(kern, tau_far) + w0n * far.series_part.back() / w0n +
        w0n * far.truncation_bound;
    CHECK(std::abs(far.value.back() - asym) <= slack + 1e-12);

    CHECK_THROWS_AS(
        (void)envelope_curve(params, bench_bounds(0.0), -1.0, 101, 0.01, 1e-6, false),
        DomainError);
}

TEST_CASE("neutral buoyancy envelope decays to zero") {
    const auto params = from_dimensionless<2>(2.0 / 3.0, (2.0 / 3.0) / 100.0, 1000.0);
    const auto bounds = bench_bounds(0.0);
    const auto env = envelope_curve(params, bounds, std::sqrt(200.0), 1001, 1.0, 1e-6, true);
    CHECK(asymptotic_bound(params, bounds) == 0.0);
    CHECK(env.value.back() < 1e-3);
    CHECK(env.value.back() > 0.0);
}

TEST_CASE("closed-form bounds") {
    const auto params = from_dimensionless<2>(1.0, 0.01, 1000.0);
    const auto bounds = bench_bounds(0.1207);
    const double w0n = std::sqrt(200.0);

    CHECK(sup_bound(params, bounds, w0n) == doctest::Approx(14.34761).epsilon(1e-5));
    CHECK(sup_bound(params, bounds, 0.0) ==
          doctest::Approx(params.eps * 0.1207 / (1.0 - params.eps * bounds.L_M)));
    CHECK(sup_bound(params, bench_bounds(0.0), 0.0) == 0.0);

    // Monotonicity in each argument.
    const auto more_w0 = sup_bound(params, bounds, w0n + 1.0);
    CHECK(more_w0 > sup_bound(params, bounds, w0n));
    auto bb = bounds;
    bb.L_M += 0.1;
    CHECK(sup_bound(params, bb, w0n) > sup_bound(params, bounds, w0n));
    bb = bounds;
    bb.L_B += 0.1;
    CHECK(sup_bound(params, bb, w0n) > sup_bound(params, bounds, w0n));

    // Asymptotic bound scales linearly as eps -> 0.
    const auto p_small = from_dimensionless<2>(1.0, 0.001, 1000.0);  // eps = 1e-3
    const double ratio = asymptotic_bound(params, bounds) / asymptotic_bound(p_small, bounds);
    CHECK(ratio == doctest::Approx(10.0).epsilon(0.02));

    // eps L_M >= 1 is out of scope for every bound.
    const auto p_big = from_dimensionless<2>(1.0, 1.0, 1000.0);  // eps = 1
    CHECK_THROWS_AS((void)asymptotic_bound(p_big, bounds), DomainError);
    CHECK_THROWS_AS((void)sup_bound(p_big, bounds, 1.0), DomainError);
    CHECK_THROWS_AS((void)envelope_curve(p_big, bounds, 1.0, 11, 0.1, 1e-6, false),
                    DomainError);
}

TEST_CASE("continuation window certificate") {
    const auto params = from_dimensionless<2>(1.0, 0.01, 1000.0);
    const auto bounds = bench_bounds(0.1207);
    const double w0n = std::sqrt(200.0);

    const auto cert = continuation_window(params, bounds, w0n);
    CHECK(cert.h > 0.0);
    CHECK(cert.h <= 1.0 / (params.eps * (bounds.L_M + 1.0)));
    CHECK(cert.h_phys == doctest::Approx(params.eps * cert.h));
    CHECK(cert.K >= sup_bound(params, bounds, w0n));

    // Windows lengthen for light inertia: h scales like 1/eps.
    const auto p_small = from_dimensionless<2>(1.0, 0.001, 1000.0);
    const auto cert_small = continuation_window(p_small, bounds, w0n);
    CHECK(cert_small.h > 5.0 * cert.h);

    FieldBounds no_lc = bounds;
    no_lc.L_c.reset();
    CHECK_THROWS_AS((void)continuation_window(params, no_lc, w0n), CapabilityError);
}

TEST_CASE("frozen-field tightness: the envelope saturates") {
    FrozenField<2> frozen;
    const auto params = from_dimensionless<2>(2.0 / 3.0, (2.0 / 3.0) / 100.0, 1000.0);
    DerivedFields<2> df(frozen, params, false);
    FieldBounds zero;
    zero.L_A = 0.0;
    zero.L_B = 0.0;
    zero.L_M = 0.0;
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.tau_end = 20.0;
    const Vec<2> w0{10.0, 10.0};
    const auto rec = simulate(df, params, {0, 0}, w0, cfg);
    const auto env = envelope_curve(params, zero, norm(w0), rec.nodes(), cfg.dt, 1e-6, true);
    CHECK(env.J == 1);
    CHECK(env.truncation_bound == 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < rec.nodes(); ++i)
        worst = std::max(worst, std::abs(rec.abs_w(i) - env.value[i]) / env.value[i]);
    CHECK(worst < 1e-4);  // |w| = E to solver accuracy: the bound is sharp
}

TEST_CASE("envelope dominates a benchmark trajectory pointwise") {
    DoubleGyre dg(0.1, M_PI, 0.01);
    const auto params = from_dimensionless<2>(1.0, 0.01, 1000.0);
    DerivedFields<2> df(dg, params, false);
    BoundsGrid grid;
    grid.nx = 201;
    grid.ny = 101;
    grid.nt = 32;
    const auto bounds = estimate_bounds(df, grid, 2);
    SolverConfig cfg;
    cfg.dt = 5e-3;
    cfg.tau_end = 50.0;
    const Vec<2> w0{10.0, 10.0};
    const auto rec = simulate(df, params, {0.6, 0.3}, w0, cfg);
    const auto env =
        envelope_curve(params, bounds, norm(w0), rec.nodes(), cfg.dt, 1e-6, false);
    for (std::size_t i = 0; i < rec.nodes(); ++i)
        CHECK(rec.abs_w(i) <= env.certified(i) * (1.0 + 1e-9));
}
