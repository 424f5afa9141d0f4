#pragma once

// Time integration of the rescaled particle system
//
//   dy/dtau = eps [w + A_u(y, t)],
//   dw/dtau + kappa d^{1/2}w/dtau^{1/2} + w = eps [-M_u(y,t) w + B_u(y,t)],
//
// with t = t0 + eps tau, on a uniform grid in scaled time. Two independent
// backends cross-check each other:
//
// fractional_direct: the equation integrated over one step. The memory term
// integrates exactly to (kappa/sqrt(pi)) [I(tau_{n+1}) - I(tau_n)] with
// I(tau) = Int_0^tau w(s)/sqrt(tau-s) ds, which is evaluated by product
// integration exact for piecewise-linear w; the local terms use the
// trapezoid rule. Semi-implicit: the new node enters linearly and is closed
// by fixed-point iteration together with the position update.
//
// mild_volterra: the variation-of-constants form
// w(tau) = psi(tau) w0 + eps Int_0^tau psi(tau-s)[-M w + B] ds, advanced by
// product integration with interval weights Int psi = phi differences and
// midpoint values of the forcing.
//
// A single trajectory is inherently sequential (global history); ensembles
// parallelize across trajectories.

#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "basset/common.hpp"
#include "basset/flow.hpp"
#include "basset/params.hpp"
#include "basset/relaxation.hpp"

namespace basset {

enum class SolverBackend { fractional_direct, mild_volterra };

inline const char* to_string(SolverBackend b) {
    return b == SolverBackend::fractional_direct ? "fractional_direct" : "mild_volterra";
}

struct SolverConfig {
    SolverBackend backend = SolverBackend::fractional_direct;
    double dt = 5e-3;
    double tau_end = 1e3;
    double picard_tol = 1e-12;
    int picard_max_iters = 50;
    bool faxen = false;
    double t0 = 0.0;

    void validate() const {
        if (!(dt > 0.0)) throw ValidationError("solver: dt must be positive");
        if (!(tau_end >= dt)) throw ValidationError("solver: tau_end must be >= dt");
        if (!(picard_tol > 0.0)) throw ValidationError("solver: picard_tol must be positive");
        if (picard_max_iters < 1)
            throw ValidationError("solver: picard_max_iters must be >= 1");
    }
};

// Product-integration weights for I(tau_n) = Int_0^{tau_n} w(s)/sqrt(tau_n-s) ds
// with w piecewise linear on a uniform grid:
//   I_n = sqrt(dt) [ alpha_n w_0 + sum_{0<k<n} (alpha_{n-k} + beta_{n-k+1}) w_k
//                    + beta_1 w_n ].
// The forms below are algebraically identical to the textbook ones but avoid
// the large-m cancellation; all weights are positive and the rule is exact
// for constant and linear histories.
struct SingularKernelWeights {
    // Number of leading intervals represented in the basis {1, sqrt(s)}
    // instead of {1, s}. The solution leaves tau = 0 like w0 + c sqrt(tau),
    // so near the origin linear-in-s interpolation injects an O(dt) defect
    // against the singular kernel and the scheme drops to first order;
    // linear-in-sqrt(s) interpolation is exact for the cusp. The zone width
    // scales like 1/sqrt(dt) (a fixed window of ~2 sqrt(dt) in tau), which
    // keeps the residual of the plain-linear intervals beyond it o(dt^{3/2}).
    static std::size_t cusp_zone(double dt) {
        const double k = std::ceil(2.0 / std::sqrt(dt));
        return static_cast<std::size_t>(std::clamp(k, 16.0, 1024.0));
    }

    double dt = 0.0;
    std::size_t cusp_intervals = 16;
    std::vector<double> alpha;  // alpha[m], m >= 1
    std::vector<double> beta;   // beta[m], m >= 1
    std::vector<double> V;      // V[m] = alpha[m] + beta[m+1], m >= 1

    static SingularKernelWeights build(double dt, std::size_t max_nodes) {
        SingularKernelWeights s;
        s.dt = dt;
        s.cusp_intervals = cusp_zone(dt);
        const std::size_t M = max_nodes + 3;
        s.alpha.assign(M, 0.0);
        s.beta.assign(M, 0.0);
        s.V.assign(M, 0.0);
        for (std::size_t m = 1; m < M; ++m) {
            const double md = static_cast<double>(m);
            const double rm = std::sqrt(md);
            const double rm1 = std::sqrt(md - 1.0);
            const double u = 1.0 / (rm + rm1);
            const double rmm = std::sqrt(md * md - md);
            s.alpha[m] = (2.0 / 3.0) * u * (3.0 * md - 4.0) / (rmm + md - 2.0);
            s.beta[m] = (2.0 / 3.0) * u * (3.0 * md + 1.0) / (md + 1.0 + rmm);
        }
        for (std::size_t m = 1; m + 1 < M; ++m) s.V[m] = s.alpha[m] + s.beta[m + 1];
        return s;
    }

    // Weight of w_{j+1} when interval [j dt, (j+1) dt] is interpolated
    // linearly in sqrt(s) and integrated against (tau_n - s)^{-1/2}, in
    // units of sqrt(dt). Uses Int sqrt(s)/sqrt(tau-s) ds =
    // tau asin(sqrt(s/tau)) - sqrt(s (tau-s)).
    static double xi_node_weight(std::size_t j, std::size_t n) {
        const double jd = static_cast<double>(j);
        const double nd = static_cast<double>(n);
        const double k0 = 2.0 * (std::sqrt(nd - jd) - std::sqrt(nd - jd - 1.0));
        const double upper =
            nd * std::asin(std::sqrt((jd + 1.0) / nd)) - std::sqrt((jd + 1.0) * (nd - jd - 1.0));
        const double lower = nd * std::asin(std::sqrt(jd / nd)) - std::sqrt(jd * (nd - jd));
        const double k1 = upper - lower;
        const double delta = std::sqrt(jd + 1.0) - std::sqrt(jd);
        return (k1 - std::sqrt(jd) * k0) / delta;
    }

    // Correction factor relative to the linear-in-s weights: adds
    // ec(j, n) * (w_{j+1} - w_j) to the I_n/sqrt(dt) sum (exactness for
    // constants ties the two node corrections together).
    double cusp_correction(std::size_t j, std::size_t n) const {
        return xi_node_weight(j, n) - beta[n - j];
    }
};

// Full uniform-grid state of one integration: the entire w history is what
// makes exact continuation possible, so it is retained verbatim.
template <std::size_t N>
struct TrajectoryRecord {
    std::vector<double> tau;   // tau[i] = i * dt
    std::vector<Vec<N>> y;
    std::vector<Vec<N>> w;
    std::vector<Vec<N>> v;     // recovered particle velocity w + A_u
    ParticleParams<N> params;
    SolverConfig config;
    double t0 = 0.0;           // physical origin of this record's tau = 0
    bool domain_exit = false;
    std::size_t first_exit_node = 0;
    std::vector<std::string> warnings;

    std::size_t nodes() const { return tau.size(); }
    double dt() const { return config.dt; }
    double t_phys(std::size_t i) const { return t0 + params.eps * tau[i]; }
    double abs_w(std::size_t i) const { return norm(w[i]); }
};

namespace detail {

template <std::size_t N>
struct StepTerms {
    Vec<N> A = zero_vec<N>();
    Vec<N> f = zero_vec<N>();  // -M w + B at the node
};

// Shared integration core. `seed` holds nodes 0..k already accepted (k >= 0);
// integration continues on the same grid to n_total-1. A fresh start
// (single seed node, refined_start set) integrates the cusp zone on a
// 32x finer subgrid first: the early steps are the only ones whose newest
// interval carries the sqrt singularity with an unknown endpoint, and
// resolving them finely is what keeps the committed start-up error below
// the interior O(dt^2) terms.
template <std::size_t N>
TrajectoryRecord<N> integrate(const DerivedFields<N>& fields, const ParticleParams<N>& params,
                              const SolverConfig& cfg, std::vector<Vec<N>> y_seed,
                              std::vector<Vec<N>> w_seed, double t0, std::size_t n_total,
                              bool refined_start) {
    const double dt = cfg.dt;
    const double eps = params.eps;
    const double kappa = params.kappa;
    std::size_t n_seed = w_seed.size();

    if (refined_start && n_seed == 1 && params.kappa > 0.0 && n_total > 2) {
        constexpr std::size_t refine = 32;
        const std::size_t k_coarse =
            std::min<std::size_t>(SingularKernelWeights::cusp_zone(dt), n_total - 1);
        SolverConfig sub = cfg;
        sub.dt = dt / static_cast<double>(refine);
        sub.tau_end = k_coarse * dt;
        const auto fine = integrate(fields, params, sub, {y_seed[0]}, {w_seed[0]}, t0,
                                    k_coarse * refine + 1, false);
        y_seed.resize(k_coarse + 1);
        w_seed.resize(k_coarse + 1);
        for (std::size_t j = 1; j <= k_coarse; ++j) {
            y_seed[j] = fine.y[j * refine];
            w_seed[j] = fine.w[j * refine];
        }
        n_seed = k_coarse + 1;
    }

    TrajectoryRecord<N> rec;
    rec.params = params;
    rec.config = cfg;
    rec.t0 = t0;
    rec.tau.resize(n_total);
    for (std::size_t i = 0; i < n_total; ++i) rec.tau[i] = i * dt;
    rec.y = std::move(y_seed);
    rec.w = std::move(w_seed);
    rec.y.resize(n_total);
    rec.w.resize(n_total);
    rec.v.resize(n_total);

    const bool direct = cfg.backend == SolverBackend::fractional_direct;

    SingularKernelWeights sw;
    KernelTable table;
    std::vector<double> P;  // interval weights phi_{m-1} - phi_m
    if (direct) {
        if (kappa > 0.0) sw = SingularKernelWeights::build(dt, n_total);
    } else {
        const auto kernel = RelaxationKernel::make(kappa);
        table = psi_grid(kernel, n_total, dt);
        P.assign(n_total, 0.0);
        for (std::size_t m = 1; m < n_total; ++m) P[m] = table.phi[m - 1] - table.phi[m];
    }

    // Forcing history (mild backend sums f over all past nodes) and cached
    // carrier velocity per node.
    std::vector<StepTerms<N>> terms(n_total);
    const auto t_at = [&](std::size_t i) { return t0 + eps * (i * dt); };
    for (std::size_t i = 0; i < n_seed; ++i) {
        const auto e = fields.eval(rec.y[i], t_at(i));
        terms[i].A = e.A;
        terms[i].f = matvec(-1.0 * e.M, rec.w[i]) + e.B;
        rec.v[i] = rec.w[i] + e.A;
    }

    const Box<N> box = fields.field().domain();
    auto track_exit = [&](std::size_t i) {
        if (!rec.domain_exit && !box.contains(rec.y[i])) {
            rec.domain_exit = true;
            rec.first_exit_node = i;
        }
    };
    for (std::size_t i = 0; i < n_seed; ++i) track_exit(i);

    const double kb = direct ? kappa * std::sqrt(dt) / detail::kSqrtPi : 0.0;
    const double w0_scale = norm(rec.w[0]);

    for (std::size_t n1 = n_seed; n1 < n_total; ++n1) {
        const std::size_t n = n1 - 1;
        const double t1 = t_at(n1);
        Vec<N> rhs_base;
        double solve_shift = 0.0;
        double implicit_coef = 0.0;  // multiplies M(y1) w1 on the lhs

        if (direct) {
            // History sums for I_n and I_{n+1} (without the unknown node).
            Vec<N> sn = zero_vec<N>();
            Vec<N> sn1 = zero_vec<N>();
            double unknown_w = 4.0 / 3.0;  // beta_1, unless in the cusp zone
            if (kappa > 0.0) {
                const double* V = sw.V.data();
                const Vec<N>* w = rec.w.data();
                for (std::size_t k = 1; k < n; ++k) {
                    const double vn = V[n - k];
                    const double vn1 = V[n1 - k];
                    for (std::size_t c = 0; c < N; ++c) {
                        sn[c] += vn * w[k][c];
                        sn1[c] += vn1 * w[k][c];
                    }
                }
                if (n >= 1) {
                    for (std::size_t c = 0; c < N; ++c) {
                        sn[c] += sw.alpha[n] * w[0][c] + sw.beta[1] * w[n][c];
                        sn1[c] += sw.alpha[n1] * w[0][c] + V[1] * w[n][c];
                    }
                } else {
                    for (std::size_t c = 0; c < N; ++c) sn1[c] += sw.alpha[1] * w[0][c];
                }
                // sqrt-basis corrections on the cusp intervals.
                const std::size_t K = sw.cusp_intervals;
                for (std::size_t j = 0; j < std::min(K, n); ++j) {
                    const double cn = sw.cusp_correction(j, n);
                    const double cn1 = sw.cusp_correction(j, n1);
                    for (std::size_t c = 0; c < N; ++c) {
                        const double jump = w[j + 1][c] - w[j][c];
                        sn[c] += cn * jump;
                        sn1[c] += cn1 * jump;
                    }
                }
                if (n < K) {
                    // Newest interval of I_{n+1} is in the cusp zone: the
                    // unknown node's correction moves to the implicit side.
                    const double ec_new = sw.cusp_correction(n, n1);
                    for (std::size_t c = 0; c < N; ++c) sn1[c] -= ec_new * w[n][c];
                    unknown_w = 4.0 / 3.0 + ec_new;
                }
            }
            for (std::size_t c = 0; c < N; ++c)
                rhs_base[c] = (1.0 - 0.5 * dt) * rec.w[n][c] - kb * (sn1[c] - sn[c]) +
                              eps * 0.5 * dt * terms[n].f[c];
            solve_shift = 1.0 + 0.5 * dt + kb * unknown_w;
            implicit_coef = eps * 0.5 * dt;
        } else {
            // Known part of the mild update at node n1: interior nodes carry
            // (P_{n1-k} + P_{n1-k+1})/2, node 0 carries P_{n1}/2, and the
            // unknown node P_1/2 goes to the implicit side.
            Vec<N> acc = zero_vec<N>();
            for (std::size_t k = 1; k < n1; ++k) {
                const double q = 0.5 * (P[n1 - k] + P[n1 - k + 1]);
                for (std::size_t c = 0; c < N; ++c) acc[c] += q * terms[k].f[c];
            }
            for (std::size_t c = 0; c < N; ++c) acc[c] += 0.5 * P[n1] * terms[0].f[c];
            for (std::size_t c = 0; c < N; ++c)
                rhs_base[c] = table.psi[n1] * rec.w[0][c] + eps * acc[c];
            solve_shift = 1.0;
            implicit_coef = eps * 0.5 * P[1];
        }

        // Fixed-point closure of the new node: position and velocity jointly.
        Vec<N> y1 = rec.y[n];
        for (std::size_t c = 0; c < N; ++c)
            y1[c] += eps * dt * (rec.w[n][c] + terms[n].A[c]);
        Vec<N> w1 = rec.w[n];
        bool converged = false;
        for (int it = 0; it < cfg.picard_max_iters; ++it) {
            const auto e1 = fields.eval(y1, t1);
            Vec<N> rhs = rhs_base;
            for (std::size_t c = 0; c < N; ++c) rhs[c] += implicit_coef * e1.B[c];
            const Vec<N> w_next = solve_shifted(solve_shift, implicit_coef * e1.M, rhs);
            Vec<N> y_next = rec.y[n];
            for (std::size_t c = 0; c < N; ++c)
                y_next[c] += eps * 0.5 * dt *
                             (rec.w[n][c] + terms[n].A[c] + w_next[c] + e1.A[c]);
            double delta = 0.0;
            for (std::size_t c = 0; c < N; ++c)
                delta = std::max({delta, std::abs(y_next[c] - y1[c]),
                                  std::abs(w_next[c] - w1[c])});
            y1 = y_next;
            w1 = w_next;
            if (delta <= cfg.picard_tol * std::max(1.0, w0_scale)) {
                converged = true;
                break;
            }
        }
        if (!converged)
            throw StepFailureError("solver: fixed-point iteration did not converge", n1);
        for (std::size_t c = 0; c < N; ++c)
            if (!std::isfinite(y1[c]) || !std::isfinite(w1[c]))
                throw BlowUpError("solver: non-finite state", n1);

        rec.y[n1] = y1;
        rec.w[n1] = w1;
        const auto ef = fields.eval(y1, t1);
        terms[n1].A = ef.A;
        terms[n1].f = matvec(-1.0 * ef.M, w1) + ef.B;
        rec.v[n1] = w1 + ef.A;
        track_exit(n1);
    }
    return rec;
}

}  // namespace detail

template <std::size_t N>
TrajectoryRecord<N> simulate(const DerivedFields<N>& fields, const ParticleParams<N>& params,
                             const Vec<N>& y0, const Vec<N>& w0, const SolverConfig& cfg,
                             const FieldBounds* bounds = nullptr) {
    cfg.validate();
    if (cfg.faxen != fields.faxen())
        throw ValidationError("solver: config faxen flag disagrees with the derived fields");
    const std::size_t n_total =
        static_cast<std::size_t>(std::ceil(cfg.tau_end / cfg.dt - 1e-9)) + 1;
    auto rec = detail::integrate(fields, params, cfg, {y0}, {w0}, cfg.t0, n_total, true);
    if (bounds && params.eps * bounds->L_M >= 1.0)
        rec.warnings.push_back("eps*L_M = " + std::to_string(params.eps * bounds->L_M) +
                               " >= 1: boundedness and envelope guarantees do not apply");
    return rec;
}

// Restart from an interior state with the history wiped: the new run treats
// (y(tau1), w(tau1)) as fresh initial data, so the memory kernel restarts
// from zero and the result generally leaves the original trajectory. The
// returned record has its own scaled clock starting at 0 with physical
// origin shifted to t0 + eps*tau1; config.tau_end is the duration.
template <std::size_t N>
TrajectoryRecord<N> restart_discard_history(const DerivedFields<N>& fields,
                                            const TrajectoryRecord<N>& rec, double tau1,
                                            const SolverConfig& cfg) {
    cfg.validate();
    if (rec.nodes() < 2) throw DomainError("restart: record too short");
    const double tend = rec.tau.back();
    if (!(tau1 > 0.0) || !(tau1 < tend))
        throw DomainError("restart: tau1 must lie strictly inside the record's grid");
    const double ratio = tau1 / rec.dt();
    const std::size_t i1 = static_cast<std::size_t>(std::llround(ratio));
    if (i1 == 0 || i1 >= rec.nodes() - 1 || std::abs(ratio - static_cast<double>(i1)) > 1e-6)
        throw DomainError("restart: tau1 must coincide with an interior grid node");
    SolverConfig c2 = cfg;
    c2.t0 = rec.t0 + rec.params.eps * rec.tau[i1];
    const std::size_t n_total =
        static_cast<std::size_t>(std::ceil(c2.tau_end / c2.dt - 1e-9)) + 1;
    return detail::integrate(fields, rec.params, c2, {rec.y[i1]}, {rec.w[i1]}, c2.t0, n_total, true);
}

// Continuation that keeps the history buffer: nodes up to tau1 are retained
// verbatim and integration proceeds on the same grid and clock. With
// identical grids this reproduces the uninterrupted run exactly.
// config.tau_end is absolute on the record's own clock.
template <std::size_t N>
TrajectoryRecord<N> restart_replay_history(const DerivedFields<N>& fields,
                                           const TrajectoryRecord<N>& rec, double tau1,
                                           const SolverConfig& cfg) {
    cfg.validate();
    if (cfg.dt != rec.config.dt || cfg.backend != rec.config.backend)
        throw ValidationError("replay restart: dt and backend must match the record");
    // tau1 == end is allowed: that is a pure extension of the record.
    if (!(tau1 >= 0.0) || !(tau1 <= rec.tau.back()))
        throw DomainError("restart: tau1 must lie inside the record's grid");
    const double ratio = tau1 / rec.dt();
    const std::size_t i1 = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(i1)) > 1e-6)
        throw DomainError("restart: tau1 must coincide with a grid node");
    std::vector<Vec<N>> ys(rec.y.begin(), rec.y.begin() + i1 + 1);
    std::vector<Vec<N>> ws(rec.w.begin(), rec.w.begin() + i1 + 1);
    const std::size_t n_total =
        static_cast<std::size_t>(std::ceil(cfg.tau_end / cfg.dt - 1e-9)) + 1;
    if (n_total <= i1 + 1) throw DomainError("replay restart: tau_end must exceed tau1");
    return detail::integrate(fields, rec.params, cfg, std::move(ys), std::move(ws), rec.t0,
                             n_total, true);
}

// v = w + A_u(y, t); the Faxen shift is inside A_u when enabled.
template <std::size_t N>
std::vector<Vec<N>> recover_particle_velocity(const DerivedFields<N>& fields,
                                              const TrajectoryRecord<N>& rec) {
    std::vector<Vec<N>> v(rec.nodes());
    for (std::size_t i = 0; i < rec.nodes(); ++i)
        v[i] = rec.w[i] + fields.carrier_velocity(rec.y[i], rec.t_phys(i));
    return v;
}

// Sup-norm gap between two records over a common node range of their own
// grids (i and j advance together).
template <std::size_t N>
double sup_gap(const TrajectoryRecord<N>& a, std::size_t a_start, const TrajectoryRecord<N>& b,
               std::size_t b_start, std::size_t count) {
    double g = 0.0;
    for (std::size_t k = 0; k < count; ++k) {
        const Vec<N> d = a.w[a_start + k] - b.w[b_start + k];
        g = std::max(g, norm(d));
    }
    return g;
}

struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> errors;         // sup-norm error per dt
    std::vector<double> pairwise_order;  // log2(e_i / e_{i+1}) for halvings
    double fitted_order = 0.0;           // least-squares slope of log e vs log dt
    bool inconclusive = false;           // non-monotone error sequence
};

// Empirical order against an exact solution w_ref(tau) (pass the kernel
// solution for frozen fields) or, when absent, a reference run at half the
// finest step.
template <std::size_t N>
ConvergenceReport convergence_study(const DerivedFields<N>& fields,
                                    const ParticleParams<N>& params, const Vec<N>& y0,
                                    const Vec<N>& w0, std::vector<double> dt_list,
                                    double tau_end, SolverBackend backend,
                                    std::function<Vec<N>(double)> w_ref = nullptr) {
    if (dt_list.size() < 3)
        throw ValidationError("convergence_study: need at least 3 step sizes");
    for (std::size_t i = 0; i + 1 < dt_list.size(); ++i)
        if (!(dt_list[i] > dt_list[i + 1]))
            throw ValidationError("convergence_study: dt list must decrease");

    ConvergenceReport rep;
    rep.dts = dt_list;

    TrajectoryRecord<N> fine;
    std::size_t stride_base = 0;
    if (!w_ref) {
        SolverConfig cf;
        cf.backend = backend;
        cf.dt = dt_list.back() / 2.0;
        cf.tau_end = tau_end;
        fine = simulate(fields, params, y0, w0, cf);
    }

    // Relative sup error with an absolute floor so zero crossings of the
    // reference cannot dominate the metric.
    const double floor_abs = 1e-9 * std::max(1.0, norm(w0));
    for (double dt : dt_list) {
        SolverConfig c;
        c.backend = backend;
        c.dt = dt;
        c.tau_end = tau_end;
        auto rec = simulate(fields, params, y0, w0, c);
        double err = 0.0;
        if (w_ref) {
            for (std::size_t i = 0; i < rec.nodes(); ++i) {
                const Vec<N> ref = w_ref(rec.tau[i]);
                err = std::max(err, norm(rec.w[i] - ref) / std::max(norm(ref), floor_abs));
            }
        } else {
            const double ratio = dt / fine.dt();
            stride_base = static_cast<std::size_t>(std::llround(ratio));
            for (std::size_t i = 0; i < rec.nodes(); ++i) {
                const std::size_t j = i * stride_base;
                if (j >= fine.nodes()) break;
                err = std::max(err, norm(rec.w[i] - fine.w[j]) /
                                        std::max(norm(fine.w[j]), floor_abs));
            }
        }
        rep.errors.push_back(err);
    }

    for (std::size_t i = 0; i + 1 < rep.errors.size(); ++i) {
        const double num = rep.errors[i];
        const double den = rep.errors[i + 1];
        if (!(num > den)) rep.inconclusive = true;
        const double h_ratio = dt_list[i] / dt_list[i + 1];
        rep.pairwise_order.push_back(std::log(num / den) / std::log(h_ratio));
    }
    // Least-squares slope of log(err) against log(dt).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rep.errors.size());
    for (std::size_t i = 0; i < rep.errors.size(); ++i) {
        const double lx = std::log(dt_list[i]);
        const double ly = std::log(std::max(rep.errors[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    rep.fitted_order = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    return rep;
}

}  // namespace basset
