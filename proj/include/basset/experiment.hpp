#pragma once

// Configuration-driven experiment runners: the decay ensembles (fig3), the
// envelope family sweep (fig4), and the restart demonstration. Trajectories
// of an ensemble run in a work pool; all files are written by the calling
// thread after the pool drains, so a manifest never references a file that
// does not exist.

#include <chrono>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "basset/checkpoint.hpp"
#include "basset/config.hpp"
#include "basset/csv.hpp"
#include "basset/envelope.hpp"
#include "basset/flow.hpp"
#include "basset/solver.hpp"

namespace basset {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Spread below this fraction of |w0| counts as position-independent decay.
inline constexpr double kPositionIndependentFraction = 0.01;

inline std::unique_ptr<FlowField<2>> make_flow(const ExperimentConfig& c) {
    if (c.flow_type == "double_gyre")
        return std::make_unique<DoubleGyre>(c.amplitude, c.omega, c.alpha);
    if (c.flow_type == "frozen") return std::make_unique<FrozenField<2>>();
    throw ValidationError("config: unknown flow type '" + c.flow_type + "'");
}

inline ParticleParams<2> make_params(const ExperimentConfig& c, double R) {
    double st = 0.0;
    if (c.st_rule == "r_over_100") st = R / 100.0;
    else if (c.st_rule == "fixed") st = c.st_fixed;
    else throw ValidationError("config: unknown st_rule '" + c.st_rule + "'");
    return from_dimensionless<2>(R, st, c.reynolds, c.gravity);
}

// Deterministic release lattice, row-major in (iy, ix), endpoints included.
inline std::vector<Vec<2>> release_points(const ExperimentConfig& c) {
    std::vector<Vec<2>> pts;
    const std::size_t nx = std::max<std::size_t>(1, c.counts[0]);
    const std::size_t ny = std::max<std::size_t>(1, c.counts[1]);
    pts.reserve(nx * ny);
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double fy = ny > 1 ? static_cast<double>(iy) / (ny - 1) : 0.0;
        const double y = c.release_lo[1] + fy * (c.release_hi[1] - c.release_lo[1]);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double fx = nx > 1 ? static_cast<double>(ix) / (nx - 1) : 0.0;
            const double x = c.release_lo[0] + fx * (c.release_hi[0] - c.release_lo[0]);
            pts.push_back({x, y});
        }
    }
    return pts;
}

// Least-squares slope of log(value) against log(tau) over a tau window.
inline double fitted_loglog_slope(const std::vector<double>& tau,
                                  const std::vector<double>& value, double lo, double hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < tau.size(); ++i) {
        if (tau[i] < lo || tau[i] > hi || value[i] <= 0.0) continue;
        const double lx = std::log(tau[i]);
        const double ly = std::log(value[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    if (n < 2) return 0.0;
    const double nn = static_cast<double>(n);
    return (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
}

struct TrajectorySummary {
    std::size_t index = 0;
    Vec<2> y0{0.0, 0.0};
    double final_abs_w = 0.0;
    int envelope_violations = 0;
    double max_envelope_excess = 0.0;  // max |w| - certified envelope; <= 0 is clean
    double fitted_slope = 0.0;
    bool domain_exit = false;
    std::string path;
    std::string failure;  // empty on success
};

struct EnsembleSummary {
    double R = 0.0;
    double kappa = 0.0;
    double eps = 0.0;
    FieldBounds bounds;
    double asymptotic = 0.0;
    double sup = 0.0;
    int envelope_J = 0;
    double spread = 0.0;  // max over nodes of (max_i - min_i)|w_i|
    bool position_independent = false;
    double envelope_slope = 0.0;
    std::string envelope_path;
    std::vector<TrajectorySummary> trajectories;
};

struct RunManifest {
    std::string kind;
    std::string config_hash;
    std::string version = kArtifactVersion;
    std::string config_text;
    unsigned threads = 0;
    double wall_ms = 0.0;
    std::vector<EnsembleSummary> ensembles;
    std::vector<std::string> warnings;
    nlohmann::json extra;

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["kind"] = kind;
        j["config_hash"] = config_hash;
        j["version"] = version;
        j["threads"] = threads;
        j["wall_ms"] = wall_ms;
        j["warnings"] = warnings;
        j["config"] = config_text;
        if (!extra.is_null()) j["extra"] = extra;
        auto& es = j["ensembles"] = nlohmann::json::array();
        for (const auto& e : ensembles) {
            nlohmann::json je;
            je["R"] = e.R;
            je["kappa"] = e.kappa;
            je["eps"] = e.eps;
            je["bounds"] = {{"L_A", e.bounds.L_A},
                            {"L_B", e.bounds.L_B},
                            {"L_M", e.bounds.L_M},
                            {"L_c", e.bounds.L_c ? *e.bounds.L_c : 0.0},
                            {"delta_L_M", e.bounds.delta_L_M}};
            je["asymptotic_bound"] = e.asymptotic;
            je["sup_bound"] = e.sup;
            je["envelope_J"] = e.envelope_J;
            je["spread"] = e.spread;
            je["position_independent"] = e.position_independent;
            je["envelope_slope"] = e.envelope_slope;
            je["envelope_path"] = e.envelope_path;
            auto& ts = je["trajectories"] = nlohmann::json::array();
            for (const auto& t : e.trajectories) {
                ts.push_back({{"index", t.index},
                              {"y0", {t.y0[0], t.y0[1]}},
                              {"final_abs_w", t.final_abs_w},
                              {"envelope_violations", t.envelope_violations},
                              {"max_envelope_excess", t.max_envelope_excess},
                              {"fitted_slope", t.fitted_slope},
                              {"domain_exit", t.domain_exit},
                              {"path", t.path},
                              {"failure", t.failure}});
            }
            es.push_back(std::move(je));
        }
        return j;
    }
};

namespace detail {

inline std::size_t csv_stride_for(std::size_t nodes, std::size_t configured) {
    if (configured > 0) return configured;
    return std::max<std::size_t>(1, nodes / 4000);
}

inline void write_trajectory_csv(const std::string& path, const TrajectoryRecord<2>& rec,
                                 const EnvelopeCurve* env, bool omit_eps2, double asym,
                                 std::size_t stride) {
    CsvWriter csv(path, {"tau", "t_phys", "y1", "y2", "w1", "w2", "abs_w", "v1", "v2",
                         "envelope", "asymptotic_bound"});
    auto emit = [&](std::size_t i) {
        double e = 0.0;
        if (env) {
            e = env->value[i];
            if (omit_eps2) e -= env->const_part;
        }
        const double rowv[11] = {rec.tau[i],   rec.t_phys(i), rec.y[i][0], rec.y[i][1],
                                 rec.w[i][0],  rec.w[i][1],   rec.abs_w(i), rec.v[i][0],
                                 rec.v[i][1],  e,             asym};
        csv.row(rowv);
    };
    for (std::size_t i = 0; i < rec.nodes(); i += stride) emit(i);
    if ((rec.nodes() - 1) % stride != 0) emit(rec.nodes() - 1);
}

inline void write_envelope_csv(const std::string& path, const EnvelopeCurve& env,
                               bool omit_eps2, std::size_t stride) {
    CsvWriter csv(path, {"tau", "envelope", "series_part", "phi_part", "const_part",
                         "truncation_bound"});
    const double cpart = omit_eps2 ? 0.0 : env.const_part;
    auto emit = [&](std::size_t i) {
        const double rowv[6] = {env.tau[i],      env.series_part[i] + env.phi_part[i] + cpart,
                                env.series_part[i], env.phi_part[i], cpart,
                                env.w0_norm * env.truncation_bound};
        csv.row(rowv);
    };
    for (std::size_t i = 0; i < env.size(); i += stride) emit(i);
    if ((env.size() - 1) % stride != 0) emit(env.size() - 1);
}

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double ms() const {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

}  // namespace detail

inline void save_manifest(const RunManifest& m, const std::string& dir) {
    std::ofstream out(dir + "/manifest.json");
    if (!out) throw ValidationError("manifest: cannot open " + dir + "/manifest.json");
    out << m.to_json().dump(2) << "\n";
}

// The decay ensemble: per R, estimate bounds, build the envelope on the
// solver grid, release the lattice with a shared w0, and verify envelope
// domination pointwise. Failed trajectories are recorded and the run
// continues.
inline RunManifest run_fig3(const ExperimentConfig& cfg) {
    detail::Timer timer;
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const unsigned threads = resolve_thread_count(cfg.threads);

    RunManifest man;
    man.kind = "fig3";
    man.config_hash = config_hash(cfg);
    man.config_text = serialize_config(cfg);
    man.threads = threads;

    const auto flow = make_flow(cfg);
    const auto releases = release_points(cfg);
    const double w0n = norm(cfg.w0);

    for (double R : cfg.r_list) {
        const auto params = make_params(cfg, R);
        DerivedFields<2> fields(*flow, params, cfg.faxen);
        const FieldBounds bounds = estimate_bounds(fields, cfg.bounds_grid(), threads);
        for (const auto& wmsg : bounds.warnings) man.warnings.push_back(wmsg);

        EnsembleSummary ens;
        ens.R = R;
        ens.kappa = params.kappa;
        ens.eps = params.eps;
        ens.bounds = bounds;

        const SolverConfig scfg = cfg.solver_config();
        const std::size_t n_nodes =
            static_cast<std::size_t>(std::ceil(scfg.tau_end / scfg.dt - 1e-9)) + 1;
        const bool theorem_ok = params.eps * bounds.L_M < 1.0;
        std::optional<EnvelopeCurve> env;
        if (theorem_ok) {
            env = envelope_curve(params, bounds, w0n, n_nodes, scfg.dt, cfg.envelope_tol,
                                 /*omit_eps2=*/false, threads);
            ens.asymptotic = asymptotic_bound(params, bounds);
            ens.sup = sup_bound(params, bounds, w0n);
            ens.envelope_J = env->J;
            ens.envelope_slope = fitted_loglog_slope(env->tau, env->value,
                                                     cfg.slope_window[0], cfg.slope_window[1]);
        } else {
            man.warnings.push_back("R = " + format_double(R) +
                                   ": eps*L_M >= 1, envelope and bounds not applicable");
        }

        std::vector<TrajectoryRecord<2>> records(releases.size());
        std::vector<std::string> failures(releases.size());
        parallel_for(releases.size(), threads, [&](std::size_t lo, std::size_t hi) {
            for (std::size_t i = lo; i < hi; ++i) {
                try {
                    records[i] =
                        simulate(fields, params, releases[i], cfg.w0, scfg, &bounds);
                } catch (const std::exception& ex) {
                    failures[i] = ex.what();
                }
            }
        });

        char rbuf[32];
        std::snprintf(rbuf, sizeof(rbuf), "%.6f", R);
        std::string rname(rbuf);
        for (auto& ch : rname)
            if (ch == '.') ch = 'p';

        const std::size_t stride =
            detail::csv_stride_for(n_nodes, cfg.csv_stride);
        if (env) {
            ens.envelope_path = cfg.out_dir + "/envelope_R" + rname + ".csv";
            detail::write_envelope_csv(ens.envelope_path, *env, cfg.omit_eps2, stride);
        }

        std::vector<double> spread_hi, spread_lo;
        for (std::size_t i = 0; i < releases.size(); ++i) {
            TrajectorySummary ts;
            ts.index = i;
            ts.y0 = releases[i];
            ts.failure = failures[i];
            if (ts.failure.empty()) {
                const auto& rec = records[i];
                ts.final_abs_w = rec.abs_w(rec.nodes() - 1);
                ts.domain_exit = rec.domain_exit;
                std::vector<double> absw(rec.nodes());
                for (std::size_t k = 0; k < rec.nodes(); ++k) absw[k] = rec.abs_w(k);
                ts.fitted_slope = fitted_loglog_slope(rec.tau, absw, cfg.slope_window[0],
                                                      cfg.slope_window[1]);
                if (env) {
                    double excess = -1e300;
                    int viol = 0;
                    for (std::size_t k = 0; k < rec.nodes(); ++k) {
                        const double lim = env->certified(k) * (1.0 + 1e-9);
                        const double ex = absw[k] - lim;
                        excess = std::max(excess, ex);
                        if (ex > 0.0) ++viol;
                    }
                    ts.envelope_violations = viol;
                    ts.max_envelope_excess = excess;
                }
                if (spread_hi.empty()) {
                    spread_hi = absw;
                    spread_lo = absw;
                } else {
                    for (std::size_t k = 0; k < absw.size(); ++k) {
                        spread_hi[k] = std::max(spread_hi[k], absw[k]);
                        spread_lo[k] = std::min(spread_lo[k], absw[k]);
                    }
                }
                ts.path = cfg.out_dir + "/trajectory_R" + rname + "_" + std::to_string(i) +
                          ".csv";
                detail::write_trajectory_csv(ts.path, rec, env ? &*env : nullptr,
                                             cfg.omit_eps2, ens.asymptotic, stride);
            }
            ens.trajectories.push_back(std::move(ts));
        }
        for (std::size_t k = 0; k < spread_hi.size(); ++k)
            ens.spread = std::max(ens.spread, spread_hi[k] - spread_lo[k]);
        std::size_t successes = 0;
        for (const auto& t : ens.trajectories)
            if (t.failure.empty()) ++successes;
        ens.position_independent =
            successes >= 2 && ens.spread <= kPositionIndependentFraction * w0n;
        man.ensembles.push_back(std::move(ens));
    }
    // Summary table: one row per trajectory across all ensembles.
    {
        CsvWriter csv(cfg.out_dir + "/summary.csv",
                      {"R", "index", "y0_1", "y0_2", "final_abs_w", "envelope_violations",
                       "max_envelope_excess", "fitted_slope", "domain_exit"});
        for (const auto& ens : man.ensembles)
            for (const auto& t : ens.trajectories) {
                if (!t.failure.empty()) continue;
                const double rowv[9] = {ens.R,
                                        static_cast<double>(t.index),
                                        t.y0[0],
                                        t.y0[1],
                                        t.final_abs_w,
                                        static_cast<double>(t.envelope_violations),
                                        t.max_envelope_excess,
                                        t.fitted_slope,
                                        t.domain_exit ? 1.0 : 0.0};
                csv.row(rowv);
            }
    }
    man.wall_ms = timer.ms();
    save_manifest(man, cfg.out_dir);
    return man;
}

// Envelope family sweep: analytic curves only, one per R, with fitted
// transient slopes over the configured log window and the analytic plateau.
inline RunManifest run_fig4(const ExperimentConfig& cfg) {
    detail::Timer timer;
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const unsigned threads = resolve_thread_count(cfg.threads);

    RunManifest man;
    man.kind = "fig4";
    man.config_hash = config_hash(cfg);
    man.config_text = serialize_config(cfg);
    man.threads = threads;

    const auto flow = make_flow(cfg);
    const double w0n = norm(cfg.w0);
    const SolverConfig scfg = cfg.solver_config();
    const std::size_t n_nodes =
        static_cast<std::size_t>(std::ceil(scfg.tau_end / scfg.dt - 1e-9)) + 1;

    nlohmann::json curves = nlohmann::json::array();
    for (double R : cfg.r_list) {
        const auto params = make_params(cfg, R);
        DerivedFields<2> fields(*flow, params, cfg.faxen);
        const FieldBounds bounds = estimate_bounds(fields, cfg.bounds_grid(), threads);

        EnsembleSummary ens;
        ens.R = R;
        ens.kappa = params.kappa;
        ens.eps = params.eps;
        ens.bounds = bounds;
        if (params.eps * bounds.L_M >= 1.0) {
            man.warnings.push_back("R = " + format_double(R) + ": eps*L_M >= 1, skipped");
            man.ensembles.push_back(std::move(ens));
            continue;
        }
        const auto env = envelope_curve(params, bounds, w0n, n_nodes, scfg.dt,
                                        cfg.envelope_tol, /*omit_eps2=*/false, threads);
        ens.asymptotic = asymptotic_bound(params, bounds);
        ens.sup = sup_bound(params, bounds, w0n);
        ens.envelope_J = env.J;
        // Slope of the plotted (eps^2 omitted when configured) curve.
        std::vector<double> plotted(env.size());
        const double cpart = cfg.omit_eps2 ? env.const_part : 0.0;
        for (std::size_t i = 0; i < env.size(); ++i) plotted[i] = env.value[i] - cpart;
        ens.envelope_slope =
            fitted_loglog_slope(env.tau, plotted, cfg.slope_window[0], cfg.slope_window[1]);

        char rbuf[32];
        std::snprintf(rbuf, sizeof(rbuf), "%.6f", R);
        std::string rname(rbuf);
        for (auto& ch : rname)
            if (ch == '.') ch = 'p';
        ens.envelope_path = cfg.out_dir + "/envelope_R" + rname + ".csv";
        detail::write_envelope_csv(ens.envelope_path, env,
                                   cfg.omit_eps2, detail::csv_stride_for(n_nodes, cfg.csv_stride));

        // The full envelope converges to exactly the asymptotic bound; the
        // plotted curve (eps^2 terms dropped) levels off eps*L_B below it.
        curves.push_back({{"R", R},
                          {"slope", ens.envelope_slope},
                          {"analytic_plateau", ens.asymptotic},
                          {"plotted_plateau", params.eps * bounds.L_B},
                          {"envelope_at_end", env.value.back()},
                          {"start_value", env.value.front() - env.const_part}});
        man.ensembles.push_back(std::move(ens));
    }
    man.extra["curves"] = std::move(curves);
    man.wall_ms = timer.ms();
    save_manifest(man, cfg.out_dir);
    return man;
}

struct RestartDemoResult {
    RunManifest manifest;
    double discard_gap = 0.0;
    double replay_gap = 0.0;
    double solver_tolerance = 0.0;  // Richardson estimate from a dt/2 rerun
};

// Original run plus a history-discarding restart and a history-replaying
// restart at tau1, with gap metrics against the uninterrupted trajectory.
inline RestartDemoResult run_restart_demo(const ExperimentConfig& cfg) {
    detail::Timer timer;
    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const unsigned threads = resolve_thread_count(cfg.threads);

    RestartDemoResult out;
    RunManifest& man = out.manifest;
    man.kind = "restart_demo";
    man.config_hash = config_hash(cfg);
    man.config_text = serialize_config(cfg);
    man.threads = threads;

    const auto flow = make_flow(cfg);
    const double R = cfg.r_list.empty() ? 1.0 : cfg.r_list.front();
    const auto params = make_params(cfg, R);
    DerivedFields<2> fields(*flow, params, cfg.faxen);

    SolverConfig scfg = cfg.solver_config();
    scfg.tau_end = cfg.restart_horizon;
    const double tau1 = cfg.restart_tau1;
    const Vec<2> y0{0.5 * (cfg.release_lo[0] + cfg.release_hi[0]),
                    0.5 * (cfg.release_lo[1] + cfg.release_hi[1])};

    const auto original = simulate(fields, params, y0, cfg.w0, scfg);
    const std::size_t i1 = static_cast<std::size_t>(std::llround(tau1 / scfg.dt));

    SolverConfig dcfg = scfg;
    dcfg.tau_end = cfg.restart_horizon - tau1;
    const auto discarded = restart_discard_history(fields, original, tau1, dcfg);
    const auto replayed = restart_replay_history(fields, original, tau1, scfg);

    SolverConfig half = scfg;
    half.dt = 0.5 * scfg.dt;
    const auto fine = simulate(fields, params, y0, cfg.w0, half);
    double tol = 0.0;
    for (std::size_t i = 0; i < original.nodes(); ++i)
        tol = std::max(tol, norm(original.w[i] - fine.w[2 * i]));
    out.solver_tolerance = tol;

    const std::size_t overlap = std::min(discarded.nodes(), original.nodes() - i1);
    out.discard_gap = sup_gap(original, i1, discarded, 0, overlap);
    out.replay_gap =
        sup_gap(original, 0, replayed, 0, std::min(original.nodes(), replayed.nodes()));

    const std::size_t stride = detail::csv_stride_for(original.nodes(), cfg.csv_stride);
    detail::write_trajectory_csv(cfg.out_dir + "/restart_original.csv", original, nullptr,
                                 cfg.omit_eps2, 0.0, stride);
    detail::write_trajectory_csv(cfg.out_dir + "/restart_discard.csv", discarded, nullptr,
                                 cfg.omit_eps2, 0.0, stride);
    detail::write_trajectory_csv(cfg.out_dir + "/restart_replay.csv", replayed, nullptr,
                                 cfg.omit_eps2, 0.0, stride);

    man.extra = {{"tau1", tau1},
                 {"discard_gap", out.discard_gap},
                 {"replay_gap", out.replay_gap},
                 {"solver_tolerance", out.solver_tolerance},
                 {"kappa", params.kappa}};
    man.wall_ms = timer.ms();
    save_manifest(man, cfg.out_dir);
    return out;
}

inline ExperimentConfig default_fig3_config() {
    ExperimentConfig c;
    c.dt = 0.01;  // keeps the 45-trajectory ensemble at desk scale
    c.tau_end = 1e3;
    return c;
}

inline ExperimentConfig default_fig4_config() {
    ExperimentConfig c;
    c.r_list = {0.1, 1.0 / 3.0, 2.0 / 3.0, 1.0, 1.9};
    c.dt = 0.01;
    c.tau_end = 1e3;
    return c;
}

}  // namespace basset
