// Command-line front end: configuration-driven runs of the particle solver,
// kernel tables, envelope curves, bound estimation, the figure experiments,
// and the verification suite.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "basset/checkpoint.hpp"
#include "basset/config.hpp"
#include "basset/csv.hpp"
#include "basset/envelope.hpp"
#include "basset/experiment.hpp"
#include "basset/flow.hpp"
#include "basset/solver.hpp"
#include "basset/verification.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--config", o.config_path, "configuration file");
    cmd->add_option("--out", o.out_dir, "output directory (overrides config)");
    cmd->add_option("--threads", o.threads, "worker thread count (0 = hardware)");
    cmd->add_option("--seed", o.seed, "random seed recorded in the manifest")
        ->each([&](const std::string&) { o.seed_set = true; });
}

basset::ExperimentConfig resolve_config(const CommonOpts& o,
                                        basset::ExperimentConfig base) {
    basset::ExperimentConfig cfg =
        o.config_path.empty() ? std::move(base) : basset::load_config(o.config_path);
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    if (o.threads > 0) cfg.threads = o.threads;
    if (o.seed_set) cfg.seed = o.seed;
    const char* env = std::getenv("BASSET_THREADS");
    if (env && cfg.threads == 0) cfg.threads = static_cast<unsigned>(std::atoi(env));
    return cfg;
}

int cmd_simulate(const CommonOpts& o) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, ExperimentConfig{});
    std::filesystem::create_directories(cfg.out_dir);
    const auto flow = make_flow(cfg);
    const double R = cfg.r_list.empty() ? 2.0 / 3.0 : cfg.r_list.front();
    const auto params = make_params(cfg, R);
    DerivedFields<2> fields(*flow, params, cfg.faxen);
    const auto bounds = estimate_bounds(fields, cfg.bounds_grid(), cfg.threads);
    const Vec<2> y0{0.5 * (cfg.release_lo[0] + cfg.release_hi[0]),
                    0.5 * (cfg.release_lo[1] + cfg.release_hi[1])};
    const auto rec = simulate(fields, params, y0, cfg.w0, cfg.solver_config(), &bounds);
    for (const auto& w : rec.warnings) std::cerr << "warning: " << w << "\n";

    const std::size_t stride =
        basset::detail::csv_stride_for(rec.nodes(), cfg.csv_stride);
    std::optional<EnvelopeCurve> env;
    double asym = 0.0;
    if (params.eps * bounds.L_M < 1.0) {
        env = envelope_curve(params, bounds, norm(cfg.w0), rec.nodes(), cfg.dt,
                             cfg.envelope_tol, false, cfg.threads);
        asym = asymptotic_bound(params, bounds);
    }
    const std::string path = cfg.out_dir + "/trajectory.csv";
    basset::detail::write_trajectory_csv(path, rec, env ? &*env : nullptr, cfg.omit_eps2,
                                         asym, stride);
    save_checkpoint(cfg.out_dir + "/checkpoint.txt", cfg, rec);
    std::cout << "wrote " << path << " (" << rec.nodes() << " nodes, final |w| = "
              << format_double(rec.abs_w(rec.nodes() - 1)) << ")\n";
    return 0;
}

int cmd_relaxation_table(const CommonOpts& o, double kappa, double tau_end, double dt) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, ExperimentConfig{});
    std::filesystem::create_directories(cfg.out_dir);
    const auto kern = RelaxationKernel::make(kappa);
    const std::size_t n = static_cast<std::size_t>(std::ceil(tau_end / dt - 1e-9)) + 1;
    const auto table = psi_grid(kern, n, dt);
    const std::string path = cfg.out_dir + "/relaxation_table.csv";
    CsvWriter csv(path, {"tau", "psi", "phi", "psi_asymptotic"});
    for (std::size_t i = 0; i < n; ++i) {
        const double tau = i * dt;
        const double rowv[4] = {tau, table.psi[i], table.phi[i],
                                tau > 0.0 ? psi_asymptotic(kern, tau) : 0.0};
        csv.row(rowv);
    }
    std::cout << "wrote " << path << "\n";
    return 0;
}

int cmd_envelope(const CommonOpts& o) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, ExperimentConfig{});
    std::filesystem::create_directories(cfg.out_dir);
    const auto flow = make_flow(cfg);
    const double R = cfg.r_list.empty() ? 1.0 : cfg.r_list.front();
    const auto params = make_params(cfg, R);
    DerivedFields<2> fields(*flow, params, cfg.faxen);
    const auto bounds = estimate_bounds(fields, cfg.bounds_grid(), cfg.threads);
    if (params.eps * bounds.L_M >= 1.0) {
        std::cerr << "eps*L_M >= 1: the envelope does not apply\n";
        return 1;
    }
    const std::size_t n = static_cast<std::size_t>(std::ceil(cfg.tau_end / cfg.dt - 1e-9)) + 1;
    const auto env = envelope_curve(params, bounds, norm(cfg.w0), n, cfg.dt,
                                    cfg.envelope_tol, false, cfg.threads);
    const std::string path = cfg.out_dir + "/envelope.csv";
    basset::detail::write_envelope_csv(path, env, cfg.omit_eps2,
                                       basset::detail::csv_stride_for(n, cfg.csv_stride));
    std::cout << "wrote " << path << " (J = " << env.J
              << ", asymptotic bound = " << format_double(asymptotic_bound(params, bounds))
              << ")\n";
    return 0;
}

int cmd_bounds(const CommonOpts& o) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, ExperimentConfig{});
    std::filesystem::create_directories(cfg.out_dir);
    const auto flow = make_flow(cfg);
    nlohmann::json out = nlohmann::json::array();
    for (double R : cfg.r_list) {
        const auto params = make_params(cfg, R);
        DerivedFields<2> fields(*flow, params, cfg.faxen);
        const auto b = estimate_bounds(fields, cfg.bounds_grid(), cfg.threads);
        nlohmann::json jb = {{"R", R},
                             {"L_A", b.L_A},
                             {"L_B", b.L_B},
                             {"L_M", b.L_M},
                             {"L_c", b.L_c ? *b.L_c : 0.0},
                             {"delta_L_A", b.delta_L_A},
                             {"delta_L_B", b.delta_L_B},
                             {"delta_L_M", b.delta_L_M},
                             {"grid", {b.nx, b.ny, b.nt}},
                             {"warnings", b.warnings}};
        std::cout << jb.dump(2) << "\n";
        out.push_back(std::move(jb));
    }
    std::ofstream f(cfg.out_dir + "/bounds.json");
    f << out.dump(2) << "\n";
    std::cout << "wrote " << cfg.out_dir << "/bounds.json\n";
    return 0;
}

int cmd_fig3(const CommonOpts& o) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, default_fig3_config());
    const auto man = run_fig3(cfg);
    std::cout << "fig3: " << man.ensembles.size() << " ensembles, "
              << (man.ensembles.empty() ? 0 : man.ensembles.front().trajectories.size())
              << " trajectories each, wall " << format_double(man.wall_ms / 1000.0)
              << " s\n";
    for (const auto& e : man.ensembles) {
        int viol = 0;
        double final_max = 0.0;
        for (const auto& t : e.trajectories) {
            viol += t.envelope_violations;
            final_max = std::max(final_max, t.final_abs_w);
        }
        std::cout << "  R = " << format_double(e.R) << ": violations " << viol
                  << ", max final |w| " << format_double(final_max) << ", spread "
                  << format_double(e.spread)
                  << (e.position_independent ? " [position-independent decay]" : "") << "\n";
    }
    std::cout << "manifest: " << cfg.out_dir << "/manifest.json\n";
    return 0;
}

int cmd_fig4(const CommonOpts& o) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, default_fig4_config());
    const auto man = run_fig4(cfg);
    std::cout << "fig4: wall " << format_double(man.wall_ms / 1000.0) << " s\n";
    for (const auto& e : man.ensembles)
        std::cout << "  R = " << format_double(e.R) << ": slope "
                  << format_double(e.envelope_slope) << ", plateau "
                  << format_double(e.asymptotic) << "\n";
    std::cout << "manifest: " << cfg.out_dir << "/manifest.json\n";
    return 0;
}

int cmd_restart_demo(const CommonOpts& o) {
    using namespace basset;
    const ExperimentConfig cfg = resolve_config(o, ExperimentConfig{});
    const auto demo = run_restart_demo(cfg);
    std::cout << "restart demo at tau1 = " << format_double(cfg.restart_tau1)
              << ": discard gap " << format_double(demo.discard_gap) << ", replay gap "
              << format_double(demo.replay_gap) << ", solver tolerance "
              << format_double(demo.solver_tolerance) << "\n";
    std::cout << "manifest: " << cfg.out_dir << "/manifest.json\n";
    return 0;
}

int cmd_verify(const CommonOpts& o) {
    using namespace basset;
    ExperimentConfig base = default_fig3_config();
    base.out_dir = "verify_out";
    const ExperimentConfig cfg = resolve_config(o, std::move(base));
    const auto rep = run_verification(cfg, cfg.threads, std::cout);
    std::ofstream f(cfg.out_dir + "/verify_report.json");
    f << rep.to_json().dump(2) << "\n";
    std::cout << (rep.all_ok() ? "all criteria passed" : "CRITERIA FAILED") << " ("
              << format_double(rep.wall_ms / 1000.0) << " s); report: " << cfg.out_dir
              << "/verify_report.json\n";
    return rep.all_ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Inertial particle dynamics with Basset memory: fractional kernels, "
                 "two-backend trajectory integration, analytic decay envelopes"};
    app.require_subcommand(1);

    CommonOpts sim_o, relax_o, env_o, bounds_o, fig3_o, fig4_o, restart_o, verify_o;
    double relax_kappa = 1.0, relax_tau_end = 100.0, relax_dt = 0.01;

    add_common(app.add_subcommand("simulate", "integrate one trajectory"), sim_o);
    auto* relax = app.add_subcommand("relaxation-table", "tabulate psi, phi and the tail law");
    add_common(relax, relax_o);
    relax->add_option("--kappa", relax_kappa, "memory strength");
    relax->add_option("--tau-end", relax_tau_end, "table horizon");
    relax->add_option("--dt", relax_dt, "table step");
    add_common(app.add_subcommand("envelope", "analytic decay envelope"), env_o);
    add_common(app.add_subcommand("bounds", "estimate L_A, L_B, L_M, L_c"), bounds_o);
    add_common(app.add_subcommand("fig3", "decay ensembles with envelopes"), fig3_o);
    add_common(app.add_subcommand("fig4", "envelope family sweep"), fig4_o);
    add_common(app.add_subcommand("restart-demo", "history discard vs replay"), restart_o);
    add_common(app.add_subcommand("verify", "run the verification suite"), verify_o);

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("simulate")) return cmd_simulate(sim_o);
        if (app.got_subcommand("relaxation-table"))
            return cmd_relaxation_table(relax_o, relax_kappa, relax_tau_end, relax_dt);
        if (app.got_subcommand("envelope")) return cmd_envelope(env_o);
        if (app.got_subcommand("bounds")) return cmd_bounds(bounds_o);
        if (app.got_subcommand("fig3")) return cmd_fig3(fig3_o);
        if (app.got_subcommand("fig4")) return cmd_fig4(fig4_o);
        if (app.got_subcommand("restart-demo")) return cmd_restart_demo(restart_o);
        if (app.got_subcommand("verify")) return cmd_verify(verify_o);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
