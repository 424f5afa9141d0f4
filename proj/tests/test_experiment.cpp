#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "basset/experiment.hpp"
#include "basset/verification.hpp"

using namespace basset;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Desk-scale configuration: full pipeline, small grids.
ExperimentConfig small_cfg(const std::string& out) {
    ExperimentConfig c;
    c.dt = 0.02;
    c.tau_end = 20.0;
    c.counts = {2, 2};
    c.bounds_nx = 201;
    c.bounds_ny = 101;
    c.bounds_nt = 32;
    c.out_dir = out;
    c.threads = 2;
    c.slope_window = {2.0, 20.0};
    return c;
}

}  // namespace

TEST_CASE("release lattice is the deterministic grid") {
    ExperimentConfig c;
    const auto pts = release_points(c);
    REQUIRE(pts.size() == 15);  // 5 x 3
    CHECK(pts.front()[0] == 0.2);
    CHECK(pts.front()[1] == 0.2);
    CHECK(pts.back()[0] == 1.8);
    CHECK(pts.back()[1] == 0.8);
    CHECK(pts[1][0] == doctest::Approx(0.6));  // x fast, y slow
    CHECK(pts[5][1] == doctest::Approx(0.5));
    // All 15 distinct.
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            CHECK((pts[i][0] != pts[j][0] || pts[i][1] != pts[j][1]));
}

TEST_CASE("decay ensemble run produces a complete manifest") {
    const std::string out = (fs::temp_directory_path() / "basset_fig3_small").string();
    fs::remove_all(out);
    auto cfg = small_cfg(out);
    cfg.r_list = {2.0 / 3.0, 1.0};
    const auto man = run_fig3(cfg);

    REQUIRE(man.ensembles.size() == 2);
    CHECK(man.config_hash == config_hash(cfg));
    for (const auto& ens : man.ensembles) {
        CHECK(ens.trajectories.size() == 4);
        CHECK(fs::exists(ens.envelope_path));
        for (const auto& t : ens.trajectories) {
            CHECK(t.failure.empty());
            CHECK(fs::exists(t.path));
            CHECK(t.envelope_violations == 0);
            CHECK(t.max_envelope_excess <= 0.0);
        }
    }
    CHECK(fs::exists(out + "/manifest.json"));
    CHECK(fs::exists(out + "/summary.csv"));
    const std::string summary = slurp(out + "/summary.csv");
    CHECK(summary.rfind("R,index,y0_1,y0_2,final_abs_w,", 0) == 0);
    CHECK(man.to_json()["config"].get<std::string>() == serialize_config(cfg));

    // Neutral buoyancy: all curves coincide and the flag is reported.
    const auto& neutral = man.ensembles.front();
    CHECK(neutral.R == doctest::Approx(2.0 / 3.0));
    CHECK(neutral.bounds.L_B == 0.0);
    CHECK(neutral.position_independent);
    CHECK(neutral.spread < 0.01 * norm(cfg.w0));

    // The bubble ensemble keeps a positive forcing bound.
    CHECK(man.ensembles.back().bounds.L_B > 0.05);

    // CSV columns as promised.
    const std::string head = slurp(neutral.trajectories.front().path).substr(0, 80);
    CHECK(head.rfind("tau,t_phys,y1,y2,w1,w2,abs_w,v1,v2,envelope,asymptotic_bound", 0) == 0);
}

TEST_CASE("reruns produce byte-identical outputs") {
    const std::string out1 = (fs::temp_directory_path() / "basset_fig3_rerun1").string();
    const std::string out2 = (fs::temp_directory_path() / "basset_fig3_rerun2").string();
    fs::remove_all(out1);
    fs::remove_all(out2);
    auto c1 = small_cfg(out1);
    c1.r_list = {1.0};
    c1.counts = {2, 1};
    c1.tau_end = 10.0;
    auto c2 = c1;
    c2.out_dir = out2;
    c2.threads = 1;  // thread count must not change the numbers
    const auto m1 = run_fig3(c1);
    const auto m2 = run_fig3(c2);
    for (std::size_t i = 0; i < m1.ensembles.front().trajectories.size(); ++i) {
        const auto& a = m1.ensembles.front().trajectories[i];
        const auto& b = m2.ensembles.front().trajectories[i];
        CHECK(slurp(a.path) == slurp(b.path));
    }
    CHECK(slurp(m1.ensembles.front().envelope_path) ==
          slurp(m2.ensembles.front().envelope_path));
}

TEST_CASE("envelope family sweep") {
    const std::string out = (fs::temp_directory_path() / "basset_fig4_small").string();
    fs::remove_all(out);
    auto cfg = small_cfg(out);
    cfg.r_list = {2.0 / 3.0, 1.0};
    cfg.tau_end = 50.0;
    cfg.slope_window = {5.0, 50.0};
    const auto man = run_fig4(cfg);
    REQUIRE(man.ensembles.size() == 2);
    for (const auto& e : man.ensembles) {
        CHECK(fs::exists(e.envelope_path));
        CHECK(e.envelope_slope < -0.5);  // decaying transient
    }
    // Neutral buoyancy decays with no plateau; the bubble plateaus at the
    // asymptotic bound.
    CHECK(man.ensembles.front().asymptotic == 0.0);
    CHECK(man.ensembles.back().asymptotic > 0.0);
    CHECK(man.extra.contains("curves"));

    // Every envelope starts at |w0| when the eps^2 term is omitted.
    for (const auto& curve : man.extra["curves"])
        CHECK(curve["start_value"].get<double>() == doctest::Approx(norm(cfg.w0)));
    // The full envelope's analytic plateau IS the asymptotic bound; the
    // plotted curve levels off eps L_B lower.
    for (std::size_t i = 0; i < man.ensembles.size(); ++i) {
        const auto& curve = man.extra["curves"][i];
        CHECK(curve["analytic_plateau"].get<double>() ==
              doctest::Approx(man.ensembles[i].asymptotic));
    }
}

TEST_CASE("envelope family at benchmark scale: slopes and plateaus") {
    const std::string out = (fs::temp_directory_path() / "basset_fig4_bench").string();
    fs::remove_all(out);
    auto cfg = small_cfg(out);
    cfg.r_list = {2.0 / 3.0, 1.0};
    cfg.dt = 0.05;
    cfg.tau_end = 1e3;
    cfg.slope_window = {1e2, 1e3};
    const auto man = run_fig4(cfg);
    REQUIRE(man.ensembles.size() == 2);

    // Neutral buoyancy: pure algebraic decay at the tail rate -3/2.
    const auto& neutral = man.ensembles.front();
    CHECK(neutral.envelope_slope == doctest::Approx(-1.5).epsilon(0.034));

    // Other ratios flatten onto the asymptotic bound.
    const auto& bubble = man.ensembles.back();
    const double at_end = man.extra["curves"][1]["envelope_at_end"].get<double>();
    CHECK(at_end / bubble.asymptotic > 0.9);
    CHECK(at_end / bubble.asymptotic < 1.3);
    CHECK(bubble.envelope_slope > -1.5);  // transient between -1.7 and -1.2
    CHECK(bubble.envelope_slope < -0.1);
}

TEST_CASE("restart demo quantifies the memory effect") {
    const std::string out = (fs::temp_directory_path() / "basset_restart_small").string();
    fs::remove_all(out);
    auto cfg = small_cfg(out);
    cfg.r_list = {1.0};
    cfg.restart_tau1 = 5.0;
    cfg.restart_horizon = 15.0;
    const auto demo = run_restart_demo(cfg);
    CHECK(demo.solver_tolerance > 0.0);
    CHECK(demo.discard_gap >= 10.0 * demo.solver_tolerance);
    CHECK(demo.replay_gap <= 2.0 * demo.solver_tolerance);
    CHECK(fs::exists(out + "/restart_original.csv"));
    CHECK(fs::exists(out + "/restart_discard.csv"));
    CHECK(fs::exists(out + "/restart_replay.csv"));
    CHECK(fs::exists(out + "/manifest.json"));
}

TEST_CASE("hypothesis gate reflects eps L_M") {
    auto cfg = small_cfg((fs::temp_directory_path() / "basset_gate").string());
    CHECK(verification_hypothesis_ok(cfg, 2));
    cfg.amplitude = 100.0;  // L_M scales with the amplitude
    CHECK(!verification_hypothesis_ok(cfg, 2));
}

TEST_CASE("trajectory failures are recorded, not fatal") {
    const std::string out = (fs::temp_directory_path() / "basset_fig3_fail").string();
    fs::remove_all(out);
    auto cfg = small_cfg(out);
    cfg.r_list = {1.0};
    cfg.counts = {2, 1};
    cfg.tau_end = 5.0;
    cfg.picard_max_iters = 1;
    cfg.picard_tol = 1e-30;  // force step failures
    const auto man = run_fig3(cfg);
    REQUIRE(man.ensembles.size() == 1);
    int failed = 0;
    for (const auto& t : man.ensembles.front().trajectories)
        if (!t.failure.empty()) ++failed;
    CHECK(failed == 2);
    CHECK(fs::exists(out + "/manifest.json"));
}
