#pragma once

// Self-describing text checkpoint of a trajectory. Exact continuation of the
// fractional dynamics requires the ENTIRE w history, not just the final
// state, so the full node arrays are stored; values are written as C99 hex
// floats, which round-trip bit-exactly.

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "basset/common.hpp"
#include "basset/config.hpp"
#include "basset/solver.hpp"

namespace basset {

namespace detail {

inline std::string hex_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::hex);
    return std::string(buf, res.ptr);
}

inline double parse_hex_double(const std::string& s) {
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v,
                                     std::chars_format::hex);
    if (res.ec != std::errc{})
        throw ValidationError("checkpoint: bad hex float '" + s + "'");
    return v;
}

}  // namespace detail

struct Checkpoint {
    ExperimentConfig experiment;
    ParticleParams<2> params;
    SolverConfig solver;
    double t0 = 0.0;
    std::vector<Vec<2>> y;
    std::vector<Vec<2>> w;
};

inline void save_checkpoint(const std::string& path, const ExperimentConfig& experiment,
                            const TrajectoryRecord<2>& rec) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ValidationError("checkpoint: cannot open " + path);
    out << "basset-checkpoint 1\n";
    const std::string cfg = serialize_config(experiment);
    out << "config-lines " << std::count(cfg.begin(), cfg.end(), '\n') << "\n" << cfg;
    out << "params " << detail::hex_double(rec.params.R) << " "
        << detail::hex_double(rec.params.St) << " " << detail::hex_double(rec.params.Re) << " "
        << (rec.params.synthetic ? 1 : 0) << " " << detail::hex_double(rec.params.eps) << " "
        << detail::hex_double(rec.params.g_scaled[0]) << " "
        << detail::hex_double(rec.params.g_scaled[1]) << "\n";
    out << "solver " << to_string(rec.config.backend) << " " << detail::hex_double(rec.config.dt)
        << " " << detail::hex_double(rec.config.tau_end) << " "
        << detail::hex_double(rec.config.picard_tol) << " " << rec.config.picard_max_iters << " "
        << (rec.config.faxen ? 1 : 0) << " " << detail::hex_double(rec.config.t0) << "\n";
    out << "t0 " << detail::hex_double(rec.t0) << "\n";
    out << "nodes " << rec.nodes() << "\n";
    for (std::size_t i = 0; i < rec.nodes(); ++i)
        out << detail::hex_double(rec.y[i][0]) << " " << detail::hex_double(rec.y[i][1]) << " "
            << detail::hex_double(rec.w[i][0]) << " " << detail::hex_double(rec.w[i][1]) << "\n";
    if (!out) throw ValidationError("checkpoint: write failed for " + path);
}

inline Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("checkpoint: cannot open " + path);
    Checkpoint ck;
    std::string word;
    int version = 0;
    in >> word >> version;
    if (word != "basset-checkpoint" || version != 1)
        throw ValidationError("checkpoint: unrecognized header in " + path);
    std::size_t cfg_lines = 0;
    in >> word >> cfg_lines;
    if (word != "config-lines") throw ValidationError("checkpoint: missing config block");
    std::string line;
    std::getline(in, line);  // finish the header line
    std::string cfg_text;
    for (std::size_t i = 0; i < cfg_lines; ++i) {
        if (!std::getline(in, line)) throw ValidationError("checkpoint: truncated config");
        cfg_text += line;
        cfg_text += '\n';
    }
    ck.experiment = parse_config_string(cfg_text);

    std::string r, st, re, eps, g0, g1;
    int synthetic = 0;
    in >> word >> r >> st >> re >> synthetic >> eps >> g0 >> g1;
    if (word != "params") throw ValidationError("checkpoint: missing params");
    if (synthetic) {
        ck.params = synthetic_no_memory<2>(
            detail::parse_hex_double(eps),
            Vec<2>{detail::parse_hex_double(g0), detail::parse_hex_double(g1)});
    } else {
        ck.params = from_dimensionless<2>(
            detail::parse_hex_double(r), detail::parse_hex_double(st),
            detail::parse_hex_double(re),
            Vec<2>{detail::parse_hex_double(g0), detail::parse_hex_double(g1)});
    }

    std::string backend, dt, tau_end, tol, t0s;
    int iters = 0, faxen = 0;
    in >> word >> backend >> dt >> tau_end >> tol >> iters >> faxen >> t0s;
    if (word != "solver") throw ValidationError("checkpoint: missing solver block");
    ck.solver.backend = backend == "mild_volterra" ? SolverBackend::mild_volterra
                                                   : SolverBackend::fractional_direct;
    ck.solver.dt = detail::parse_hex_double(dt);
    ck.solver.tau_end = detail::parse_hex_double(tau_end);
    ck.solver.picard_tol = detail::parse_hex_double(tol);
    ck.solver.picard_max_iters = iters;
    ck.solver.faxen = faxen != 0;
    ck.solver.t0 = detail::parse_hex_double(t0s);

    std::string t0v;
    in >> word >> t0v;
    if (word != "t0") throw ValidationError("checkpoint: missing t0");
    ck.t0 = detail::parse_hex_double(t0v);

    std::size_t n = 0;
    in >> word >> n;
    if (word != "nodes") throw ValidationError("checkpoint: missing node count");
    ck.y.resize(n);
    ck.w.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::string a, b, c, d;
        in >> a >> b >> c >> d;
        if (!in) throw ValidationError("checkpoint: truncated node data");
        ck.y[i] = {detail::parse_hex_double(a), detail::parse_hex_double(b)};
        ck.w[i] = {detail::parse_hex_double(c), detail::parse_hex_double(d)};
    }
    return ck;
}

// Rebuild a record from checkpoint state (tau grid implied by dt and node
// count). The record can seed restart_replay_history for exact continuation.
inline TrajectoryRecord<2> checkpoint_record(const Checkpoint& ck) {
    TrajectoryRecord<2> rec;
    rec.params = ck.params;
    rec.config = ck.solver;
    rec.t0 = ck.t0;
    rec.y = ck.y;
    rec.w = ck.w;
    rec.v.resize(ck.y.size());
    rec.tau.resize(ck.y.size());
    for (std::size_t i = 0; i < rec.tau.size(); ++i) rec.tau[i] = i * ck.solver.dt;
    return rec;
}

}  // namespace basset
