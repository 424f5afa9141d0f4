#pragma once

// Experiment configuration: a flat, human-editable key = value format with
// [sections]. Parsing is strict (unknown sections or keys are errors, as are
// duplicates), serialization is canonical (fixed order, shortest round-trip
// numbers), and configs round-trip exactly. The run manifest records the
// FNV-1a hash of the canonical serialization, so the hash changes iff a
// semantic field changes.

#include <array>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "basset/common.hpp"
#include "basset/csv.hpp"
#include "basset/flow.hpp"
#include "basset/solver.hpp"

namespace basset {

struct ExperimentConfig {
    // [flow]
    std::string flow_type = "double_gyre";  // double_gyre | frozen
    double amplitude = 0.1;
    double omega = M_PI;
    double alpha = 0.01;

    // [particle]
    std::vector<double> r_list{2.0 / 3.0, 1.0 / 3.0, 1.0};
    std::string st_rule = "r_over_100";  // r_over_100 | fixed
    double st_fixed = 0.01;
    double reynolds = 1000.0;
    Vec<2> gravity{0.0, 0.0};

    // [ensemble]
    Vec<2> release_lo{0.2, 0.2};
    Vec<2> release_hi{1.8, 0.8};
    std::array<std::size_t, 2> counts{5, 3};
    Vec<2> w0{10.0, 10.0};

    // [solver]
    std::string backend = "fractional_direct";
    double dt = 5e-3;
    double tau_end = 1e3;
    double picard_tol = 1e-12;
    int picard_max_iters = 50;
    bool faxen = false;
    double t0 = 0.0;

    // [envelope]
    double envelope_tol = 1e-6;
    bool omit_eps2 = true;
    Vec<2> slope_window{1e2, 1e3};

    // [bounds]
    std::size_t bounds_nx = 801;
    std::size_t bounds_ny = 401;
    std::size_t bounds_nt = 128;
    std::size_t lc_stride = 4;
    double fd_step = 1e-5;
    double refine_tol = 5e-3;
    double time_horizon = 1.0;
    std::string matrix_norm = "frobenius";  // frobenius | spectral

    // [restart]
    double restart_tau1 = 5.0;
    double restart_horizon = 20.0;

    // [run]
    std::string out_dir = "out";
    unsigned threads = 0;
    std::uint64_t seed = 0;
    std::size_t csv_stride = 0;  // 0 = choose automatically (~4000 rows)

    bool operator==(const ExperimentConfig&) const = default;

    SolverBackend backend_enum() const {
        if (backend == "fractional_direct") return SolverBackend::fractional_direct;
        if (backend == "mild_volterra") return SolverBackend::mild_volterra;
        throw ValidationError("config: unknown solver backend '" + backend + "'");
    }

    MatrixNorm matrix_norm_enum() const {
        if (matrix_norm == "frobenius") return MatrixNorm::frobenius;
        if (matrix_norm == "spectral") return MatrixNorm::spectral;
        throw ValidationError("config: unknown matrix_norm '" + matrix_norm + "'");
    }

    SolverConfig solver_config() const {
        SolverConfig s;
        s.backend = backend_enum();
        s.dt = dt;
        s.tau_end = tau_end;
        s.picard_tol = picard_tol;
        s.picard_max_iters = picard_max_iters;
        s.faxen = faxen;
        s.t0 = t0;
        return s;
    }

    BoundsGrid bounds_grid() const {
        BoundsGrid g;
        g.nx = bounds_nx;
        g.ny = bounds_ny;
        g.nt = bounds_nt;
        g.lc_stride = lc_stride;
        g.fd_step = fd_step;
        g.refine_tol = refine_tol;
        g.time_horizon = time_horizon;
        g.m_norm = matrix_norm_enum();
        return g;
    }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline std::vector<double> parse_list(const std::string& v, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw ValidationError("config: empty list entry in '" + key + "'");
        out.push_back(parse_double(item));
    }
    if (out.empty()) throw ValidationError("config: empty list for '" + key + "'");
    return out;
}

inline Vec<2> parse_vec2(const std::string& v, const std::string& key) {
    const auto list = parse_list(v, key);
    if (list.size() != 2)
        throw ValidationError("config: '" + key + "' needs exactly two entries");
    return {list[0], list[1]};
}

inline bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true") return true;
    if (v == "false") return false;
    throw ValidationError("config: '" + key + "' must be true or false");
}

inline std::size_t parse_size(const std::string& v, const std::string& key) {
    const double d = parse_double(v);
    if (d < 0 || d != std::floor(d))
        throw ValidationError("config: '" + key + "' must be a nonnegative integer");
    return static_cast<std::size_t>(d);
}

inline std::string list_str(const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s;
}

inline std::string vec2_str(const Vec<2>& v) {
    return format_double(v[0]) + ", " + format_double(v[1]);
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    std::string section;
    std::set<std::string> seen;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ValidationError("config: malformed section at line " +
                                      std::to_string(lineno));
            section = t.substr(1, t.size() - 2);
            static const std::set<std::string> known{"flow",     "particle", "ensemble",
                                                     "solver",   "envelope", "bounds",
                                                     "restart",  "run"};
            if (!known.count(section))
                throw ValidationError("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config: expected key = value at line " +
                                  std::to_string(lineno));
        const std::string key = detail::trim(t.substr(0, eq));
        const std::string val = detail::trim(t.substr(eq + 1));
        const std::string qual = section + "." + key;
        if (!seen.insert(qual).second)
            throw ValidationError("config: duplicate key '" + qual + "'");

        using detail::parse_bool;
        using detail::parse_list;
        using detail::parse_size;
        using detail::parse_vec2;
        if (qual == "flow.type") c.flow_type = val;
        else if (qual == "flow.amplitude") c.amplitude = parse_double(val);
        else if (qual == "flow.omega") c.omega = parse_double(val);
        else if (qual == "flow.alpha") c.alpha = parse_double(val);
        else if (qual == "particle.r_list") c.r_list = parse_list(val, qual);
        else if (qual == "particle.st_rule") c.st_rule = val;
        else if (qual == "particle.st_fixed") c.st_fixed = parse_double(val);
        else if (qual == "particle.reynolds") c.reynolds = parse_double(val);
        else if (qual == "particle.gravity") c.gravity = parse_vec2(val, qual);
        else if (qual == "ensemble.release_lo") c.release_lo = parse_vec2(val, qual);
        else if (qual == "ensemble.release_hi") c.release_hi = parse_vec2(val, qual);
        else if (qual == "ensemble.counts") {
            const auto l = parse_list(val, qual);
            if (l.size() != 2) throw ValidationError("config: counts needs two entries");
            c.counts = {static_cast<std::size_t>(l[0]), static_cast<std::size_t>(l[1])};
        } else if (qual == "ensemble.w0") c.w0 = parse_vec2(val, qual);
        else if (qual == "solver.backend") c.backend = val;
        else if (qual == "solver.dt") c.dt = parse_double(val);
        else if (qual == "solver.tau_end") c.tau_end = parse_double(val);
        else if (qual == "solver.picard_tol") c.picard_tol = parse_double(val);
        else if (qual == "solver.picard_max_iters")
            c.picard_max_iters = static_cast<int>(parse_size(val, qual));
        else if (qual == "solver.faxen") c.faxen = parse_bool(val, qual);
        else if (qual == "solver.t0") c.t0 = parse_double(val);
        else if (qual == "envelope.tol") c.envelope_tol = parse_double(val);
        else if (qual == "envelope.omit_eps2") c.omit_eps2 = parse_bool(val, qual);
        else if (qual == "envelope.slope_window") c.slope_window = parse_vec2(val, qual);
        else if (qual == "bounds.nx") c.bounds_nx = parse_size(val, qual);
        else if (qual == "bounds.ny") c.bounds_ny = parse_size(val, qual);
        else if (qual == "bounds.nt") c.bounds_nt = parse_size(val, qual);
        else if (qual == "bounds.lc_stride") c.lc_stride = parse_size(val, qual);
        else if (qual == "bounds.fd_step") c.fd_step = parse_double(val);
        else if (qual == "bounds.refine_tol") c.refine_tol = parse_double(val);
        else if (qual == "bounds.time_horizon") c.time_horizon = parse_double(val);
        else if (qual == "bounds.matrix_norm") c.matrix_norm = val;
        else if (qual == "restart.tau1") c.restart_tau1 = parse_double(val);
        else if (qual == "restart.horizon") c.restart_horizon = parse_double(val);
        else if (qual == "run.out_dir") c.out_dir = val;
        else if (qual == "run.threads") c.threads = static_cast<unsigned>(parse_size(val, qual));
        else if (qual == "run.seed") c.seed = static_cast<std::uint64_t>(parse_size(val, qual));
        else if (qual == "run.csv_stride") c.csv_stride = parse_size(val, qual);
        else throw ValidationError("config: unknown key '" + qual + "'");
    }
    return c;
}

inline ExperimentConfig parse_config_string(const std::string& text) {
    std::istringstream in(text);
    return parse_config(in);
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot open " + path);
    return parse_config(in);
}

inline std::string serialize_config(const ExperimentConfig& c) {
    using detail::list_str;
    using detail::vec2_str;
    std::ostringstream o;
    o << "[flow]\n";
    o << "type = " << c.flow_type << "\n";
    o << "amplitude = " << format_double(c.amplitude) << "\n";
    o << "omega = " << format_double(c.omega) << "\n";
    o << "alpha = " << format_double(c.alpha) << "\n";
    o << "\n[particle]\n";
    o << "r_list = " << list_str(c.r_list) << "\n";
    o << "st_rule = " << c.st_rule << "\n";
    o << "st_fixed = " << format_double(c.st_fixed) << "\n";
    o << "reynolds = " << format_double(c.reynolds) << "\n";
    o << "gravity = " << vec2_str(c.gravity) << "\n";
    o << "\n[ensemble]\n";
    o << "release_lo = " << vec2_str(c.release_lo) << "\n";
    o << "release_hi = " << vec2_str(c.release_hi) << "\n";
    o << "counts = " << c.counts[0] << ", " << c.counts[1] << "\n";
    o << "w0 = " << vec2_str(c.w0) << "\n";
    o << "\n[solver]\n";
    o << "backend = " << c.backend << "\n";
    o << "dt = " << format_double(c.dt) << "\n";
    o << "tau_end = " << format_double(c.tau_end) << "\n";
    o << "picard_tol = " << format_double(c.picard_tol) << "\n";
    o << "picard_max_iters = " << c.picard_max_iters << "\n";
    o << "faxen = " << (c.faxen ? "true" : "false") << "\n";
    o << "t0 = " << format_double(c.t0) << "\n";
    o << "\n[envelope]\n";
    o << "tol = " << format_double(c.envelope_tol) << "\n";
    o << "omit_eps2 = " << (c.omit_eps2 ? "true" : "false") << "\n";
    o << "slope_window = " << vec2_str(c.slope_window) << "\n";
    o << "\n[bounds]\n";
    o << "nx = " << c.bounds_nx << "\n";
    o << "ny = " << c.bounds_ny << "\n";
    o << "nt = " << c.bounds_nt << "\n";
    o << "lc_stride = " << c.lc_stride << "\n";
    o << "fd_step = " << format_double(c.fd_step) << "\n";
    o << "refine_tol = " << format_double(c.refine_tol) << "\n";
    o << "time_horizon = " << format_double(c.time_horizon) << "\n";
    o << "matrix_norm = " << c.matrix_norm << "\n";
    o << "\n[restart]\n";
    o << "tau1 = " << format_double(c.restart_tau1) << "\n";
    o << "horizon = " << format_double(c.restart_horizon) << "\n";
    o << "\n[run]\n";
    o << "out_dir = " << c.out_dir << "\n";
    o << "threads = " << c.threads << "\n";
    o << "seed = " << c.seed << "\n";
    o << "csv_stride = " << c.csv_stride << "\n";
    return o.str();
}

inline std::string config_hash(const ExperimentConfig& c) {
    const std::string s = serialize_config(c);
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace basset
