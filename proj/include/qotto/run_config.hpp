// run_config.hpp — flat key/value run configuration for the CLI: defaults,
// optional config file, then command-line overrides, in that precedence order.

#pragma once

#include <cctype>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "qotto/model.hpp"
#include "qotto/optimize.hpp"

namespace qotto {

struct GridSpec {
    double min = 0.0;
    double max = 0.0;
    int count = 1;

    std::vector<double> values() const {
        std::vector<double> g;
        g.reserve(static_cast<std::size_t>(count));
        if (count == 1) {
            g.push_back(min);
            return g;
        }
        const double step = (max - min) / (count - 1);
        for (int i = 0; i < count; ++i) g.push_back(min + step * i);
        return g;
    }
};

struct RunConfig {
    EngineConfig engine;
    GridSpec r_grid{0.005, 0.995, 199};
    GridSpec tau_grid{0.5, 12.0, 116};
    SweepMode mode = SweepMode::Perfect;
    double tau_b_factor = 0.0; // > 0: tau_b = factor * tau_u in finite mode
    double jump_threshold = 0.05;
    double match_tol = 0.01;
    double refine_tol = 1.0e-4;
    std::string output; // empty = stdout (optimize requires a path)
    int precision = 12; // significant digits in CSV output
    int jobs = 1;

    void validate() const;
    std::map<std::string, std::string> resolved() const; // for output headers
};

namespace detail {

inline bool parse_double(const std::string& s, double& out) {
    if (s == "inf" || s == "infinity") {
        out = infinite_time();
        return true;
    }
    std::size_t pos = 0;
    try {
        out = std::stod(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

inline bool parse_int(const std::string& s, int& out) {
    std::size_t pos = 0;
    try {
        out = std::stoi(s, &pos);
    } catch (...) {
        return false;
    }
    return pos == s.size();
}

inline std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

} // namespace detail

// Applies one key/value setting. `where` names the source (file:line or flag)
// for diagnostics.
inline void apply_setting(RunConfig& rc, const std::string& key, const std::string& value,
                          const std::string& where) {
    auto fail = [&](const std::string& why) {
        throw validation_error(where + ": " + why + " for key '" + key + "' (value '" + value + "')");
    };
    auto as_double = [&]() {
        double v = 0.0;
        if (!detail::parse_double(value, v)) fail("expected a real number");
        return v;
    };
    auto as_int = [&]() {
        int v = 0;
        if (!detail::parse_int(value, v)) fail("expected an integer");
        return v;
    };

    EngineConfig& e = rc.engine;
    if (key == "omega1") e.omega1 = as_double();
    else if (key == "omega2") e.omega2 = as_double();
    else if (key == "beta_h") e.beta_h = as_double();
    else if (key == "beta_c") e.beta_c = as_double();
    else if (key == "tau_u") e.tau_u = as_double();
    else if (key == "tau_b") e.tau_b = as_double();
    else if (key == "r_u") e.r_u = as_double();
    else if (key == "r_b") e.r_b = as_double();
    else if (key == "kappa") e.kappa = as_double();
    else if (key == "gamma") e.gamma = as_double();
    else if (key == "n_cut") e.n_cut = as_int();
    else if (key == "delta") e.substance.delta = as_double();
    else if (key == "weak_coupling_max") e.weak_coupling_max = as_double();
    else if (key == "ode_tol") e.ode_tol = as_double();
    else if (key == "substance") {
        if (value == "ho" || value == "harmonic_oscillator")
            e.substance.kind = SubstanceKind::HarmonicOscillator;
        else if (value == "tls" || value == "two_level_system")
            e.substance.kind = SubstanceKind::TwoLevelSystem;
        else fail("expected 'ho' or 'tls'");
    } else if (key == "mode") {
        if (value == "perfect") rc.mode = SweepMode::Perfect;
        else if (value == "finite") rc.mode = SweepMode::Finite;
        else fail("expected 'perfect' or 'finite'");
    } else if (key == "r_grid_min") rc.r_grid.min = as_double();
    else if (key == "r_grid_max") rc.r_grid.max = as_double();
    else if (key == "r_grid_count") rc.r_grid.count = as_int();
    else if (key == "tau_grid_min") rc.tau_grid.min = as_double();
    else if (key == "tau_grid_max") rc.tau_grid.max = as_double();
    else if (key == "tau_grid_count") rc.tau_grid.count = as_int();
    else if (key == "tau_b_factor") rc.tau_b_factor = as_double();
    else if (key == "jump_threshold") rc.jump_threshold = as_double();
    else if (key == "match_tol") rc.match_tol = as_double();
    else if (key == "refine_tol") rc.refine_tol = as_double();
    else if (key == "output") rc.output = value;
    else if (key == "precision") rc.precision = as_int();
    else if (key == "jobs") rc.jobs = as_int();
    else throw validation_error(where + ": unknown key '" + key + "'");
}

// Config file format: one `key = value` per line, '#' starts a comment.
inline void load_config_file(RunConfig& rc, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        const std::size_t eq = trimmed.find('=');
        std::ostringstream where;
        where << path << ":" << lineno;
        if (eq == std::string::npos)
            throw validation_error(where.str() + ": expected 'key = value'");
        const std::string key = detail::trim(trimmed.substr(0, eq));
        const std::string value = detail::trim(trimmed.substr(eq + 1));
        if (key.empty() || value.empty())
            throw validation_error(where.str() + ": expected 'key = value'");
        apply_setting(rc, key, value, where.str());
    }
}

inline void RunConfig::validate() const {
    engine.validate();
    if (r_grid.count < 1 || tau_grid.count < 1)
        throw validation_error("grid counts must be at least 1");
    if (r_grid.count > 1 && !(r_grid.max > r_grid.min))
        throw validation_error("r grid bounds must be ascending");
    if (tau_grid.count > 1 && !(tau_grid.max > tau_grid.min))
        throw validation_error("tau grid bounds must be ascending");
    if (!(r_grid.min > 0.0 && (r_grid.count == 1 ? r_grid.min : r_grid.max) < 1.0))
        throw validation_error("r grid must lie strictly inside (0, 1)");
    if (!(tau_grid.min > 0.0)) throw validation_error("tau grid must be positive");
    if (precision < 1 || precision > 17) throw validation_error("precision must be in [1, 17]");
    if (jobs < 1) throw validation_error("jobs must be at least 1");
    if (mode == SweepMode::Finite && !(tau_b_factor > 0.0) && !std::isfinite(engine.tau_b))
        throw validation_error("finite mode requires a finite tau_b or tau_b_factor > 0");
}

inline std::map<std::string, std::string> RunConfig::resolved() const {
    auto fmt = [](double v) {
        std::ostringstream os;
        os.precision(17);
        if (std::isinf(v)) os << "inf";
        else os << v;
        return os.str();
    };
    std::map<std::string, std::string> kv;
    kv["omega1"] = fmt(engine.omega1);
    kv["omega2"] = fmt(engine.omega2);
    kv["beta_h"] = fmt(engine.beta_h);
    kv["beta_c"] = fmt(engine.beta_c);
    kv["tau_u"] = fmt(engine.tau_u);
    kv["tau_b"] = fmt(engine.tau_b);
    kv["r_u"] = fmt(engine.r_u);
    kv["r_b"] = fmt(engine.r_b);
    kv["kappa"] = fmt(engine.kappa);
    kv["gamma"] = fmt(engine.gamma);
    kv["n_cut"] = std::to_string(engine.n_cut);
    kv["substance"] = engine.substance.is_ho() ? "ho" : "tls";
    kv["delta"] = fmt(engine.substance.delta);
    kv["weak_coupling_max"] = fmt(engine.weak_coupling_max);
    kv["ode_tol"] = fmt(engine.ode_tol);
    kv["mode"] = (mode == SweepMode::Perfect) ? "perfect" : "finite";
    kv["r_grid_min"] = fmt(r_grid.min);
    kv["r_grid_max"] = fmt(r_grid.max);
    kv["r_grid_count"] = std::to_string(r_grid.count);
    kv["tau_grid_min"] = fmt(tau_grid.min);
    kv["tau_grid_max"] = fmt(tau_grid.max);
    kv["tau_grid_count"] = std::to_string(tau_grid.count);
    kv["tau_b_factor"] = fmt(tau_b_factor);
    kv["jump_threshold"] = fmt(jump_threshold);
    kv["match_tol"] = fmt(match_tol);
    kv["refine_tol"] = fmt(refine_tol);
    kv["precision"] = std::to_string(precision);
    kv["jobs"] = std::to_string(jobs);
    return kv;
}

// Parses `[--config FILE] [--key value]...`; flags override file settings.
inline RunConfig parse_cli_config(const std::vector<std::string>& args) {
    RunConfig rc;
    // first pass: config file
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
        if (args[i] == "--config") load_config_file(rc, args[i + 1]);
    // second pass: overrides
    for (std::size_t i = 0; i < args.size(); ++i) {
        const std::string& a = args[i];
        if (a == "--config") {
            ++i;
            continue;
        }
        if (a.rfind("--", 0) != 0)
            throw validation_error("unexpected argument '" + a + "' (expected --key value)");
        if (i + 1 >= args.size()) throw validation_error("missing value for flag '" + a + "'");
        apply_setting(rc, a.substr(2), args[i + 1], "flag " + a);
        ++i;
    }
    return rc;
}

} // namespace qotto
