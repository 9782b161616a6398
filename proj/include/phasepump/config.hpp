#pragma once

// Flat key=value / [section] run configuration.  One section per run mode
// (exactly one must appear) plus optional [sweep], [numerics], [output].
// Unknown sections or keys are hard errors with line numbers.

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasepump/csv.hpp"
#include "phasepump/duffing.hpp"
#include "phasepump/model.hpp"

namespace phasepump {

enum class RunMode { classical, adiabatic, floquet, propagate, duffing };

inline const char* mode_name(RunMode m) {
    switch (m) {
        case RunMode::classical: return "classical";
        case RunMode::adiabatic: return "adiabatic";
        case RunMode::floquet: return "floquet";
        case RunMode::propagate: return "propagate";
        case RunMode::duffing: return "duffing";
    }
    return "?";
}

struct NumericsConfig {
    int k_max = 40;
    int q_max = 64;
    int theta_grid = 2048;
    int n_excited = 12;
    int settle_cycles = 1;
    int measure_cycles = 1;
    int level = 0;          // floquet band index
    double tol = 1e-9;
    double dt = 0.006;      // propagation step
    double t_end = 4000.0;  // duffing window
    double t_skip = 300.0;

    void validate() const {
        if (tol <= 0.0) throw std::invalid_argument("tol must be positive");
        if (dt <= 0.0) throw std::invalid_argument("dt must be positive");
        if (k_max < 2) throw std::invalid_argument("k_max must be >= 2");
        if (q_max < 2) throw std::invalid_argument("q_max must be >= 2");
    }
};

struct SweepAxis {
    std::string name;
    std::vector<double> values;
};

struct RunConfig {
    RunMode mode = RunMode::classical;
    ModelParams model;
    DuffingParams duffing;
    std::vector<SweepAxis> axes;  // sorted by name
    NumericsConfig num;
    std::string out_path;  // empty = "<mode>.csv"

    std::string output_name() const {
        return out_path.empty() ? std::string(mode_name(mode)) + ".csv"
                                : out_path;
    }
};

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

inline double parse_number(const std::string& v, int line) {
    char* end = nullptr;
    double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError("line " + std::to_string(line) +
                          ": not a number: '" + v + "'");
    return x;
}

// "a,b,c" or "start:stop:step" (inclusive, snapped to the step grid)
inline std::vector<double> parse_value_list(const std::string& v, int line) {
    std::vector<double> out;
    if (v.find(':') != std::string::npos) {
        std::istringstream is(v);
        std::string a, b, c;
        if (!std::getline(is, a, ':') || !std::getline(is, b, ':') ||
            !std::getline(is, c))
            throw ConfigError("line " + std::to_string(line) +
                              ": range needs start:stop:step");
        double start = parse_number(trim(a), line);
        double stop = parse_number(trim(b), line);
        double step = parse_number(trim(c), line);
        if (step <= 0.0 || stop < start)
            throw ConfigError("line " + std::to_string(line) +
                              ": range needs stop >= start and step > 0");
        int n = static_cast<int>(std::lround((stop - start) / step));
        for (int i = 0; i <= n; ++i) out.push_back(start + i * step);
        return out;
    }
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ','))
        out.push_back(parse_number(trim(item), line));
    if (out.empty())
        throw ConfigError("line " + std::to_string(line) + ": empty list");
    return out;
}

}  // namespace detail

// parameter names addressable by the mode section and by sweep axes
inline bool set_model_param(ModelParams& p, const std::string& key,
                            double val) {
    if (key == "r") p.r = val;
    else if (key == "mu") p.mu = val;
    else if (key == "delta") p.delta = val;
    else if (key == "omega") p.omega = val;
    else if (key == "m_e") p.m_e = val;
    else return false;
    return true;
}

inline bool set_duffing_param(DuffingParams& p, const std::string& key,
                              double val) {
    if (key == "omega1") p.omega1 = val;
    else if (key == "omega2") p.omega2 = val;
    else if (key == "gamma1") p.gamma1 = val;
    else if (key == "gamma2") p.gamma2 = val;
    else if (key == "a1") p.a1 = val;
    else if (key == "a2") p.a2 = val;
    else if (key == "delta1") p.delta1 = val;
    else if (key == "delta2") p.delta2 = val;
    else if (key == "kappa1") p.kappa1 = val;
    else if (key == "kappa2") p.kappa2 = val;
    else if (key == "lambda1") p.lambda1 = val;
    else if (key == "lambda2") p.lambda2 = val;
    else if (key == "theta1") p.theta1 = val;
    else if (key == "theta2") p.theta2 = val;
    else return false;
    return true;
}

inline const char* coupling_name(CouplingKind k) {
    switch (k) {
        case CouplingKind::single: return "single";
        case CouplingKind::static_linear: return "static";
        case CouplingKind::parametric: return "parametric";
        case CouplingKind::nonlinear_parametric: return "nonlinear_parametric";
    }
    return "?";
}

inline CouplingKind parse_coupling(const std::string& v, int line) {
    if (v == "single") return CouplingKind::single;
    if (v == "static") return CouplingKind::static_linear;
    if (v == "parametric") return CouplingKind::parametric;
    if (v == "nonlinear_parametric") return CouplingKind::nonlinear_parametric;
    throw ConfigError("line " + std::to_string(line) +
                      ": unknown coupling kind '" + v + "'");
}

inline RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    bool mode_seen = false;
    std::string section;
    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        std::string s = detail::trim(raw);
        std::size_t hash = s.find('#');
        if (hash != std::string::npos) s = detail::trim(s.substr(0, hash));
        if (s.empty()) continue;

        if (s.front() == '[') {
            if (s.back() != ']')
                throw ConfigError("line " + std::to_string(line) +
                                  ": unterminated section header");
            section = detail::trim(s.substr(1, s.size() - 2));
            static const char* modes[] = {"classical", "adiabatic", "floquet",
                                          "propagate", "duffing"};
            bool is_mode = false;
            for (int i = 0; i < 5; ++i)
                if (section == modes[i]) {
                    if (mode_seen)
                        throw ConfigError(
                            "line " + std::to_string(line) +
                            ": exactly one mode section is allowed");
                    cfg.mode = static_cast<RunMode>(i);
                    mode_seen = true;
                    is_mode = true;
                }
            if (!is_mode && section != "sweep" && section != "numerics" &&
                section != "output")
                throw ConfigError("line " + std::to_string(line) +
                                  ": unknown section [" + section + "]");
            continue;
        }

        std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line) +
                              ": expected key = value");
        std::string key = detail::trim(s.substr(0, eq));
        std::string val = detail::trim(s.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line) +
                              ": key outside any section");

        if (section == "sweep") {
            SweepAxis axis{key, detail::parse_value_list(val, line)};
            cfg.axes.push_back(std::move(axis));
        } else if (section == "numerics") {
            auto& n = cfg.num;
            double x = detail::parse_number(val, line);
            if (key == "k_max") n.k_max = static_cast<int>(x);
            else if (key == "q_max") n.q_max = static_cast<int>(x);
            else if (key == "theta_grid") n.theta_grid = static_cast<int>(x);
            else if (key == "n_excited") n.n_excited = static_cast<int>(x);
            else if (key == "settle_cycles")
                n.settle_cycles = static_cast<int>(x);
            else if (key == "measure_cycles")
                n.measure_cycles = static_cast<int>(x);
            else if (key == "level") n.level = static_cast<int>(x);
            else if (key == "tol") n.tol = x;
            else if (key == "dt") n.dt = x;
            else if (key == "t_end") n.t_end = x;
            else if (key == "t_skip") n.t_skip = x;
            else
                throw ConfigError("line " + std::to_string(line) +
                                  ": unknown numerics key '" + key + "'");
        } else if (section == "output") {
            if (key == "path") cfg.out_path = val;
            else
                throw ConfigError("line " + std::to_string(line) +
                                  ": unknown output key '" + key + "'");
        } else if (section == "duffing") {
            if (key == "kind") cfg.duffing.kind = parse_coupling(val, line);
            else if (!set_duffing_param(cfg.duffing, key,
                                        detail::parse_number(val, line)))
                throw ConfigError("line " + std::to_string(line) +
                                  ": unknown duffing key '" + key + "'");
        } else {
            if (!set_model_param(cfg.model, key,
                                 detail::parse_number(val, line)))
                throw ConfigError("line " + std::to_string(line) +
                                  ": unknown " + section + " key '" + key +
                                  "'");
        }
    }
    if (!mode_seen)
        throw ConfigError("config must contain exactly one mode section");

    // validation, naming the offending field via the underlying messages
    cfg.num.validate();
    if (cfg.mode == RunMode::duffing) {
        cfg.duffing.validate();
        for (const auto& ax : cfg.axes) {
            DuffingParams probe = cfg.duffing;
            if (!set_duffing_param(probe, ax.name, ax.values.front()))
                throw ConfigError("sweep axis '" + ax.name +
                                  "' is not a duffing parameter");
            if (ax.values.empty())
                throw ConfigError("sweep axis '" + ax.name + "' is empty");
        }
    } else {
        cfg.model.validate(cfg.mode != RunMode::classical);
        for (const auto& ax : cfg.axes) {
            ModelParams probe = cfg.model;
            if (!set_model_param(probe, ax.name, ax.values.front()))
                throw ConfigError("sweep axis '" + ax.name +
                                  "' is not a model parameter");
        }
    }
    std::sort(cfg.axes.begin(), cfg.axes.end(),
              [](const SweepAxis& a, const SweepAxis& b) {
                  return a.name < b.name;
              });
    for (std::size_t i = 1; i < cfg.axes.size(); ++i)
        if (cfg.axes[i].name == cfg.axes[i - 1].name)
            throw ConfigError("duplicate sweep axis '" + cfg.axes[i].name +
                              "'");
    return cfg;
}

// canonical form; parse(serialize(cfg)) reproduces cfg and serialize is
// idempotent after the first normalization
inline std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream os;
    os << "[" << mode_name(cfg.mode) << "]\n";
    if (cfg.mode == RunMode::duffing) {
        const auto& d = cfg.duffing;
        os << "kind = " << coupling_name(d.kind) << "\n";
        os << "omega1 = " << format_sig(d.omega1) << "\n";
        os << "omega2 = " << format_sig(d.omega2) << "\n";
        os << "gamma1 = " << format_sig(d.gamma1) << "\n";
        os << "gamma2 = " << format_sig(d.gamma2) << "\n";
        os << "a1 = " << format_sig(d.a1) << "\n";
        os << "a2 = " << format_sig(d.a2) << "\n";
        os << "delta1 = " << format_sig(d.delta1) << "\n";
        os << "delta2 = " << format_sig(d.delta2) << "\n";
        os << "kappa1 = " << format_sig(d.kappa1) << "\n";
        os << "kappa2 = " << format_sig(d.kappa2) << "\n";
        os << "lambda1 = " << format_sig(d.lambda1) << "\n";
        os << "lambda2 = " << format_sig(d.lambda2) << "\n";
        os << "theta1 = " << format_sig(d.theta1) << "\n";
        os << "theta2 = " << format_sig(d.theta2) << "\n";
    } else {
        const auto& m = cfg.model;
        os << "r = " << format_sig(m.r) << "\n";
        os << "mu = " << format_sig(m.mu) << "\n";
        os << "delta = " << format_sig(m.delta) << "\n";
        os << "omega = " << format_sig(m.omega) << "\n";
        os << "m_e = " << format_sig(m.m_e) << "\n";
    }
    if (!cfg.axes.empty()) {
        os << "[sweep]\n";
        for (const auto& ax : cfg.axes) {
            os << ax.name << " = ";
            for (std::size_t i = 0; i < ax.values.size(); ++i) {
                if (i) os << ",";
                os << format_sig(ax.values[i]);
            }
            os << "\n";
        }
    }
    const auto& n = cfg.num;
    os << "[numerics]\n";
    os << "k_max = " << n.k_max << "\n";
    os << "q_max = " << n.q_max << "\n";
    os << "theta_grid = " << n.theta_grid << "\n";
    os << "n_excited = " << n.n_excited << "\n";
    os << "settle_cycles = " << n.settle_cycles << "\n";
    os << "measure_cycles = " << n.measure_cycles << "\n";
    os << "level = " << n.level << "\n";
    os << "tol = " << format_sig(n.tol) << "\n";
    os << "dt = " << format_sig(n.dt) << "\n";
    os << "t_end = " << format_sig(n.t_end) << "\n";
    os << "t_skip = " << format_sig(n.t_skip) << "\n";
    os << "[output]\n";
    os << "path = " << cfg.output_name() << "\n";
    return os.str();
}

}  // namespace phasepump
