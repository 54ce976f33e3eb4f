#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ntci/errors.hpp"
#include "ntci/metrics.hpp"

namespace ntci {

/// Declarative experiment description. The on-disk format is a sectioned
/// key/value file with a mandatory `schema = 1` line, e.g.
///
///   schema = 1
///   [model]
///   name = ou
///   a = 1.0
///   xi = 1.0
///   [grid]
///   tau = 0.25
///   horizon = 1
///   dt = 0.00390625
///   [perturbation]
///   kind = constant
///   value = 1.0
///   [run]
///   n_paths = 1024
///   seed = 42
///   metrics = dl2,dinf2
///   [output]
///   dir = out
struct ExperimentConfig {
    int schema = 0;

    std::string model_name;
    std::map<std::string, double> model_params;
    std::vector<double> xi_value{1.0};
    int spde_modes = 8;

    double tau = 0.25;
    double horizon = 1.0;
    double dt = 1.0 / 256.0;

    std::string h_kind = "zero";  // zero | constant | feedback
    std::vector<double> h_value;
    double h_gain = 0.0;
    std::optional<double> energy_cap;

    std::int64_t n_paths = 256;
    std::uint64_t seed = 0;
    int workers = 0;  // 0: use NEUTRAL_TCI_WORKERS or 1
    std::vector<PathMetricKind> metrics{PathMetricKind::L2InTime};
    std::optional<bool> t_independent;
    std::optional<double> epsilon;
    bool skip_audit = false;
    std::int64_t audit_pairs = 256;
    double audit_tol = 1e-6;
    bool empirical = false;

    std::string out_dir = "out";
    bool write_csv = true;
    bool write_summary = true;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

inline std::vector<double> parse_double_list(const std::string& value, int line) {
    std::vector<double> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw config_error("line " + std::to_string(line) + ": expected a number, got '" +
                               item + "'");
        }
    }
    if (out.empty())
        throw config_error("line " + std::to_string(line) + ": expected at least one number");
    return out;
}

inline double parse_double(const std::string& value, int line) {
    const auto list = parse_double_list(value, line);
    if (list.size() != 1)
        throw config_error("line " + std::to_string(line) + ": expected one number");
    return list[0];
}

inline bool parse_bool(const std::string& value, int line) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    throw config_error("line " + std::to_string(line) + ": expected a boolean, got '" + value +
                       "'");
}

inline PathMetricKind parse_metric(const std::string& name, int line) {
    if (name == "dinf1" || name == "d_inf1") return PathMetricKind::SumSupSquares;
    if (name == "dinf2" || name == "d_inf2") return PathMetricKind::UniformSup;
    if (name == "dl2" || name == "d_l2") return PathMetricKind::L2InTime;
    throw config_error("line " + std::to_string(line) + ": unknown metric '" + name +
                       "' (expected dinf1, dinf2 or dl2)");
}

}  // namespace detail

inline ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line_no = 0;
    bool metrics_set = false;

    while (std::getline(in, raw)) {
        ++line_no;
        std::string line = raw;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = detail::trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error("line " + std::to_string(line_no) + ": unterminated section");
            section = detail::trim(line.substr(1, line.size() - 2));
            if (section != "model" && section != "grid" && section != "perturbation" &&
                section != "run" && section != "output")
                throw config_error("line " + std::to_string(line_no) + ": unknown section [" +
                                   section + "]");
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(line_no) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("line " + std::to_string(line_no) + ": empty key or value");

        if (section.empty()) {
            if (key == "schema") {
                cfg.schema = static_cast<int>(detail::parse_double(value, line_no));
                if (cfg.schema != 1)
                    throw config_error("line " + std::to_string(line_no) +
                                       ": unsupported schema version " + value);
            } else {
                throw config_error("line " + std::to_string(line_no) + ": key '" + key +
                                   "' outside any section (only 'schema' is allowed)");
            }
            continue;
        }

        if (section == "model") {
            if (key == "name") {
                cfg.model_name = value;
            } else if (key == "xi") {
                cfg.xi_value = detail::parse_double_list(value, line_no);
            } else if (key == "modes") {
                cfg.spde_modes = static_cast<int>(detail::parse_double(value, line_no));
            } else {
                cfg.model_params[key] = detail::parse_double(value, line_no);
            }
        } else if (section == "grid") {
            if (key == "tau") {
                cfg.tau = detail::parse_double(value, line_no);
            } else if (key == "horizon") {
                cfg.horizon = detail::parse_double(value, line_no);
            } else if (key == "dt") {
                cfg.dt = detail::parse_double(value, line_no);
            } else {
                throw config_error("line " + std::to_string(line_no) + ": unknown grid key '" +
                                   key + "'");
            }
        } else if (section == "perturbation") {
            if (key == "kind") {
                if (value != "zero" && value != "constant" && value != "feedback")
                    throw config_error("line " + std::to_string(line_no) +
                                       ": perturbation kind must be zero, constant or feedback");
                cfg.h_kind = value;
            } else if (key == "value") {
                cfg.h_value = detail::parse_double_list(value, line_no);
            } else if (key == "gain") {
                cfg.h_gain = detail::parse_double(value, line_no);
            } else if (key == "energy_cap") {
                cfg.energy_cap = detail::parse_double(value, line_no);
            } else {
                throw config_error("line " + std::to_string(line_no) +
                                   ": unknown perturbation key '" + key + "'");
            }
        } else if (section == "run") {
            if (key == "n_paths") {
                cfg.n_paths = static_cast<std::int64_t>(detail::parse_double(value, line_no));
            } else if (key == "seed") {
                cfg.seed = static_cast<std::uint64_t>(detail::parse_double(value, line_no));
            } else if (key == "workers") {
                cfg.workers = static_cast<int>(detail::parse_double(value, line_no));
            } else if (key == "metrics") {
                cfg.metrics.clear();
                std::stringstream ss(value);
                std::string item;
                while (std::getline(ss, item, ','))
                    cfg.metrics.push_back(detail::parse_metric(detail::trim(item), line_no));
                metrics_set = true;
            } else if (key == "t_independent") {
                cfg.t_independent = detail::parse_bool(value, line_no);
            } else if (key == "epsilon") {
                cfg.epsilon = detail::parse_double(value, line_no);
            } else if (key == "skip_audit") {
                cfg.skip_audit = detail::parse_bool(value, line_no);
            } else if (key == "audit_pairs") {
                cfg.audit_pairs = static_cast<std::int64_t>(detail::parse_double(value, line_no));
            } else if (key == "audit_tol") {
                cfg.audit_tol = detail::parse_double(value, line_no);
            } else if (key == "empirical") {
                cfg.empirical = detail::parse_bool(value, line_no);
            } else {
                throw config_error("line " + std::to_string(line_no) + ": unknown run key '" +
                                   key + "'");
            }
        } else if (section == "output") {
            if (key == "dir") {
                cfg.out_dir = value;
            } else if (key == "formats") {
                cfg.write_csv = value.find("csv") != std::string::npos;
                cfg.write_summary = value.find("json") != std::string::npos;
            } else {
                throw config_error("line " + std::to_string(line_no) + ": unknown output key '" +
                                   key + "'");
            }
        }
    }

    if (cfg.schema != 1)
        throw config_error("config: missing required 'schema = 1' line");
    if (cfg.model_name.empty()) throw config_error("config: [model] name is required");
    if (cfg.n_paths < 1) throw config_error("config: n_paths must be >= 1");
    if (!metrics_set && cfg.model_name == "heat-example")
        cfg.metrics = {PathMetricKind::UniformSup};
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open '" + path + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

}  // namespace ntci
