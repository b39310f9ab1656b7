#pragma once

#include <array>
#include <fstream>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lqe/errors.hpp"
#include "lqe/parse.hpp"
#include "lqe/report_io.hpp"
#include "lqe/sim_harness.hpp"

namespace lqe {

namespace detail {

inline std::array<double, 3> parse_triple(const std::string& text, const std::string& what) {
    std::array<double, 3> out{};
    std::size_t count = 0;
    std::string token;
    auto flush = [&] {
        if (trim(token).empty()) return;
        if (count == 3) throw DomainError(what + ": expected three numbers in '" + text + "'");
        out[count++] = parse_double(token, what);
        token.clear();
    };
    for (char ch : text) {
        if (ch == ',' || ch == ' ' || ch == '[' || ch == ']') flush();
        else token += ch;
    }
    flush();
    if (count != 3) throw DomainError(what + ": expected three numbers in '" + text + "'");
    return out;
}

}  // namespace detail

/// Reads a simulation config from `key = value` lines (TOML subset; `#`
/// comments, lists as [a, b, c]). Keys mirror SimulationConfig:
///
///   study = significance          # quantiles | significance | power
///   family = normal               # normal | exponential
///   dependence = normal_rho       # independent | normal_rho | marshall_olkin
///   rho = 0.5
///   lambdas = [1, 1, 1]
///   mean = 0                      # or: rate = 4  (exponential, mean = 1/rate)
///   sd = 1
///   shifts = [0, 0, 0]
///   shift_rows = ["0,1,0", "0,0.5,0"]
///   n = [30, 50, 80]
///   alphas = [0.01, 0.05, 0.1]
///   replications = 200
///   permutations = 20
///   burn_in = 5
///   seed = 1
///   threads = 4
///   permutation_mode = joint_rows # optional
///
/// Unknown keys are errors. Keys present in `in` overwrite the matching
/// fields of `cfg`.
inline void apply_simulation_config(std::istream& in, SimulationConfig& cfg) {
    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_config(in);
    } catch (const CLI::Error& e) {
        throw DataError(std::string("config: ") + e.what());
    }

    bool have_mean = false;
    std::optional<double> rate;
    auto one = [](const CLI::ConfigItem& item) {
        if (item.inputs.size() != 1) throw DomainError("config: '" + item.name + "' takes a single value");
        return item.inputs.front();
    };

    for (const auto& item : items) {
        const std::string key = item.fullname();
        if (key.empty() || key == "++" || key == "--") continue;  // section markers
        if (key == "study") cfg.study = study_from_string(one(item));
        else if (key == "family") cfg.spec.family = detail::family_from_string(one(item));
        else if (key == "dependence") cfg.spec.kind = detail::kind_from_string(one(item));
        else if (key == "rho") cfg.spec.rho = parse_double(one(item), key);
        else if (key == "lambdas") {
            std::string joined;
            for (const auto& s : item.inputs) joined += s + ",";
            cfg.spec.lambdas = detail::parse_triple(joined, key);
        } else if (key == "mean") {
            cfg.spec.base_mean = parse_double(one(item), key);
            have_mean = true;
        } else if (key == "rate") rate = parse_double(one(item), key);
        else if (key == "sd") cfg.spec.sd = parse_double(one(item), key);
        else if (key == "shifts") {
            std::string joined;
            for (const auto& s : item.inputs) joined += s + ",";
            cfg.spec.shifts = detail::parse_triple(joined, key);
        } else if (key == "shift_rows") {
            cfg.shift_rows.clear();
            for (const auto& s : item.inputs) cfg.shift_rows.push_back(detail::parse_triple(s, key));
        } else if (key == "n") {
            cfg.n_values.clear();
            for (const auto& s : item.inputs) cfg.n_values.push_back(parse_unsigned(s, key));
        } else if (key == "alphas") {
            cfg.alphas.clear();
            for (const auto& s : item.inputs) cfg.alphas.push_back(parse_double(s, key));
        } else if (key == "replications") cfg.replications = parse_unsigned(one(item), key);
        else if (key == "permutations") cfg.permutations = parse_unsigned(one(item), key);
        else if (key == "burn_in") cfg.burn_in = parse_unsigned(one(item), key);
        else if (key == "seed") cfg.seed = parse_unsigned(one(item), key);
        else if (key == "threads") cfg.threads = static_cast<unsigned>(parse_unsigned(one(item), key));
        else if (key == "permutation_mode") cfg.mode = permutation_mode_from_string(one(item));
        else throw DomainError("config: unknown key '" + key + "'");
    }
    if (rate) {
        if (have_mean) throw DomainError("config: give either mean or rate, not both");
        if (!(*rate > 0.0)) throw DomainError("config: rate must be positive");
        cfg.spec.base_mean = 1.0 / *rate;
    }
}

inline SimulationConfig parse_simulation_config(std::istream& in) {
    SimulationConfig cfg;
    apply_simulation_config(in, cfg);
    return cfg;
}

/// Applies `key=value` overrides (same keys as the config file) on top of
/// `cfg`.
inline void apply_overrides(const std::vector<std::string>& assignments, SimulationConfig& cfg) {
    std::ostringstream text;
    for (const auto& a : assignments) {
        const auto eq = a.find('=');
        if (eq == std::string::npos) throw DomainError("override '" + a + "' is not key=value");
        text << trim(a.substr(0, eq)) << " = " << trim(a.substr(eq + 1)) << "\n";
    }
    std::istringstream in(text.str());
    apply_simulation_config(in, cfg);
}

inline SimulationConfig parse_simulation_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open config '" + path + "'");
    return parse_simulation_config(in);
}

}  // namespace lqe
