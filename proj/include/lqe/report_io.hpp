#pragma once

#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <string>

#include <json.hpp>

#include "lqe/errors.hpp"
#include "lqe/sim_harness.hpp"

namespace lqe {

namespace detail {

inline std::string to_string(Family f) { return f == Family::normal ? "normal" : "exponential"; }

inline std::string to_string(DependenceSpec::Kind k) {
    switch (k) {
        case DependenceSpec::Kind::independent: return "independent";
        case DependenceSpec::Kind::normal_rho: return "normal_rho";
        case DependenceSpec::Kind::marshall_olkin: return "marshall_olkin";
    }
    return "?";
}

inline Family family_from_string(const std::string& s) {
    if (s == "normal") return Family::normal;
    if (s == "exponential") return Family::exponential;
    throw DomainError("unknown family '" + s + "'");
}

inline DependenceSpec::Kind kind_from_string(const std::string& s) {
    if (s == "independent") return DependenceSpec::Kind::independent;
    if (s == "normal_rho") return DependenceSpec::Kind::normal_rho;
    if (s == "marshall_olkin") return DependenceSpec::Kind::marshall_olkin;
    throw DomainError("unknown dependence '" + s + "'");
}

}  // namespace detail

/// Config echo. Leaves out `threads`, which never affects results.
inline nlohmann::json config_to_json(const SimulationConfig& cfg) {
    nlohmann::json j;
    j["study"] = to_string(cfg.study);
    j["family"] = detail::to_string(cfg.spec.family);
    j["dependence"] = detail::to_string(cfg.spec.kind);
    j["rho"] = cfg.spec.rho;
    j["lambdas"] = cfg.spec.lambdas;
    j["mean"] = cfg.spec.base_mean;
    j["sd"] = cfg.spec.sd;
    j["shifts"] = cfg.spec.shifts;
    j["shift_rows"] = cfg.shift_rows;
    j["n"] = cfg.n_values;
    j["alphas"] = cfg.alphas;
    j["replications"] = cfg.replications;
    j["permutations"] = cfg.permutations;
    j["burn_in"] = cfg.burn_in;
    j["seed"] = cfg.seed;
    j["permutation_mode"] = to_string(cfg.permutation_mode());
    return j;
}

inline SimulationConfig config_from_json(const nlohmann::json& j) {
    SimulationConfig cfg;
    cfg.study = study_from_string(j.at("study").get<std::string>());
    cfg.spec.family = detail::family_from_string(j.at("family").get<std::string>());
    cfg.spec.kind = detail::kind_from_string(j.at("dependence").get<std::string>());
    cfg.spec.rho = j.at("rho").get<double>();
    cfg.spec.lambdas = j.at("lambdas").get<std::array<double, 3>>();
    cfg.spec.base_mean = j.at("mean").get<double>();
    cfg.spec.sd = j.at("sd").get<double>();
    cfg.spec.shifts = j.at("shifts").get<std::array<double, 3>>();
    cfg.shift_rows = j.at("shift_rows").get<std::vector<std::array<double, 3>>>();
    cfg.n_values = j.at("n").get<std::vector<std::size_t>>();
    cfg.alphas = j.at("alphas").get<std::vector<double>>();
    cfg.replications = j.at("replications").get<std::size_t>();
    cfg.permutations = j.at("permutations").get<std::size_t>();
    cfg.burn_in = j.at("burn_in").get<std::size_t>();
    cfg.seed = j.at("seed").get<std::uint64_t>();
    cfg.mode = permutation_mode_from_string(j.at("permutation_mode").get<std::string>());
    return cfg;
}

inline nlohmann::json report_to_json(const SimulationReport& report) {
    nlohmann::json j;
    j["study"] = to_string(report.study);
    j["replications"] = report.config.replications;
    j["config"] = config_to_json(report.config);
    auto cells = nlohmann::json::array();
    for (const auto& c : report.cells)
        cells.push_back({{"dist", c.dist},
                         {"shifts", c.shifts},
                         {"n", c.n},
                         {"alpha", c.alpha},
                         {"value", c.value},
                         {"stderr", c.std_error}});
    j["cells"] = std::move(cells);
    return j;
}

inline std::string report_json_text(const SimulationReport& report) { return report_to_json(report).dump(2) + "\n"; }

/// Reads a report written by report_to_json.
inline SimulationReport report_from_json(const nlohmann::json& j) {
    SimulationReport report;
    try {
        report.study = study_from_string(j.at("study").get<std::string>());
        report.config = config_from_json(j.at("config"));
        for (const auto& c : j.at("cells"))
            report.cells.push_back({c.at("dist").get<std::string>(), c.at("shifts").get<std::vector<double>>(),
                                    c.at("n").get<std::size_t>(), c.at("alpha").get<double>(),
                                    c.at("value").get<double>(), c.at("stderr").get<double>()});
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("malformed report: ") + e.what());
    }
    return report;
}

inline SimulationReport report_from_json_text(const std::string& text) {
    try {
        return report_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::parse_error& e) {
        throw DataError(std::string("report is not valid JSON: ") + e.what());
    }
}

namespace detail {

inline std::string format_number(double v, int precision = 6) {
    std::ostringstream os;
    os << std::setprecision(precision) << v;
    return os.str();
}

inline std::string shift_label(const std::vector<double>& shifts) {
    std::string s;
    for (std::size_t i = 0; i < shifts.size(); ++i) s += (i ? " " : "") + format_number(shifts[i], 4);
    return s;
}

inline std::string percent(double alpha) { return format_number(alpha * 100.0, 4) + "%"; }

}  // namespace detail

/// Aligned text table laid out like the published tables: quantiles as
/// distribution x level, significance as level x n, power as shifts x n
/// (one block per level).
inline std::string report_table_text(const SimulationReport& report) {
    using detail::format_number;
    std::ostringstream os;
    const auto& cells = report.cells;
    constexpr int w = 12;

    std::vector<double> alphas;
    std::vector<std::size_t> ns;
    for (const auto& c : cells) {
        if (std::find(alphas.begin(), alphas.end(), c.alpha) == alphas.end()) alphas.push_back(c.alpha);
        if (c.n != 0 && std::find(ns.begin(), ns.end(), c.n) == ns.end()) ns.push_back(c.n);
    }

    const auto& cfg = report.config;
    os << "# " << to_string(report.study) << ": " << cfg.spec.label() << "; " << cfg.replications
       << " replications, " << cfg.permutations << " permutations, burn-in " << cfg.burn_in << ", seed " << cfg.seed
       << "\n";

    if (report.study == Study::quantiles) {
        os << std::left << std::setw(28) << "distribution/level" << std::right;
        for (double a : alphas) os << std::setw(w) << detail::percent(1.0 - a);
        os << "\n";
        std::vector<std::pair<std::string, std::size_t>> rows;
        for (const auto& c : cells)
            if (std::find(rows.begin(), rows.end(), std::pair{c.dist, c.n}) == rows.end()) rows.emplace_back(c.dist, c.n);
        for (const auto& [dist, n] : rows) {
            const std::string name = n == 0 ? "(c^2/12) chi2(c-1)" : dist + " n=" + std::to_string(n);
            os << std::left << std::setw(28) << name << std::right;
            for (double a : alphas)
                for (const auto& c : cells)
                    if (c.dist == dist && c.n == n && c.alpha == a) os << std::setw(w) << format_number(c.value);
            os << "\n";
        }
        return os.str();
    }

    auto header = [&](const std::string& first, int first_width) {
        os << std::left << std::setw(first_width) << first << std::right;
        for (auto n : ns) os << std::setw(w) << ("n=" + std::to_string(n));
        os << "\n";
    };

    if (report.study == Study::significance) {
        header("level", 10);
        for (double a : alphas) {
            os << std::left << std::setw(10) << detail::percent(a) << std::right;
            for (auto n : ns)
                for (const auto& c : cells)
                    if (c.n == n && c.alpha == a) os << std::setw(w) << format_number(c.value);
            os << "\n";
        }
        return os.str();
    }

    std::vector<std::vector<double>> rows;
    for (const auto& c : cells)
        if (std::find(rows.begin(), rows.end(), c.shifts) == rows.end()) rows.push_back(c.shifts);
    for (double a : alphas) {
        os << "level " << detail::percent(a) << "\n";
        header("means/shifts", 18);
        for (const auto& row : rows) {
            os << std::left << std::setw(18) << detail::shift_label(row) << std::right;
            for (auto n : ns)
                for (const auto& c : cells)
                    if (c.shifts == row && c.n == n && c.alpha == a) os << std::setw(w) << format_number(c.value);
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace lqe
