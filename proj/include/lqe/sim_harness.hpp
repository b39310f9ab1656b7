#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "lqe/errors.hpp"
#include "lqe/log_quantile.hpp"
#include "lqe/parallel.hpp"
#include "lqe/random.hpp"
#include "lqe/rank_statistics.hpp"
#include "lqe/synthetic_data.hpp"

namespace lqe {

enum class Study { quantiles, significance, power };

inline std::string to_string(Study s) {
    switch (s) {
        case Study::quantiles: return "quantiles";
        case Study::significance: return "significance";
        case Study::power: return "power";
    }
    return "?";
}

inline Study study_from_string(const std::string& s) {
    if (s == "quantiles") return Study::quantiles;
    if (s == "significance") return Study::significance;
    if (s == "power") return Study::power;
    throw DomainError("unknown study '" + s + "'");
}

inline std::string to_string(PermutationMode m) {
    return m == PermutationMode::joint_rows ? "joint_rows" : "per_sample";
}

inline PermutationMode permutation_mode_from_string(const std::string& s) {
    if (s == "joint_rows") return PermutationMode::joint_rows;
    if (s == "per_sample") return PermutationMode::per_sample;
    throw DomainError("unknown permutation mode '" + s + "'");
}

/// One Monte Carlo experiment. For the quantile study `alphas` are quantile
/// levels (0.99, ...); for significance and power they are test levels.
struct SimulationConfig {
    Study study = Study::significance;
    DependenceSpec spec;
    std::vector<std::array<double, 3>> shift_rows;  // power study only
    std::vector<std::size_t> n_values{200};
    std::vector<double> alphas{0.10};
    std::size_t replications = 100;
    std::size_t permutations = 20;
    std::size_t burn_in = 5;
    std::uint64_t seed = 1;
    unsigned threads = 1;
    std::optional<PermutationMode> mode;  // default: per_sample iff samples are independent

    PermutationMode permutation_mode() const {
        if (mode) return *mode;
        return spec.kind == DependenceSpec::Kind::independent ? PermutationMode::per_sample
                                                              : PermutationMode::joint_rows;
    }

    void validate() const {
        // power rows replace the shifts; each shifted spec is checked below
        if (study != Study::power) spec.validate();
        if (replications < 1) throw DomainError("replications must be >= 1");
        if (permutations < 1) throw DomainError("permutations must be >= 1");
        if (n_values.empty()) throw DomainError("at least one sample size is required");
        for (auto n : n_values)
            if (n <= burn_in) throw DomainError("every n must exceed the burn-in");
        if (alphas.empty()) throw DomainError("at least one alpha is required");
        for (double a : alphas)
            if (!(a > 0.0 && a < 1.0)) throw DomainError("alphas must lie in (0, 1)");
        if (study == Study::significance)
            for (double s : spec.shifts)
                if (s != 0.0) throw DomainError("significance study needs zero shifts");
        if (study == Study::power) {
            if (shift_rows.empty()) throw DomainError("power study needs shift rows");
            bool any_nonzero = false;
            for (const auto& row : shift_rows) {
                DependenceSpec shifted = spec;
                shifted.shifts = row;
                shifted.validate();
                for (double s : row) any_nonzero = any_nonzero || s != 0.0;
            }
            if (!any_nonzero) throw DomainError("power study needs at least one nonzero shift row");
        }
    }
};

struct ReportCell {
    std::string dist;
    std::vector<double> shifts;
    std::size_t n = 0;  // 0 marks the asymptotic reference
    double alpha = 0.0;
    double value = 0.0;
    double std_error = 0.0;

    friend bool operator==(const ReportCell&, const ReportCell&) = default;
};

struct SimulationReport {
    Study study = Study::significance;
    SimulationConfig config;
    std::vector<ReportCell> cells;
    double wall_seconds = 0.0;  // not serialized; would break byte-identical reruns
};

/// (c^2/12) times the chi^2_{c-1} quantile at `level`: the limit quantile of
/// the scaled Kruskal-Wallis statistic for independent samples.
inline double asymptotic_kw_quantile(std::size_t samples, double level) {
    if (samples < 2) throw DomainError("asymptotic_kw_quantile: need at least two samples");
    const double c = static_cast<double>(samples);
    boost::math::chi_squared_distribution<double> chi2(c - 1.0);
    return c * c / 12.0 * boost::math::quantile(chi2, level);
}

namespace detail {

inline std::uint64_t data_seed(std::uint64_t master, std::size_t n, std::size_t replicate) {
    return derive_seed(master, {n, replicate, 0});
}

inline std::uint64_t permutation_seed(std::uint64_t master, std::size_t n, std::size_t replicate) {
    return derive_seed(master, {n, replicate, 1});
}

inline double mean_of(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

inline double std_error_of(const std::vector<double>& xs) {
    if (xs.size() < 2) return 0.0;
    const double m = mean_of(xs);
    double ss = 0.0;
    for (double x : xs) ss += (x - m) * (x - m);
    return std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
}

inline LqeOptions replicate_options(const SimulationConfig& cfg, std::size_t n, std::size_t r) {
    LqeOptions opt;
    opt.permutations = cfg.permutations;
    opt.burn_in = cfg.burn_in;
    opt.seed = permutation_seed(cfg.seed, n, r);
    opt.mode = cfg.permutation_mode();
    opt.threads = 1;
    return opt;
}

// Rejection fractions for each (shift row, n, alpha). Data for replicate r at
// size n come from the same stream for every shift row.
inline std::vector<ReportCell> run_rejection_cells(const SimulationConfig& cfg,
                                                   const std::vector<std::array<double, 3>>& rows) {
    std::vector<double> levels;
    for (double a : cfg.alphas) levels.push_back(1.0 - a);

    std::vector<ReportCell> cells;
    for (const auto& row : rows) {
        DependenceSpec spec = cfg.spec;
        spec.shifts = row;
        for (std::size_t n : cfg.n_values) {
            // rejects[r][a]
            std::vector<std::vector<char>> rejects(cfg.replications);
            parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
                const auto data = gen_c_sample(spec, n, data_seed(cfg.seed, n, r));
                const double stat = prefix_trace(data).values.back();
                const auto q = permuted_quantiles(data, ScaledKruskalWallis{}, levels, replicate_options(cfg, n, r));
                for (const auto& quant : q) rejects[r].push_back(stat > quant.averaged ? 1 : 0);
            });
            for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
                std::size_t count = 0;
                for (const auto& rep : rejects) count += static_cast<std::size_t>(rep[a]);
                const double p = static_cast<double>(count) / static_cast<double>(cfg.replications);
                cells.push_back({spec.label(), std::vector<double>(row.begin(), row.end()), n, cfg.alphas[a], p,
                                 std::sqrt(p * (1.0 - p) / static_cast<double>(cfg.replications))});
            }
        }
    }
    return cells;
}

template <typename Fn>
SimulationReport timed(const SimulationConfig& cfg, Fn&& body) {
    const auto start = std::chrono::steady_clock::now();
    SimulationReport report;
    report.study = cfg.study;
    report.config = cfg;
    report.cells = body();
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace detail

/// Averaged logarithmic quantiles of the scaled Kruskal-Wallis statistic,
/// one cell per (n, level), plus one asymptotic reference cell per level
/// (n = 0).
inline SimulationReport run_quantile_study(const SimulationConfig& cfg) {
    if (cfg.study != Study::quantiles) throw DomainError("run_quantile_study: config is not a quantile study");
    cfg.validate();
    return detail::timed(cfg, [&] {
        std::vector<ReportCell> cells;
        const std::vector<double> shifts(cfg.spec.shifts.begin(), cfg.spec.shifts.end());
        for (std::size_t n : cfg.n_values) {
            std::vector<std::vector<double>> per_rep(cfg.replications);
            parallel_for(cfg.replications, cfg.threads, [&](std::size_t r) {
                const auto data = gen_c_sample(cfg.spec, n, detail::data_seed(cfg.seed, n, r));
                for (const auto& q : permuted_quantiles(data, ScaledKruskalWallis{}, cfg.alphas,
                                                        detail::replicate_options(cfg, n, r)))
                    per_rep[r].push_back(q.averaged);
            });
            for (std::size_t a = 0; a < cfg.alphas.size(); ++a) {
                std::vector<double> xs;
                for (const auto& rep : per_rep) xs.push_back(rep[a]);
                cells.push_back({cfg.spec.label(), shifts, n, cfg.alphas[a], detail::mean_of(xs),
                                 detail::std_error_of(xs)});
            }
        }
        for (double a : cfg.alphas)
            cells.push_back({"asymptotic", shifts, 0, a, asymptotic_kw_quantile(3, a), 0.0});
        return cells;
    });
}

/// Empirical rejection rate of the LQE Kruskal-Wallis test under H0.
inline SimulationReport run_significance_study(const SimulationConfig& cfg) {
    if (cfg.study != Study::significance)
        throw DomainError("run_significance_study: config is not a significance study");
    cfg.validate();
    return detail::timed(cfg, [&] { return detail::run_rejection_cells(cfg, {cfg.spec.shifts}); });
}

/// Empirical power per (shift row, n, alpha).
inline SimulationReport run_power_study(const SimulationConfig& cfg) {
    if (cfg.study != Study::power) throw DomainError("run_power_study: config is not a power study");
    cfg.validate();
    return detail::timed(cfg, [&] { return detail::run_rejection_cells(cfg, cfg.shift_rows); });
}

inline SimulationReport run_study(const SimulationConfig& cfg) {
    switch (cfg.study) {
        case Study::quantiles: return run_quantile_study(cfg);
        case Study::significance: return run_significance_study(cfg);
        case Study::power: return run_power_study(cfg);
    }
    throw DomainError("unknown study");
}

/// Settings of the published simulation tables (1-17) at full scale. Table 1
/// yields two configs (normal and exponential rows).
///
/// The dependence strength of the dependent tables is not published; these
/// presets use rho = 0.5 and Marshall-Olkin rates (1, 1, 1).
inline std::vector<SimulationConfig> table_preset_configs(int table) {
    const std::vector<std::size_t> grid{30, 50, 80, 100, 150, 200};
    const std::vector<double> levels{0.01, 0.05, 0.10};
    const std::vector<std::array<double, 3>> normal_rows{{0, 1, 0}, {1, 1, 0}, {0, 0.5, 0}, {0, 0.2, 0}};
    const std::vector<std::array<double, 3>> exp_rows{{0.25, 0.2, 0.25}, {1, 1, 2}, {0.5, 1, 0.5}, {1, 1, 0.75}};

    auto base = [&](Study study, DependenceSpec spec) {
        SimulationConfig cfg;
        cfg.study = study;
        cfg.spec = spec;
        cfg.n_values = grid;
        cfg.alphas = levels;
        cfg.replications = 200;
        cfg.permutations = 20;
        cfg.seed = static_cast<std::uint64_t>(table);
        return cfg;
    };
    auto power = [&](DependenceSpec spec, double alpha, const std::vector<std::array<double, 3>>& rows) {
        spec.base_mean = 0.0;  // rows give the column means directly
        auto cfg = base(Study::power, spec);
        cfg.alphas = {alpha};
        cfg.shift_rows = rows;
        return cfg;
    };

    const double alpha_by_offset[] = {0.10, 0.05, 0.01};
    if (table == 1) {
        auto normal = base(Study::quantiles, DependenceSpec::independent_normal(2.0, 1.0));
        normal.n_values = {1000};
        normal.alphas = {0.99, 0.95, 0.90};
        normal.replications = 500;
        normal.permutations = 100;
        auto exponential = normal;
        exponential.spec = DependenceSpec::independent_exponential(3.0);
        return {normal, exponential};
    }
    if (table == 2) return {base(Study::significance, DependenceSpec::dependent_normal(0.5, 0.0, 1.0))};
    if (table == 3) return {base(Study::significance, DependenceSpec::dependent_exponential({1, 1, 1}, 4.0))};
    if (table == 4) return {base(Study::significance, DependenceSpec::independent_normal(2.0, 1.0))};
    if (table == 5) return {base(Study::significance, DependenceSpec::independent_exponential(3.0))};
    if (table >= 6 && table <= 8)
        return {power(DependenceSpec::dependent_normal(0.5), alpha_by_offset[table - 6], normal_rows)};
    if (table >= 9 && table <= 11)
        return {power(DependenceSpec::dependent_exponential({1, 1, 1}, 1.0), alpha_by_offset[table - 9], exp_rows)};
    if (table >= 12 && table <= 14)
        return {power(DependenceSpec::independent_normal(0.0, 1.0), alpha_by_offset[table - 12], normal_rows)};
    if (table >= 15 && table <= 17)
        return {power(DependenceSpec::independent_exponential(1.0), alpha_by_offset[table - 15], exp_rows)};
    throw DomainError("no simulation table " + std::to_string(table) + " (valid: 1-17)");
}

/// Shrinks a config to desk scale: at most 100 replications, 20
/// permutations, and n <= 500 (larger sizes are clamped to 500).
inline SimulationConfig desk_scale(SimulationConfig cfg) {
    cfg.replications = std::min<std::size_t>(cfg.replications, 100);
    cfg.permutations = std::min<std::size_t>(cfg.permutations, 20);
    std::vector<std::size_t> ns;
    for (auto n : cfg.n_values) {
        const auto m = std::min<std::size_t>(n, 500);
        if (std::find(ns.begin(), ns.end(), m) == ns.end()) ns.push_back(m);
    }
    cfg.n_values = ns;
    return cfg;
}

}  // namespace lqe
