#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lqe/lqe.hpp"

namespace lqe::cli {

enum ExitCode : int {
    kFailToReject = 0,
    kUsageError = 1,
    kDataError = 2,
    kReject = 3,
};

struct CommonFlags {
    std::optional<std::uint64_t> seed;
    std::size_t permutations = 20;
    std::size_t burn_in = 5;
    bool dependent = false;
    bool independent = false;
    std::string format = "table";
    unsigned threads = 1;
};

inline void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--permutations", f.permutations, "Random reorderings averaged per quantile")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_option("--burn-in", f.burn_in, "Leading prefix terms dropped from the log average")->capture_default_str();
    cmd->add_option("--seed", f.seed, "Master seed (falls back to $LQE_SEED, then a random seed that is printed)")
        ->envname("LQE_SEED");
    auto* dep = cmd->add_flag("--dependent", f.dependent,
                              "Samples may be dependent: permute whole rows (default)");
    auto* ind = cmd->add_flag("--independent", f.independent, "Samples are independent: permute each column separately");
    dep->excludes(ind);
    cmd->add_option("--format", f.format, "Output format")->check(CLI::IsMember({"table", "json"}))->capture_default_str();
    cmd->add_option("--threads", f.threads, "Worker threads for permutations")->capture_default_str();
}

inline std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) return *seed;
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

inline LqeOptions make_options(const CommonFlags& f) {
    LqeOptions opt;
    opt.permutations = f.permutations;
    opt.burn_in = f.burn_in;
    opt.seed = resolve_seed(f.seed);
    opt.mode = f.independent ? PermutationMode::per_sample : PermutationMode::joint_rows;
    opt.threads = f.threads;
    return opt;
}

inline CSampleDataset load_for_test(const std::string& path, std::size_t burn_in) {
    auto data = read_csv_dataset(path);
    if (data.rows() < burn_in + 2)
        throw DataError("need at least " + std::to_string(burn_in + 2) + " data rows for burn-in " +
                        std::to_string(burn_in) + ", found " + std::to_string(data.rows()));
    return data;
}

inline nlohmann::json quantile_json(const LqeQuantile& q) {
    return {{"alpha", q.alpha}, {"averaged", q.averaged}, {"per_permutation", q.per_permutation}};
}

inline int cmd_test(const std::string& path, double alpha, const CommonFlags& flags, std::ostream& out) {
    const auto data = load_for_test(path, flags.burn_in);
    const auto report = lqe_test(data, alpha, make_options(flags));
    if (flags.format == "json") {
        nlohmann::json j{{"statistic", "scaled_kruskal_wallis"},
                         {"statistic_value", report.statistic_value},
                         {"critical_value", quantile_json(report.quantile)},
                         {"lower_quantile", quantile_json(report.lower_quantile)},
                         {"reject", report.reject},
                         {"interval", {report.interval_lower, report.interval_upper}},
                         {"alpha", report.alpha},
                         {"rows", data.rows()},
                         {"samples", data.samples()},
                         {"permutations", report.permutations},
                         {"burn_in", report.burn_in},
                         {"seed", report.seed},
                         {"permutation_mode", to_string(report.mode)}};
        out << j.dump(2) << "\n";
    } else {
        out << "LQE Kruskal-Wallis test: " << data.rows() << " rows x " << data.samples() << " samples\n"
            << "  scaled KW statistic     " << report.statistic_value << "\n"
            << "  critical value t(" << 1.0 - alpha << ")  " << report.quantile.averaged << "\n"
            << "  interval                [" << report.interval_lower << ", " << report.interval_upper << "]\n"
            << "  permutations " << report.permutations << " (" << to_string(report.mode) << "), burn-in "
            << report.burn_in << ", seed " << report.seed << "\n"
            << "  decision: " << (report.reject ? "reject H0" : "fail to reject H0") << " at alpha = " << alpha
            << "\n";
    }
    return report.reject ? kReject : kFailToReject;
}

inline int cmd_quantile(const std::string& path, const std::vector<double>& alphas, const CommonFlags& flags,
                        std::ostream& out) {
    const auto data = load_for_test(path, flags.burn_in);
    const auto options = make_options(flags);
    const auto quantiles = permuted_quantiles(data, ScaledKruskalWallis{}, alphas, options);
    if (flags.format == "json") {
        nlohmann::json j{{"statistic", "scaled_kruskal_wallis"},
                         {"seed", options.seed},
                         {"permutations", options.permutations},
                         {"burn_in", options.burn_in},
                         {"permutation_mode", to_string(options.mode)}};
        j["quantiles"] = nlohmann::json::array();
        for (const auto& q : quantiles) j["quantiles"].push_back(quantile_json(q));
        out << j.dump(2) << "\n";
    } else {
        out << "LQE quantiles of the scaled Kruskal-Wallis statistic (" << options.permutations
            << " permutations, burn-in " << options.burn_in << ", seed " << options.seed << ")\n";
        for (const auto& q : quantiles) out << "  alpha " << q.alpha << "  " << q.averaged << "\n";
    }
    return 0;
}

struct SimulateFlags {
    std::string config_path;
    std::optional<int> table;
    bool full_scale = false;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::size_t> replications;
    std::optional<std::size_t> permutations;
    std::optional<std::size_t> burn_in;
    std::vector<std::size_t> n_values;
    std::vector<double> alphas;
    std::vector<std::string> overrides;
    bool dependent = false;
    bool independent = false;
    std::string format = "table";
    std::string output;
};

inline int cmd_simulate(const SimulateFlags& f, std::ostream& out, std::ostream& err) {
    std::vector<SimulationConfig> configs;
    if (f.table) {
        if (!f.config_path.empty()) throw CLI::ValidationError("give either a config file or --table, not both");
        configs = table_preset_configs(*f.table);
        if (!f.full_scale)
            for (auto& c : configs) c = desk_scale(c);
    } else {
        if (f.config_path.empty()) throw CLI::ValidationError("simulate needs a config file or --table");
        if (f.full_scale) throw CLI::ValidationError("--paper-scale only applies to --table presets");
        try {
            configs.push_back(parse_simulation_config_file(f.config_path));
        } catch (const std::exception& e) {
            throw DataError(e.what());
        }
    }
    for (auto& c : configs) {
        if (f.seed) c.seed = *f.seed;
        if (f.threads) c.threads = *f.threads;
        if (f.replications) c.replications = *f.replications;
        if (f.permutations) c.permutations = *f.permutations;
        if (f.burn_in) c.burn_in = *f.burn_in;
        if (!f.n_values.empty()) c.n_values = f.n_values;
        if (!f.alphas.empty()) c.alphas = f.alphas;
        if (f.dependent) c.mode = PermutationMode::joint_rows;
        if (f.independent) c.mode = PermutationMode::per_sample;
        apply_overrides(f.overrides, c);
        c.validate();
    }

    for (std::size_t i = 0; i < configs.size(); ++i) {
        const auto report = run_study(configs[i]);
        const std::string json = report_json_text(report);
        const std::string table = report_table_text(report);
        out << (f.format == "json" ? json : table);
        if (!f.output.empty()) {
            const std::string stem = configs.size() == 1 ? f.output : f.output + "-" + std::to_string(i + 1);
            std::ofstream(stem + ".json") << json;
            std::ofstream(stem + ".txt") << table;
        }
        err << "# " << to_string(report.study) << " finished in " << report.wall_seconds << " s\n";
    }
    return 0;
}

inline int cmd_diagnose(std::size_t n, std::optional<std::uint64_t> seed, const std::string& format,
                        std::ostream& out) {
    if (n < 1) throw CLI::ValidationError("--n must be positive");
    const std::uint64_t s = resolve_seed(seed);
    const double distance = asclt_diagnostic(n, s);
    if (format == "json")
        out << nlohmann::json{{"n", n}, {"seed", s}, {"kolmogorov_distance", distance}}.dump(2) << "\n";
    else
        out << "ASCLT diagnostic: N = " << n << ", seed " << s << ", Kolmogorov distance " << distance << "\n";
    return 0;
}

/// Runs the command line; returns the process exit code.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Logarithmic quantile estimation for rank statistics: the LQE Kruskal-Wallis test for "
                 "possibly dependent samples, quantile estimates, Monte Carlo studies and an ASCLT diagnostic.",
                 "lqe"};
    app.require_subcommand(1);

    std::string csv_path;
    double alpha = 0.10;
    CommonFlags test_flags;
    auto* test = app.add_subcommand("test", "Test H0: all samples share one distribution. Exit 0 = fail to reject, 3 = reject");
    test->add_option("csv", csv_path, "CSV file: header row of sample names, one row per observation vector")
        ->required();
    test->add_option("--alpha", alpha, "Significance level")->capture_default_str()->check(CLI::Range(0.0, 1.0));
    add_common_flags(test, test_flags);

    std::string q_path;
    std::vector<double> q_alphas{0.90, 0.95, 0.99};
    CommonFlags q_flags;
    auto* quantile = app.add_subcommand("quantile", "Permutation-averaged LQE quantiles of the scaled KW statistic");
    quantile->add_option("csv", q_path, "CSV file as for `test`")->required();
    quantile->add_option("--alpha", q_alphas, "Quantile levels (repeatable)")->capture_default_str()->check(
        CLI::Range(0.0, 1.0));
    add_common_flags(quantile, q_flags);

    SimulateFlags sim;
    auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo study from a config file or a table preset");
    simulate->add_option("config", sim.config_path, "Study config file (key = value)");
    simulate->add_option("--table", sim.table, "Preset reproducing simulation table 1-17")->check(CLI::Range(1, 17));
    simulate->add_flag("--paper-scale", sim.full_scale,
                       "Use full published settings for --table (default: desk scale, <=100 replications, n<=500, "
                       "20 permutations)");
    simulate->add_option("--seed", sim.seed, "Master seed override")->envname("LQE_SEED");
    simulate->add_option("--threads", sim.threads, "Worker threads (results do not depend on this)");
    simulate->add_option("--replications", sim.replications, "Override replications");
    simulate->add_option("--permutations", sim.permutations, "Override permutations");
    simulate->add_option("--burn-in", sim.burn_in, "Override burn-in");
    simulate->add_option("--n", sim.n_values, "Override sample sizes (repeatable)");
    simulate->add_option("--alpha", sim.alphas, "Override levels (repeatable)");
    simulate->add_option("--set", sim.overrides, "Override any config key, e.g. --set rho=0.3 (repeatable)");
    auto* sim_dep = simulate->add_flag("--dependent", sim.dependent, "Permute whole rows (overrides the config)");
    auto* sim_ind = simulate->add_flag("--independent", sim.independent, "Permute each sample separately");
    sim_dep->excludes(sim_ind);
    simulate->add_option("--format", sim.format, "Output format on stdout")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();
    simulate->add_option("--output", sim.output, "Also write PREFIX.json and PREFIX.txt");

    std::size_t diag_n = 100000;
    std::optional<std::uint64_t> diag_seed;
    std::string diag_format = "table";
    auto* diagnose = app.add_subcommand("diagnose", "Kolmogorov distance of the log-averaged normalized partial sums to Phi");
    diagnose->add_option("--n", diag_n, "Number of i.i.d. N(0,1) draws")->capture_default_str();
    diagnose->add_option("--seed", diag_seed, "Seed")->envname("LQE_SEED");
    diagnose->add_option("--format", diag_format, "Output format")
        ->check(CLI::IsMember({"table", "json"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        if (*test) return cmd_test(csv_path, alpha, test_flags, out);
        if (*quantile) return cmd_quantile(q_path, q_alphas, q_flags, out);
        if (*simulate) return cmd_simulate(sim, out, err);
        if (*diagnose) return cmd_diagnose(diag_n, diag_seed, diag_format, out);
    } catch (const DataError& e) {
        err << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const CLI::Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    return kUsageError;
}

}  // namespace lqe::cli
