#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "lqe/dataset.hpp"
#include "lqe/errors.hpp"
#include "lqe/parallel.hpp"
#include "lqe/random.hpp"
#include "lqe/rank_engine.hpp"
#include "lqe/rank_statistics.hpp"

namespace lqe {

/// Logarithmic average of a prefix trace:
///
///   G(t) = (1/C) sum_{k=B+1..n} (1/k) I(T_k <= t),   C = sum_{k=B+1..n} 1/k
///
/// where B is the number of leading terms dropped (burn-in). Equal trace
/// values are merged into one support point on exact equality.
class LogEmpiricalDistribution {
public:
    LogEmpiricalDistribution(std::vector<double> support, std::vector<double> weights, std::size_t burn_in,
                             double normalizer)
        : support_(std::move(support)), weights_(std::move(weights)), burn_in_(burn_in), normalizer_(normalizer) {
        if (support_.empty() || support_.size() != weights_.size())
            throw DomainError("log distribution: support and weights must be non-empty and aligned");
        if (!(normalizer_ > 0.0)) throw DomainError("log distribution: normalizer must be positive");
        cumulative_.resize(weights_.size() + 1, 0.0);
        for (std::size_t j = 0; j < weights_.size(); ++j) {
            if (weights_[j] < 0.0) throw DomainError("log distribution: negative weight");
            cumulative_[j + 1] = cumulative_[j] + weights_[j];
        }
    }

    const std::vector<double>& support() const noexcept { return support_; }
    const std::vector<double>& weights() const noexcept { return weights_; }
    std::size_t burn_in() const noexcept { return burn_in_; }
    double normalizer() const noexcept { return normalizer_; }

    /// G(t) with I(T <= t), or I(T < t) when `strict`.
    double cdf(double t, bool strict = false) const {
        const auto it = strict ? std::lower_bound(support_.begin(), support_.end(), t)
                               : std::upper_bound(support_.begin(), support_.end(), t);
        return mass_below(static_cast<std::size_t>(it - support_.begin()));
    }

    /// max{ t : (1/C) sum (1/k) I(T_k < t) <= alpha }, with t restricted to
    /// support points. Over all reals the set is unbounded above once alpha
    /// reaches the strict CDF at the largest support point, so the support
    /// restriction is the only finite reading. The first support point always
    /// qualifies (its strict CDF is 0), so the result is an observed value.
    double quantile(double alpha) const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("quantile: alpha must lie in (0, 1)");
        // strict CDF at support_[j] is mass_below(j), nondecreasing in j
        std::size_t lo = 0;
        std::size_t hi = support_.size();
        while (hi - lo > 1) {
            const std::size_t mid = lo + (hi - lo) / 2;
            if (mass_below(mid) <= alpha)
                lo = mid;
            else
                hi = mid;
        }
        return support_[lo];
    }

private:
    // Normalized weight of the first j support points.
    double mass_below(std::size_t j) const {
        if (j == 0) return 0.0;
        if (j >= support_.size()) return 1.0;
        return std::min(1.0, cumulative_[j] / normalizer_);
    }

    std::vector<double> support_;
    std::vector<double> weights_;
    std::vector<double> cumulative_;
    std::size_t burn_in_;
    double normalizer_;
};

/// Log-weights 1/k for k = burn_in+1 .. n, grouped by trace value.
inline LogEmpiricalDistribution build_distribution(const PrefixTrace& trace, std::size_t burn_in) {
    const std::size_t n = trace.size();
    if (burn_in >= n) throw DomainError("build_distribution: burn-in must be shorter than the trace");

    std::vector<std::size_t> order;
    order.reserve(n - burn_in);
    double normalizer = 0.0;
    for (std::size_t k = burn_in + 1; k <= n; ++k) {
        if (!std::isfinite(trace.values[k - 1])) throw DomainError("build_distribution: non-finite trace value");
        order.push_back(k);
        normalizer += 1.0 / static_cast<double>(k);
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return trace.values[a - 1] < trace.values[b - 1]; });

    std::vector<double> support;
    std::vector<double> weights;
    for (std::size_t k : order) {
        const double v = trace.values[k - 1];
        if (support.empty() || support.back() != v) {
            support.push_back(v);
            weights.push_back(0.0);
        }
        weights.back() += 1.0 / static_cast<double>(k);
    }
    return {std::move(support), std::move(weights), burn_in, normalizer};
}

/// How rows are reshuffled before rebuilding a trace.
enum class PermutationMode {
    joint_rows,  // permute whole vectors; keeps within-vector dependence
    per_sample,  // permute each sample independently; for independent samples
};

struct LqeOptions {
    std::size_t permutations = 20;
    std::size_t burn_in = 5;
    std::uint64_t seed = 0;
    PermutationMode mode = PermutationMode::joint_rows;
    unsigned threads = 1;
};

/// Permutation-averaged logarithmic quantile at one level.
struct LqeQuantile {
    double alpha = 0.0;
    std::vector<double> per_permutation;
    double averaged = 0.0;
};

namespace detail {

inline std::vector<CompressedDataset::Index> permuted_indices(const CompressedDataset& data, PermutationMode mode,
                                                              std::uint64_t seed) {
    const std::size_t n = data.rows();
    const std::size_t c = data.samples();
    const auto src = data.indices();
    std::vector<CompressedDataset::Index> out(src.size());
    if (mode == PermutationMode::joint_rows) {
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        Engine eng = make_engine(derive_seed(seed, {0}));
        shuffle(std::span(order), eng);
        for (std::size_t i = 0; i < n; ++i)
            std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(order[i] * c), c,
                        out.begin() + static_cast<std::ptrdiff_t>(i * c));
    } else {
        std::vector<CompressedDataset::Index> column(n);
        for (std::size_t l = 0; l < c; ++l) {
            for (std::size_t i = 0; i < n; ++i) column[i] = src[i * c + l];
            Engine eng = make_engine(derive_seed(seed, {l + 1}));
            shuffle(std::span(column), eng);
            for (std::size_t i = 0; i < n; ++i) out[i * c + l] = column[i];
        }
    }
    return out;
}

inline double ordered_mean(const std::vector<double>& xs) {
    const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
    if (*lo == *hi) return *lo;
    double sum = 0.0;
    for (double x : xs) sum += x;
    return std::clamp(sum / static_cast<double>(xs.size()), *lo, *hi);
}

}  // namespace detail

/// Logarithmic quantiles at every level in `alphas`, each averaged over
/// `options.permutations` random reorderings of the data. Permutation i uses
/// a stream derived from (seed, i) only, and results are combined in index
/// order, so the thread count never changes the output.
inline std::vector<LqeQuantile> permuted_quantiles(const CSampleDataset& data, const TraceStatistic& stat,
                                                   std::span<const double> alphas, const LqeOptions& options) {
    if (options.permutations < 1) throw DomainError("permuted_quantiles: need at least one permutation");
    if (options.burn_in >= data.rows())
        throw DomainError("permuted_quantiles: too few rows for the burn-in");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw DomainError("permuted_quantiles: alpha must lie in (0, 1)");

    const CompressedDataset compressed(data);
    std::vector<std::vector<double>> per_perm(options.permutations);
    parallel_for(options.permutations, options.threads, [&](std::size_t i) {
        const auto indices = detail::permuted_indices(compressed, options.mode, derive_seed(options.seed, {i}));
        RankAccumulator acc(compressed);
        const auto trace = prefix_trace(indices, compressed.samples(), compressed.domain(), acc, stat);
        const auto dist = build_distribution(trace, options.burn_in);
        auto& out = per_perm[i];
        out.reserve(alphas.size());
        for (double a : alphas) out.push_back(dist.quantile(a));
    });

    std::vector<LqeQuantile> result(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        result[a].alpha = alphas[a];
        result[a].per_permutation.reserve(options.permutations);
        for (const auto& p : per_perm) result[a].per_permutation.push_back(p[a]);
        result[a].averaged = detail::ordered_mean(result[a].per_permutation);
    }
    return result;
}

inline LqeQuantile permuted_quantile(const CSampleDataset& data, const TraceStatistic& stat, double alpha,
                                     const LqeOptions& options) {
    const double alphas[] = {alpha};
    return permuted_quantiles(data, stat, alphas, options).front();
}

struct TestReport {
    double statistic_value = 0.0;
    LqeQuantile quantile;        // at 1 - alpha; the critical value
    LqeQuantile lower_quantile;  // at alpha
    bool reject = false;
    // [Q - t_{1-alpha}, Q - t_{alpha}]; covers 0 with probability -> 1 - 2 alpha
    double interval_lower = 0.0;
    double interval_upper = 0.0;
    double alpha = 0.0;
    std::size_t permutations = 0;
    std::size_t burn_in = 0;
    std::uint64_t seed = 0;
    PermutationMode mode = PermutationMode::joint_rows;
};

/// Rejects H0 (equal distributions) iff the final-prefix statistic exceeds
/// the permutation-averaged logarithmic (1 - alpha)-quantile.
inline TestReport lqe_test(const CSampleDataset& data, double alpha, const LqeOptions& options,
                           const TraceStatistic& stat = ScaledKruskalWallis{}) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("lqe_test: alpha must lie in (0, 1)");
    const double levels[] = {1.0 - alpha, alpha};
    auto quantiles = permuted_quantiles(data, stat, levels, options);

    TestReport report;
    report.statistic_value = prefix_trace(data, stat).values.back();
    report.quantile = std::move(quantiles[0]);
    report.lower_quantile = std::move(quantiles[1]);
    report.reject = report.statistic_value > report.quantile.averaged;
    report.interval_lower = report.statistic_value - report.quantile.averaged;
    report.interval_upper = report.statistic_value - report.lower_quantile.averaged;
    report.alpha = alpha;
    report.permutations = options.permutations;
    report.burn_in = options.burn_in;
    report.seed = options.seed;
    report.mode = options.mode;
    return report;
}

inline double standard_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Kolmogorov distance between the log-average distribution of S_k / sqrt(k)
/// (no burn-in) and the standard normal CDF. Both one-sided limits are
/// checked at every support point.
inline double asclt_diagnostic(std::span<const double> sample) {
    if (sample.empty()) throw DomainError("asclt_diagnostic: empty sample");
    PrefixTrace trace;
    trace.values.reserve(sample.size());
    double sum = 0.0;
    for (std::size_t k = 1; k <= sample.size(); ++k) {
        sum += sample[k - 1];
        trace.values.push_back(sum / std::sqrt(static_cast<double>(k)));
    }
    const auto dist = build_distribution(trace, 0);
    double distance = 0.0;
    for (double v : dist.support()) {
        const double phi = standard_normal_cdf(v);
        distance = std::max({distance, std::abs(dist.cdf(v) - phi), std::abs(dist.cdf(v, true) - phi)});
    }
    return distance;
}

inline std::vector<double> standard_normal_draws(std::size_t count, std::uint64_t seed) {
    Engine eng = make_engine(seed);
    boost::random::normal_distribution<double> normal;
    std::vector<double> out(count);
    for (auto& x : out) x = normal(eng);
    return out;
}

inline double asclt_diagnostic(std::size_t count, std::uint64_t seed) {
    return asclt_diagnostic(standard_normal_draws(count, seed));
}

}  // namespace lqe
