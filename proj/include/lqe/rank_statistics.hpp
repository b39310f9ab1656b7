#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "lqe/dataset.hpp"
#include "lqe/errors.hpp"
#include "lqe/rank_engine.hpp"

namespace lqe {

/// Score function J on (0,1), applied to normalized ranks R/(N+1).
///
/// The almost sure limit theory behind the test assumes J twice
/// differentiable with bounded second derivative. Wilcoxon (J(t) = t)
/// satisfies it; van der Waerden does not (unbounded near 0 and 1) and is
/// shipped as an extension only. Scores are never evaluated at 0 or 1.
///
/// Scores with an affine form a + b t can be evaluated from rank sums alone,
/// which keeps prefix traces near-linear. Other scores need every rank.
struct ScoreFunction {
    struct Affine {
        double intercept;
        double slope;
    };

    std::string name;
    std::function<double(double)> evaluate;
    std::optional<Affine> affine;

    static ScoreFunction wilcoxon() {
        return {"wilcoxon", [](double t) { return t; }, Affine{0.0, 1.0}};
    }

    static ScoreFunction van_der_waerden() {
        return {"van-der-waerden",
                [](double t) { return boost::math::quantile(boost::math::normal_distribution<>(), t); },
                std::nullopt};
    }
};

/// Regression constants lambda_ij, one per observation (n x c, row-major),
/// normalized so the largest absolute entry is 1.
class RegressionConstants {
public:
    RegressionConstants(std::size_t rows, std::size_t samples, std::vector<double> lambda)
        : n_(rows), c_(samples), lambda_(std::move(lambda)) {
        if (lambda_.size() != n_ * c_) throw DomainError("regression constants: shape mismatch");
        double max_abs = 0.0;
        for (double v : lambda_) {
            if (!std::isfinite(v)) throw DomainError("regression constants: non-finite entry");
            max_abs = std::max(max_abs, std::abs(v));
        }
        if (max_abs != 1.0) throw DomainError("regression constants: max |lambda| must equal 1");
    }

    /// lambda_ij = 1 iff j == sample.
    static RegressionConstants sample_indicator(std::size_t rows, std::size_t samples, std::size_t sample) {
        if (sample >= samples) throw DomainError("sample index out of range");
        std::vector<double> lambda(rows * samples, 0.0);
        for (std::size_t i = 0; i < rows; ++i) lambda[i * samples + sample] = 1.0;
        return {rows, samples, std::move(lambda)};
    }

    std::size_t rows() const noexcept { return n_; }
    std::size_t samples() const noexcept { return c_; }
    std::span<const double> values() const noexcept { return lambda_; }

private:
    std::size_t n_;
    std::size_t c_;
    std::vector<double> lambda_;
};

/// Null centering constant and normalizing sequence a_k for
/// Q_k = (N(k) / a_k) (L_k - centering).
struct StatisticSpec {
    ScoreFunction score = ScoreFunction::wilcoxon();
    double centering = 0.0;
    std::function<double(std::size_t)> scaling = [](std::size_t k) { return std::sqrt(static_cast<double>(k)); };

    /// Wilcoxon scores, sample-indicator constants, c samples: centering
    /// 1/(2c) under H0 and a_k = sqrt(k).
    static StatisticSpec wilcoxon_c_sample(std::size_t samples) {
        StatisticSpec spec;
        spec.centering = 1.0 / (2.0 * static_cast<double>(samples));
        return spec;
    }
};

/// T_1..T_n, the statistic evaluated on each prefix of the rows.
struct PrefixTrace {
    std::vector<double> values;

    std::size_t size() const noexcept { return values.size(); }
};

/// L_k for the sample-indicator pattern of `sample`, from rank sums. Needs a
/// score with an affine form; for Wilcoxon this is R_l / (N(N+1)).
inline double linear_rank_statistic(std::span<const double> rank_sums, std::size_t sample, std::size_t k,
                                    const ScoreFunction& score) {
    if (sample >= rank_sums.size()) throw DomainError("linear_rank_statistic: sample index out of range");
    if (k < 1) throw DomainError("linear_rank_statistic: prefix length must be positive");
    if (!score.affine)
        throw DomainError("linear_rank_statistic: score '" + score.name + "' needs individual ranks");
    const double n_obs = static_cast<double>(k * rank_sums.size());
    const auto [a, b] = *score.affine;
    return (static_cast<double>(k) * a + b * rank_sums[sample] / (n_obs + 1.0)) / n_obs;
}

/// L = (1/N) sum_ij lambda_ij J(R_ij / (N+1)) for an arbitrary score and
/// arbitrary constants. `ranks` and `lambda` are k x c row-major.
inline double linear_rank_statistic(std::span<const double> ranks, std::span<const double> lambda,
                                    const ScoreFunction& score) {
    if (ranks.empty()) throw DomainError("linear_rank_statistic: no ranks");
    if (ranks.size() != lambda.size()) throw DomainError("linear_rank_statistic: shape mismatch");
    const double n_obs = static_cast<double>(ranks.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < ranks.size(); ++i)
        if (lambda[i] != 0.0) sum += lambda[i] * score.evaluate(ranks[i] / (n_obs + 1.0));
    return sum / n_obs;
}

inline double linear_rank_statistic(std::span<const double> ranks, const RegressionConstants& lambda,
                                    const ScoreFunction& score) {
    if (ranks.size() > lambda.values().size()) throw DomainError("linear_rank_statistic: shape mismatch");
    return linear_rank_statistic(ranks, lambda.values().first(ranks.size()), score);
}

/// T_k^(l) = R_l / (N(N+1)) - 1/(2c), N = kc. Computed as
/// (R_l - k(N+1)/2) / (N(N+1)) so the centered numerators cancel exactly.
inline std::vector<double> t_statistic_vector(std::span<const double> rank_sums, std::size_t k) {
    if (k < 1) throw DomainError("t_statistic_vector: prefix length must be positive");
    const double n_obs = static_cast<double>(k * rank_sums.size());
    const double mean_sum = 0.5 * static_cast<double>(k) * (n_obs + 1.0);
    const double denom = n_obs * (n_obs + 1.0);
    std::vector<double> t(rank_sums.size());
    for (std::size_t l = 0; l < t.size(); ++l) t[l] = (rank_sums[l] - mean_sum) / denom;
    return t;
}

/// Kruskal-Wallis statistic in its classical form
/// 12/(N(N+1)) (1/k) sum R_l^2 - 3(N+1).
inline double kruskal_wallis(std::span<const double> rank_sums, std::size_t k) {
    if (k < 1) throw DomainError("kruskal_wallis: prefix length must be positive");
    if (rank_sums.size() < 2) throw DomainError("kruskal_wallis: need at least two samples");
    // Over a common denominator: (3 sum (2R_l)^2 - 3 k N (N+1)^2) / (k N (N+1)).
    // Rank sums are half-integers, so the numerator is exact in long double
    // for N below about 6e4 and equal rank sums give exactly 0.
    using Wide = long double;
    const Wide kk = static_cast<Wide>(k);
    const Wide n_obs = static_cast<Wide>(k * rank_sums.size());
    Wide sum_sq = 0;
    for (double r : rank_sums) {
        const Wide d = 2 * static_cast<Wide>(r);
        sum_sq += d * d;
    }
    const Wide numerator = 3 * sum_sq - 3 * kk * n_obs * (n_obs + 1) * (n_obs + 1);
    return static_cast<double>(numerator / (kk * n_obs * (n_obs + 1)));
}

/// The same statistic as a quadratic form in the T vector:
/// 12 N(N+1)/k sum (T^(l))^2.
inline double kruskal_wallis_via_t(std::span<const double> t_vector, std::size_t k) {
    if (k < 1) throw DomainError("kruskal_wallis_via_t: prefix length must be positive");
    const double n_obs = static_cast<double>(k * t_vector.size());
    double sum_sq = 0.0;
    for (double t : t_vector) sum_sq += t * t;
    return 12.0 * n_obs * (n_obs + 1.0) / static_cast<double>(k) * sum_sq;
}

/// kc^3 / (12(kc+1)) * kw. Under independence the log-average limit is
/// (c^2/12) chi^2_{c-1}.
inline double scaled_kw(double kw, std::size_t k, std::size_t samples) {
    if (kw < -1e-9) throw DomainError("scaled_kw: statistic must be nonnegative");
    if (k < 1) throw DomainError("scaled_kw: prefix length must be positive");
    const double kc = static_cast<double>(k * samples);
    const double c = static_cast<double>(samples);
    return kc * c * c / (12.0 * (kc + 1.0)) * kw;
}

/// Q_k = (N(k) / a_k) (L_k - centering).
inline double q_statistic(double linear_statistic, const StatisticSpec& spec, std::size_t k, std::size_t samples) {
    const double a_k = spec.scaling(k);
    if (!(a_k > 0.0)) throw DomainError("q_statistic: scaling must be positive");
    return static_cast<double>(k * samples) / a_k * (linear_statistic - spec.centering);
}

/// Trace statistic: the scaled Kruskal-Wallis statistic.
struct ScaledKruskalWallis {};

/// Trace statistic: Q_k for the sample-indicator pattern of one sample.
struct QStatistic {
    StatisticSpec spec;
    std::size_t sample = 0;
};

using TraceStatistic = std::variant<ScaledKruskalWallis, QStatistic>;

namespace detail {

inline bool needs_full_ranks(const TraceStatistic& stat) {
    const auto* q = std::get_if<QStatistic>(&stat);
    return q && !q->spec.score.affine;
}

inline double evaluate_from_sums(const TraceStatistic& stat, std::span<const double> sums, std::size_t k) {
    const std::size_t c = sums.size();
    if (std::holds_alternative<ScaledKruskalWallis>(stat)) return scaled_kw(kruskal_wallis(sums, k), k, c);
    const auto& q = std::get<QStatistic>(stat);
    return q_statistic(linear_rank_statistic(sums, q.sample, k, q.spec.score), q.spec, k, c);
}

}  // namespace detail

/// Trace of `stat` over prefixes of the rows in `indices` (n x c row-major
/// compressed values). `acc` must be built over `domain`; it is reset first.
inline PrefixTrace prefix_trace(std::span<const CompressedDataset::Index> indices, std::size_t samples,
                                const std::vector<double>& domain, RankAccumulator& acc,
                                const TraceStatistic& stat) {
    if (samples < 2 || indices.empty() || indices.size() % samples != 0)
        throw DomainError("prefix_trace: bad shape");
    if (const auto* q = std::get_if<QStatistic>(&stat); q && q->sample >= samples)
        throw DomainError("prefix_trace: sample index out of range");
    const std::size_t n = indices.size() / samples;
    PrefixTrace trace;
    trace.values.reserve(n);

    if (detail::needs_full_ranks(stat)) {
        // Non-affine score: re-rank every prefix. Quadratic in n.
        const auto& q = std::get<QStatistic>(stat);
        std::vector<double> values;
        values.reserve(indices.size());
        for (std::size_t k = 1; k <= n; ++k) {
            for (std::size_t l = 0; l < samples; ++l) values.push_back(domain[indices[(k - 1) * samples + l]]);
            const auto ranks = batch_ranks(values);
            const auto lambda = RegressionConstants::sample_indicator(k, samples, q.sample);
            trace.values.push_back(
                q_statistic(linear_rank_statistic(ranks, lambda, q.spec.score), q.spec, k, samples));
        }
        return trace;
    }

    acc.reset();
    std::vector<double> sums(samples);
    for (std::size_t k = 1; k <= n; ++k) {
        acc.push_indices(indices.subspan((k - 1) * samples, samples));
        const auto doubled = acc.doubled_rank_sums();
        for (std::size_t l = 0; l < samples; ++l) sums[l] = 0.5 * static_cast<double>(doubled[l]);
        trace.values.push_back(detail::evaluate_from_sums(stat, sums, k));
    }
    return trace;
}

inline PrefixTrace prefix_trace(const CSampleDataset& data, const TraceStatistic& stat = ScaledKruskalWallis{}) {
    const CompressedDataset compressed(data);
    RankAccumulator acc(compressed);
    return prefix_trace(compressed.indices(), compressed.samples(), compressed.domain(), acc, stat);
}

}  // namespace lqe
