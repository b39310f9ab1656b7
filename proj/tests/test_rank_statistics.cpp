#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lqe/rank_statistics.hpp"
#include "test_support.hpp"

using namespace lqe;

TEST(LinearRankStatistic, WilcoxonFromRankSums) {
    const std::vector<double> sums{1, 2, 3};
    const auto w = ScoreFunction::wilcoxon();
    EXPECT_DOUBLE_EQ(linear_rank_statistic(sums, 1, 1, w), 1.0 / 6.0);
    EXPECT_DOUBLE_EQ(linear_rank_statistic(sums, 0, 1, w), 1.0 / 12.0);
}

TEST(LinearRankStatistic, ZeroConstantsGiveZero) {
    const std::vector<double> ranks{1, 2, 3, 4, 5, 6};
    const std::vector<double> zeros(6, 0.0);
    EXPECT_EQ(linear_rank_statistic(ranks, zeros, ScoreFunction::wilcoxon()), 0.0);
    EXPECT_EQ(linear_rank_statistic(ranks, zeros, ScoreFunction::van_der_waerden()), 0.0);
}

TEST(LinearRankStatistic, Errors) {
    const std::vector<double> sums{1, 2, 3};
    EXPECT_THROW(linear_rank_statistic(sums, 3, 1, ScoreFunction::wilcoxon()), DomainError);
    EXPECT_THROW(linear_rank_statistic(sums, 0, 1, ScoreFunction::van_der_waerden()), DomainError);
    EXPECT_THROW(RegressionConstants::sample_indicator(2, 3, 3), DomainError);
    EXPECT_THROW(RegressionConstants(1, 2, {0.5, 0.2}), DomainError);
}

TEST(LinearRankStatistic, IndicatorRouteMatchesRankSumRoute) {
    std::mt19937_64 rng(3);
    const auto data = oracle::random_dataset(rng, 25, 4, true);
    const std::vector<double> flat(data.values().begin(), data.values().end());
    const auto ranks = oracle::brute_force_ranks(flat);
    const auto sums = oracle::brute_force_rank_sums(data, data.rows());
    for (std::size_t l = 0; l < 4; ++l) {
        const auto lambda = RegressionConstants::sample_indicator(data.rows(), 4, l);
        EXPECT_NEAR(linear_rank_statistic(ranks, lambda, ScoreFunction::wilcoxon()),
                    linear_rank_statistic(sums, l, data.rows(), ScoreFunction::wilcoxon()), 1e-15);
    }
}

TEST(TStatisticVector, Examples) {
    const auto t = t_statistic_vector(std::vector<double>{1, 2, 3}, 1);
    EXPECT_NEAR(t[0], -1.0 / 12.0, 1e-16);
    EXPECT_NEAR(t[1], 0.0, 1e-16);
    EXPECT_NEAR(t[2], 1.0 / 12.0, 1e-16);

    const auto sym = t_statistic_vector(std::vector<double>{5, 5}, 2);
    EXPECT_EQ(sym[0], 0.0);
    EXPECT_EQ(sym[1], 0.0);

    const auto t2 = t_statistic_vector(std::vector<double>{4, 10, 7}, 2);
    EXPECT_NEAR(t2[0], -1.0 / 14.0, 1e-16);
    EXPECT_NEAR(t2[1], 1.0 / 14.0, 1e-16);
    EXPECT_NEAR(t2[2], 0.0, 1e-16);
}

TEST(KruskalWallis, Examples) {
    EXPECT_DOUBLE_EQ(kruskal_wallis(std::vector<double>{1, 2, 3}, 1), 2.0);
    EXPECT_EQ(kruskal_wallis(std::vector<double>{2, 2, 2}, 1), 0.0);
    EXPECT_NEAR(kruskal_wallis(std::vector<double>{3, 7}, 2), 2.4, 1e-12);
}

TEST(KruskalWallis, QuadraticFormExamples) {
    const std::vector<double> t{-1.0 / 12.0, 0.0, 1.0 / 12.0};
    EXPECT_NEAR(kruskal_wallis_via_t(t, 1), 2.0, 1e-14);
    EXPECT_EQ(kruskal_wallis_via_t(std::vector<double>{0, 0, 0, 0}, 7), 0.0);
}

TEST(KruskalWallis, FormsAgreeOnRandomData) {
    std::mt19937_64 rng(50);
    const auto data = oracle::random_dataset(rng, 50, 4, false);
    const auto sums = oracle::brute_force_rank_sums(data, 50);
    const double a = kruskal_wallis(sums, 50);
    const double b = kruskal_wallis_via_t(t_statistic_vector(sums, 50), 50);
    EXPECT_NEAR(a, b, 1e-10 * std::abs(a));
    EXPECT_NEAR(a, oracle::kw_textbook(data, 50), 1e-10 * std::abs(a));
}

TEST(KruskalWallis, IdentityCenteringAndNonnegativityProperty) {
    std::mt19937_64 rng(77);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t c = 2 + trial % 4;
        const std::size_t n = 1 + (trial * 13) % 200;
        const auto data = oracle::random_dataset(rng, n, c, trial % 3 == 0);
        RankAccumulator acc(data);
        for (std::size_t k = 1; k <= n; ++k) {
            acc.push_vector(data.row(k - 1));
            const auto sums = acc.rank_sums();
            const auto t = t_statistic_vector(sums, k);
            const double kw = kruskal_wallis(sums, k);
            const double kw_t = kruskal_wallis_via_t(t, k);
            ASSERT_LE(std::abs(kw - kw_t), 1e-10 * std::max({std::abs(kw), std::abs(kw_t), 1.0}))
                << "c=" << c << " k=" << k;
            ASSERT_GE(kw, -1e-10);
            ASSERT_LE(std::abs(std::accumulate(t.begin(), t.end(), 0.0)), 1e-14);
        }
    }
}

TEST(ScaledKw, Examples) {
    EXPECT_DOUBLE_EQ(scaled_kw(2.0, 1, 3), 1.125);
    EXPECT_EQ(scaled_kw(0.0, 10, 3), 0.0);
    const double v = scaled_kw(4.60517, 1000, 3);
    EXPECT_NEAR(v, 27000.0 / 36012.0 * 4.60517, 1e-12);
    EXPECT_NEAR(v, 3.4527, 1e-4);
    EXPECT_NEAR(v, 3.453878, 2e-3);
    EXPECT_THROW(scaled_kw(-1.0, 1, 3), DomainError);
}

TEST(QStatistic, Examples) {
    auto spec = StatisticSpec::wilcoxon_c_sample(3);
    EXPECT_EQ(q_statistic(spec.centering, spec, 10, 3), 0.0);
    EXPECT_EQ(q_statistic(1.0 / 6.0, spec, 1, 3), 0.0);
    EXPECT_NEAR(q_statistic(0.2, spec, 100, 3), 1.0, 1e-12);

    spec.scaling = [](std::size_t) { return 0.0; };
    EXPECT_THROW(q_statistic(0.2, spec, 1, 3), DomainError);
}

TEST(PrefixTrace, SingleRow) {
    const auto data = CSampleDataset::from_rows({{10, 20, 30}});
    const auto trace = prefix_trace(data);
    ASSERT_EQ(trace.size(), 1u);
    EXPECT_DOUBLE_EQ(trace.values[0], 1.125);
}

TEST(PrefixTrace, EveryElementMatchesFromScratchEvaluation) {
    std::mt19937_64 rng(8);
    const auto data = oracle::random_dataset(rng, 80, 3, true);
    const auto trace = prefix_trace(data);
    for (std::size_t k = 1; k <= data.rows(); ++k)
        EXPECT_NEAR(trace.values[k - 1], scaled_kw(oracle::kw_textbook(data, k), k, 3), 1e-10);
}

TEST(PrefixTrace, RowPermutationKeepsFinalElement) {
    std::mt19937_64 rng(9);
    const auto data = oracle::random_dataset(rng, 60, 3, false);
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < data.rows(); ++i) rows.emplace_back(data.row(i).begin(), data.row(i).end());
    std::shuffle(rows.begin(), rows.end(), rng);
    const auto permuted = CSampleDataset::from_rows(rows);

    const auto a = prefix_trace(data);
    const auto b = prefix_trace(permuted);
    EXPECT_EQ(a.values.back(), b.values.back());
    EXPECT_NE(a.values, b.values);
}

TEST(PrefixTrace, MonotoneTransformLeavesTraceUnchanged) {
    std::mt19937_64 rng(10);
    const auto data = oracle::random_dataset(rng, 70, 4, true);
    std::vector<double> transformed(data.values().begin(), data.values().end());
    for (auto& x : transformed) x = std::exp(x) * 3.0 + 1.0;
    const CSampleDataset other(data.rows(), data.samples(), transformed);
    EXPECT_EQ(prefix_trace(data).values, prefix_trace(other).values);
    const QStatistic q{StatisticSpec::wilcoxon_c_sample(4), 2};
    EXPECT_EQ(prefix_trace(data, q).values, prefix_trace(other, q).values);
}

TEST(PrefixTrace, QStatisticAffinePathMatchesFullRankPath) {
    std::mt19937_64 rng(12);
    const auto data = oracle::random_dataset(rng, 40, 3, true);
    QStatistic fast{StatisticSpec::wilcoxon_c_sample(3), 1};
    QStatistic slow = fast;
    slow.spec.score.affine.reset();  // force per-prefix re-ranking
    const auto a = prefix_trace(data, fast);
    const auto b = prefix_trace(data, slow);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a.values[k], b.values[k], 1e-12);
}

TEST(PrefixTrace, VanDerWaerdenScoreIsFinite) {
    std::mt19937_64 rng(13);
    const auto data = oracle::random_dataset(rng, 30, 3, false);
    QStatistic q{StatisticSpec{ScoreFunction::van_der_waerden(), 0.0}, 0};
    for (double v : prefix_trace(data, q).values) EXPECT_TRUE(std::isfinite(v));
}

TEST(PrefixTrace, BadSampleIndex) {
    const auto data = CSampleDataset::from_rows({{1, 2, 3}});
    EXPECT_THROW(prefix_trace(data, QStatistic{StatisticSpec::wilcoxon_c_sample(3), 3}), DomainError);
}
