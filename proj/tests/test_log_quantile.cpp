#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "lqe/log_quantile.hpp"
#include "lqe/synthetic_data.hpp"
#include "test_support.hpp"

using namespace lqe;

namespace {

PrefixTrace trace_of(std::vector<double> v) { return PrefixTrace{std::move(v)}; }

bool same_report(const TestReport& a, const TestReport& b) {
    return a.statistic_value == b.statistic_value && a.quantile.per_permutation == b.quantile.per_permutation &&
           a.quantile.averaged == b.quantile.averaged &&
           a.lower_quantile.per_permutation == b.lower_quantile.per_permutation && a.reject == b.reject &&
           a.interval_lower == b.interval_lower && a.interval_upper == b.interval_upper;
}

}  // namespace

TEST(BuildDistribution, TwoPoints) {
    const auto d = build_distribution(trace_of({1.0, 2.0}), 0);
    EXPECT_EQ(d.support(), (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(d.weights(), (std::vector<double>{1.0, 0.5}));
    EXPECT_DOUBLE_EQ(d.normalizer(), 1.5);
}

TEST(BuildDistribution, ConstantTrace) {
    for (std::size_t burn : {0u, 3u, 6u}) {
        const auto d = build_distribution(trace_of(std::vector<double>(7, 5.0)), burn);
        ASSERT_EQ(d.support().size(), 1u);
        EXPECT_EQ(d.support()[0], 5.0);
        EXPECT_NEAR(d.weights()[0], d.normalizer(), 1e-15);
    }
}

TEST(BuildDistribution, BurnInDropsLeadingTerms) {
    const auto d = build_distribution(trace_of({9, 9, 9, 9, 9, 1, 2}), 5);
    EXPECT_NEAR(d.normalizer(), 13.0 / 42.0, 1e-15);
    EXPECT_EQ(d.support(), (std::vector<double>{1.0, 2.0}));
    EXPECT_EQ(d.burn_in(), 5u);
}

TEST(BuildDistribution, Errors) {
    EXPECT_THROW(build_distribution(trace_of({1, 2, 3}), 3), DomainError);
    EXPECT_THROW(build_distribution(trace_of({1, std::nan(""), 3}), 0), DomainError);
}

TEST(Cdf, Examples) {
    const auto d = build_distribution(trace_of({1.0, 2.0}), 0);
    EXPECT_EQ(d.cdf(0.5), 0.0);
    EXPECT_EQ(d.cdf(0.5, true), 0.0);
    EXPECT_EQ(d.cdf(2.5), 1.0);
    EXPECT_EQ(d.cdf(2.0), 1.0);
    EXPECT_LT(d.cdf(2.0, true), 1.0);
    EXPECT_DOUBLE_EQ(d.cdf(1.5, true), 2.0 / 3.0);
}

TEST(Quantile, Examples) {
    const auto single = build_distribution(trace_of({5, 5, 5}), 0);
    for (double a : {0.01, 0.5, 0.99}) EXPECT_EQ(single.quantile(a), 5.0);

    const auto two = build_distribution(trace_of({1.0, 2.0}), 0);
    EXPECT_EQ(two.quantile(0.5), 1.0);
    EXPECT_EQ(two.quantile(0.7), 2.0);

    const LogEmpiricalDistribution three({1, 2, 3}, {1.0 / 3, 1.0 / 3, 1.0 / 3}, 0, 1.0);
    EXPECT_EQ(three.quantile(0.34), 2.0);

    EXPECT_THROW(two.quantile(0.0), DomainError);
    EXPECT_THROW(two.quantile(1.0), DomainError);
}

TEST(LogDistribution, CdfAndQuantileProperties) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> grid(0, 9);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + trial * 3;
        std::vector<double> v(n);
        for (auto& x : v) x = trial % 2 ? normal(rng) : grid(rng);
        const std::size_t burn = trial % 4 == 0 ? 0 : std::min<std::size_t>(5, n - 1);
        const auto d = build_distribution(trace_of(v), burn);

        double total = 0;
        for (double w : d.weights()) {
            EXPECT_GE(w, 0.0);
            total += w;
        }
        EXPECT_NEAR(total, d.normalizer(), 1e-12 * d.normalizer());

        double prev = 0;
        for (double s : d.support()) {
            EXPECT_GE(d.cdf(s), prev);
            EXPECT_GE(d.cdf(s), d.cdf(s, true));
            prev = d.cdf(s);
        }
        EXPECT_EQ(d.cdf(d.support().back()), 1.0);

        double last_q = -INFINITY;
        for (double a = 0.01; a < 1.0; a += 0.01) {
            const double q = d.quantile(a);
            EXPECT_LE(d.cdf(q, true), a);
            for (double s : d.support())
                if (s > q) EXPECT_GT(d.cdf(s, true), a);
            EXPECT_GE(q, last_q);
            last_q = q;
        }
    }
}

TEST(PermutedQuantile, SingleContributingPrefixIsPermutationInvariant) {
    const auto data = gen_c_sample(DependenceSpec::independent_normal(0, 1), 6, 17);
    LqeOptions opt;
    opt.burn_in = 5;
    opt.permutations = 7;
    opt.seed = 3;
    const double final_value = prefix_trace(data).values.back();
    const auto q = permuted_quantile(data, ScaledKruskalWallis{}, 0.9, opt);
    EXPECT_EQ(q.averaged, final_value);
    for (double v : q.per_permutation) EXPECT_EQ(v, final_value);
}

TEST(PermutedQuantile, OnePermutation) {
    const auto data = gen_c_sample(DependenceSpec::independent_normal(0, 1), 40, 1);
    LqeOptions opt;
    opt.permutations = 1;
    const auto q = permuted_quantile(data, ScaledKruskalWallis{}, 0.9, opt);
    ASSERT_EQ(q.per_permutation.size(), 1u);
    EXPECT_EQ(q.averaged, q.per_permutation[0]);
}

TEST(PermutedQuantile, AverageWithinRangeAndMonotoneInAlpha) {
    const auto data = gen_c_sample(DependenceSpec::dependent_normal(0.5), 120, 2);
    LqeOptions opt;
    opt.permutations = 15;
    opt.seed = 99;
    const std::vector<double> alphas{0.1, 0.5, 0.9, 0.95, 0.99};
    const auto qs = permuted_quantiles(data, ScaledKruskalWallis{}, alphas, opt);
    for (std::size_t a = 0; a < qs.size(); ++a) {
        const auto [lo, hi] = std::minmax_element(qs[a].per_permutation.begin(), qs[a].per_permutation.end());
        EXPECT_GE(qs[a].averaged, *lo);
        EXPECT_LE(qs[a].averaged, *hi);
        if (a > 0) EXPECT_GE(qs[a].averaged, qs[a - 1].averaged);
    }
}

TEST(PermutedQuantile, DeterministicAcrossThreadCounts) {
    const auto data = gen_c_sample(DependenceSpec::independent_normal(0, 1), 100, 5);
    for (auto mode : {PermutationMode::joint_rows, PermutationMode::per_sample}) {
        LqeOptions opt;
        opt.seed = 1234;
        opt.mode = mode;
        const auto a = permuted_quantile(data, ScaledKruskalWallis{}, 0.9, opt);
        opt.threads = 4;
        const auto b = permuted_quantile(data, ScaledKruskalWallis{}, 0.9, opt);
        EXPECT_EQ(a.per_permutation, b.per_permutation);
        EXPECT_EQ(a.averaged, b.averaged);
    }
}

TEST(PermutedQuantile, ModesDiffer) {
    const auto data = gen_c_sample(DependenceSpec::independent_normal(0, 1), 100, 5);
    LqeOptions joint, per;
    per.mode = PermutationMode::per_sample;
    EXPECT_NE(permuted_quantile(data, ScaledKruskalWallis{}, 0.9, joint).per_permutation,
              permuted_quantile(data, ScaledKruskalWallis{}, 0.9, per).per_permutation);
}

TEST(PermutedQuantile, Errors) {
    const auto data = gen_c_sample(DependenceSpec::independent_normal(0, 1), 5, 5);
    LqeOptions opt;
    EXPECT_THROW(permuted_quantile(data, ScaledKruskalWallis{}, 0.9, opt), DomainError);  // n == burn-in
    opt.burn_in = 0;
    opt.permutations = 0;
    EXPECT_THROW(permuted_quantile(data, ScaledKruskalWallis{}, 0.9, opt), DomainError);
    opt.permutations = 1;
    EXPECT_THROW(permuted_quantile(data, ScaledKruskalWallis{}, 1.5, opt), DomainError);
}

TEST(LqeTest, IdenticalColumnsNeverReject) {
    std::vector<double> v;
    for (int i = 0; i < 50; ++i)
        for (int l = 0; l < 3; ++l) v.push_back(std::sin(i * 1.7));
    const CSampleDataset data(50, 3, v);
    LqeOptions opt;
    for (double alpha : {0.01, 0.1, 0.5, 0.99}) {
        const auto r = lqe_test(data, alpha, opt);
        EXPECT_EQ(r.statistic_value, 0.0);
        EXPECT_FALSE(r.reject);
    }
}

TEST(LqeTest, SameSeedSameReport) {
    const auto data = gen_c_sample(DependenceSpec::dependent_normal(0.3), 80, 21);
    LqeOptions opt;
    opt.seed = 77;
    const auto a = lqe_test(data, 0.1, opt);
    opt.threads = 3;
    const auto b = lqe_test(data, 0.1, opt);
    EXPECT_TRUE(same_report(a, b));
    EXPECT_EQ(a.reject, a.statistic_value > a.quantile.averaged);
    EXPECT_DOUBLE_EQ(a.quantile.alpha, 0.9);
    EXPECT_DOUBLE_EQ(a.lower_quantile.alpha, 0.1);
    EXPECT_LE(a.interval_lower, a.interval_upper);
}

TEST(LqeTest, MonotoneTransformInvariance) {
    const auto data = gen_c_sample(DependenceSpec::independent_exponential(2.0), 60, 8);
    std::vector<double> logged(data.values().begin(), data.values().end());
    for (auto& x : logged) x = std::log(x);
    const CSampleDataset other(data.rows(), data.samples(), logged);
    LqeOptions opt;
    opt.seed = 5;
    EXPECT_TRUE(same_report(lqe_test(data, 0.05, opt), lqe_test(other, 0.05, opt)));
}

TEST(LqeTest, StrongShiftRejects) {
    auto spec = DependenceSpec::independent_normal(0, 1);
    spec.shifts = {0, 3, 0};
    const auto data = gen_c_sample(spec, 100, 3);
    LqeOptions opt;
    opt.mode = PermutationMode::per_sample;
    EXPECT_TRUE(lqe_test(data, 0.05, opt).reject);
}

TEST(AscltDiagnostic, SinglePoint) {
    const std::vector<double> x{0.7};
    const double phi = standard_normal_cdf(0.7);
    EXPECT_DOUBLE_EQ(asclt_diagnostic(x), std::max(phi, 1 - phi));
}

TEST(AscltDiagnostic, DistanceInUnitInterval) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const double d = asclt_diagnostic(2000, seed);
        EXPECT_GT(d, 0.0);
        EXPECT_LE(d, 1.0);
        EXPECT_EQ(d, asclt_diagnostic(2000, seed));
    }
}
