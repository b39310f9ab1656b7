#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "lqe/dataset.hpp"

namespace lqe::oracle {

// Midrank of each value by direct counting: (#less) + (#equal + 1) / 2.
// O(m^2); independent of the sort-based and Fenwick-based implementations.
inline std::vector<double> brute_force_ranks(const std::vector<double>& xs) {
    std::vector<double> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        double less = 0, equal = 0;
        for (double y : xs) {
            if (y < xs[i]) less += 1;
            if (y == xs[i]) equal += 1;
        }
        out[i] = less + (equal + 1) / 2;
    }
    return out;
}

// Per-sample rank sums of the first k rows, by brute force.
inline std::vector<double> brute_force_rank_sums(const CSampleDataset& data, std::size_t k) {
    const std::size_t c = data.samples();
    std::vector<double> flat(data.values().begin(), data.values().begin() + static_cast<std::ptrdiff_t>(k * c));
    const auto ranks = brute_force_ranks(flat);
    std::vector<double> sums(c, 0.0);
    for (std::size_t i = 0; i < flat.size(); ++i) sums[i % c] += ranks[i];
    return sums;
}

// Random dataset; with `ties`, values are drawn from a small integer grid so
// ties within and across rows are common.
inline CSampleDataset random_dataset(std::mt19937_64& rng, std::size_t n, std::size_t c, bool ties) {
    std::vector<double> v(n * c);
    std::normal_distribution<double> normal;
    std::uniform_int_distribution<int> grid(0, 7);
    for (auto& x : v) x = ties ? static_cast<double>(grid(rng)) : normal(rng);
    return CSampleDataset(n, c, std::move(v));
}

// Classical Kruskal-Wallis from per-observation ranks of the k x c prefix,
// group-wise: 12/(N(N+1)) sum_l R_l^2 / n_l - 3(N+1) with n_l = k.
inline double kw_textbook(const CSampleDataset& data, std::size_t k) {
    const auto sums = brute_force_rank_sums(data, k);
    const double n_obs = static_cast<double>(k * data.samples());
    double s = 0;
    for (double r : sums) s += r * r / static_cast<double>(k);
    return 12.0 / (n_obs * (n_obs + 1)) * s - 3.0 * (n_obs + 1);
}

}  // namespace lqe::oracle
