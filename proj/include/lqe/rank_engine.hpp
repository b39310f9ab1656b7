#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "lqe/dataset.hpp"
#include "lqe/errors.hpp"
#include "lqe/fenwick.hpp"

namespace lqe {

/// 1-based ranks of `values`; tied values (exact equality) share the mean of
/// the ranks they span. The result sums to m(m+1)/2.
inline std::vector<double> batch_ranks(std::span<const double> values) {
    if (values.empty()) throw DomainError("batch_ranks: empty input");
    for (double v : values)
        if (!std::isfinite(v)) throw DomainError("batch_ranks: non-finite value");

    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && values[order[j]] == values[order[i]]) ++j;
        // positions i..j-1 hold ranks i+1..j
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) ranks[order[t]] = midrank;
        i = j;
    }
    return ranks;
}

/// A dataset with every value replaced by its index in the sorted set of
/// distinct values. Rank computations only need this order structure.
class CompressedDataset {
public:
    using Index = std::uint32_t;

    explicit CompressedDataset(const CSampleDataset& data) : n_(data.rows()), c_(data.samples()) {
        domain_.assign(data.values().begin(), data.values().end());
        std::sort(domain_.begin(), domain_.end());
        domain_.erase(std::unique(domain_.begin(), domain_.end()), domain_.end());
        index_.reserve(data.values().size());
        for (double v : data.values())
            index_.push_back(static_cast<Index>(
                std::lower_bound(domain_.begin(), domain_.end(), v) - domain_.begin()));
    }

    std::size_t rows() const noexcept { return n_; }
    std::size_t samples() const noexcept { return c_; }
    const std::vector<double>& domain() const noexcept { return domain_; }
    std::span<const Index> row(std::size_t i) const { return {index_.data() + i * c_, c_}; }
    std::span<const Index> indices() const noexcept { return index_; }

private:
    std::size_t n_;
    std::size_t c_;
    std::vector<double> domain_;
    std::vector<Index> index_;
};

/// Per-sample rank sums over a growing prefix X_1..X_k of a c-sample dataset.
///
/// Each sample keeps a Fenwick tree of counts over the compressed value
/// domain. Inserting value v into sample s raises every sample's rank sum by
/// its count of values > v plus half its count of values == v (the tie group
/// grows by one), and adds the midrank of v to sample s. A row costs
/// O(c^2 log D) for a domain of D distinct values.
///
/// Rank sums are stored doubled so midranks stay exact integers.
class RankAccumulator {
public:
    using Index = CompressedDataset::Index;

    RankAccumulator(std::vector<double> domain, std::size_t samples)
        : domain_(std::move(domain)), c_(samples) {
        if (c_ < 2) throw DomainError("RankAccumulator: need at least two samples");
        if (!std::is_sorted(domain_.begin(), domain_.end()) ||
            std::adjacent_find(domain_.begin(), domain_.end()) != domain_.end())
            throw DomainError("RankAccumulator: domain must be sorted and distinct");
        trees_.assign(c_, FenwickTree<std::int64_t>(domain_.size()));
        equal_.assign(c_ * domain_.size(), 0);
        doubled_sums_.assign(c_, 0);
    }

    explicit RankAccumulator(const CompressedDataset& data)
        : RankAccumulator(data.domain(), data.samples()) {}

    explicit RankAccumulator(const CSampleDataset& data)
        : RankAccumulator(CompressedDataset(data)) {}

    std::size_t samples() const noexcept { return c_; }
    std::size_t prefix_length() const noexcept { return k_; }
    std::size_t total_count() const noexcept { return k_ * c_; }
    std::size_t domain_size() const noexcept { return domain_.size(); }

    /// Append one observation vector given as real values. Every value must be
    /// in the domain the accumulator was built for.
    void push_vector(std::span<const double> row) {
        if (row.size() != c_) throw DomainError("push_vector: row length does not match samples");
        index_scratch_.resize(c_);
        for (std::size_t l = 0; l < c_; ++l) {
            auto it = std::lower_bound(domain_.begin(), domain_.end(), row[l]);
            if (it == domain_.end() || *it != row[l])
                throw DomainError("push_vector: value outside the compressed domain");
            index_scratch_[l] = static_cast<Index>(it - domain_.begin());
        }
        push_indices(index_scratch_);
    }

    /// Append one observation vector given as compressed domain indices.
    void push_indices(std::span<const Index> row) {
        if (row.size() != c_) throw DomainError("push_indices: row length does not match samples");
        for (std::size_t s = 0; s < c_; ++s) insert(s, row[s]);
        ++k_;
    }

    /// (R_1, ..., R_c) for the current prefix.
    std::vector<double> rank_sums() const {
        if (k_ == 0) throw StateError("rank_sums: accumulator is empty");
        std::vector<double> out(c_);
        for (std::size_t l = 0; l < c_; ++l) out[l] = 0.5 * static_cast<double>(doubled_sums_[l]);
        return out;
    }

    /// 2 R_l, exact.
    std::span<const std::int64_t> doubled_rank_sums() const noexcept { return doubled_sums_; }

    void reset() {
        for (auto& t : trees_) t.clear();
        std::fill(equal_.begin(), equal_.end(), 0);
        std::fill(doubled_sums_.begin(), doubled_sums_.end(), 0);
        k_ = 0;
    }

private:
    void insert(std::size_t sample, Index pos) {
        if (pos >= domain_.size()) throw DomainError("push_indices: index outside the domain");
        std::int64_t less_total = 0;
        std::int64_t equal_total = 0;
        for (std::size_t l = 0; l < c_; ++l) {
            // sample l already holds k_ values, or k_ + 1 if it precedes `sample` in this row
            const auto count = static_cast<std::int64_t>(k_ + (l < sample ? 1 : 0));
            const std::int64_t less = trees_[l].prefix(pos);
            const std::int64_t equal = equal_[l * domain_.size() + pos];
            const std::int64_t greater = count - less - equal;
            doubled_sums_[l] += 2 * greater + equal;
            less_total += less;
            equal_total += equal;
        }
        // new tie group spans ranks less+1 .. less+equal+1
        doubled_sums_[sample] += 2 * less_total + equal_total + 2;
        trees_[sample].add(pos, 1);
        ++equal_[sample * domain_.size() + pos];
    }

    std::vector<double> domain_;
    std::size_t c_;
    std::size_t k_ = 0;
    std::vector<FenwickTree<std::int64_t>> trees_;
    std::vector<std::int64_t> equal_;
    std::vector<std::int64_t> doubled_sums_;
    std::vector<Index> index_scratch_;
};

}  // namespace lqe
