#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

namespace lqe {

// Binary indexed tree over positions [0, size). Point add, prefix sum.
template <typename T>
class FenwickTree {
public:
    FenwickTree() = default;
    explicit FenwickTree(std::size_t size) : tree_(size + 1, T{}) {}

    std::size_t size() const noexcept { return tree_.empty() ? 0 : tree_.size() - 1; }

    void add(std::size_t pos, T delta) {
        for (std::size_t i = pos + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
    }

    // Sum over [0, end).
    T prefix(std::size_t end) const {
        T sum{};
        for (std::size_t i = end; i > 0; i -= i & (~i + 1)) sum += tree_[i];
        return sum;
    }

    void clear() { std::fill(tree_.begin(), tree_.end(), T{}); }

private:
    std::vector<T> tree_;
};

}  // namespace lqe
