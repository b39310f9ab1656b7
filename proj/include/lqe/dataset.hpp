#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lqe/errors.hpp"

namespace lqe {

/// n observation vectors X_1..X_n, each with one coordinate per sample
/// (c >= 2 samples). Stored row-major; row i is the vector X_i and column l
/// holds sample l.
class CSampleDataset {
public:
    CSampleDataset() = default;

    CSampleDataset(std::size_t rows, std::size_t samples, std::vector<double> values)
        : n_(rows), c_(samples), values_(std::move(values)) {
        if (n_ < 1) throw DomainError("dataset needs at least one row");
        if (c_ < 2) throw DomainError("dataset needs at least two samples");
        if (values_.size() != n_ * c_)
            throw DomainError("dataset value count does not match rows x samples");
        for (double v : values_)
            if (!std::isfinite(v)) throw DomainError("dataset contains a non-finite value");
    }

    static CSampleDataset from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) throw DomainError("dataset needs at least one row");
        const std::size_t c = rows.front().size();
        std::vector<double> flat;
        flat.reserve(rows.size() * c);
        for (const auto& r : rows) {
            if (r.size() != c) throw DomainError("ragged rows");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return CSampleDataset(rows.size(), c, std::move(flat));
    }

    std::size_t rows() const noexcept { return n_; }
    std::size_t samples() const noexcept { return c_; }

    std::span<const double> row(std::size_t i) const { return {values_.data() + i * c_, c_}; }
    double operator()(std::size_t i, std::size_t l) const { return values_[i * c_ + l]; }
    std::span<const double> values() const noexcept { return values_; }

    std::vector<double> column(std::size_t l) const {
        std::vector<double> out(n_);
        for (std::size_t i = 0; i < n_; ++i) out[i] = values_[i * c_ + l];
        return out;
    }

    /// Optional sample names (CSV header). Empty when not provided.
    const std::vector<std::string>& names() const noexcept { return names_; }
    void set_names(std::vector<std::string> names) {
        if (!names.empty() && names.size() != c_) throw DomainError("name count does not match samples");
        names_ = std::move(names);
    }

    friend bool operator==(const CSampleDataset& a, const CSampleDataset& b) {
        return a.n_ == b.n_ && a.c_ == b.c_ && a.values_ == b.values_;
    }

private:
    std::size_t n_ = 0;
    std::size_t c_ = 0;
    std::vector<double> values_;
    std::vector<std::string> names_;
};

}  // namespace lqe
