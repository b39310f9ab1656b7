#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/random/normal_distribution.hpp>

#include "lqe/dataset.hpp"
#include "lqe/errors.hpp"
#include "lqe/random.hpp"

namespace lqe {

enum class Family { normal, exponential };

/// Distribution of one simulated observation vector (c = 3): a possibly
/// dependent pair in columns 1-2 plus an independent third column.
///
/// Column l has mean base_mean + shifts[l]. Normal columns are shifted in
/// location with standard deviation `sd`. Exponential columns are rescaled to
/// hit the target mean (Exp(1/mean) marginals), which keeps the dependence
/// structure of the pair.
struct DependenceSpec {
    enum class Kind { independent, normal_rho, marshall_olkin };

    Family family = Family::normal;
    Kind kind = Kind::independent;
    double rho = 0.0;
    std::array<double, 3> lambdas{1.0, 1.0, 1.0};
    double base_mean = 0.0;
    double sd = 1.0;
    std::array<double, 3> shifts{0.0, 0.0, 0.0};

    static DependenceSpec independent_normal(double mean, double sd) {
        DependenceSpec s;
        s.base_mean = mean;
        s.sd = sd;
        return s;
    }

    static DependenceSpec dependent_normal(double rho, double mean = 0.0, double sd = 1.0) {
        DependenceSpec s = independent_normal(mean, sd);
        s.kind = Kind::normal_rho;
        s.rho = rho;
        return s;
    }

    static DependenceSpec independent_exponential(double rate) {
        DependenceSpec s;
        s.family = Family::exponential;
        s.base_mean = 1.0 / rate;
        return s;
    }

    static DependenceSpec dependent_exponential(std::array<double, 3> lambdas, double rate) {
        DependenceSpec s = independent_exponential(rate);
        s.kind = Kind::marshall_olkin;
        s.lambdas = lambdas;
        return s;
    }

    double column_mean(std::size_t l) const { return base_mean + shifts.at(l); }

    void validate() const {
        if (kind == Kind::normal_rho && family != Family::normal)
            throw DomainError("normal_rho dependence needs the normal family");
        if (kind == Kind::marshall_olkin && family != Family::exponential)
            throw DomainError("marshall_olkin dependence needs the exponential family");
        if (kind == Kind::normal_rho && !(std::abs(rho) <= 1.0)) throw DomainError("|rho| must be at most 1");
        if (kind == Kind::marshall_olkin) {
            for (double l : lambdas)
                if (!(l >= 0.0) || !std::isfinite(l)) throw DomainError("Marshall-Olkin rates must be >= 0");
            if (!(lambdas[0] + lambdas[2] > 0.0) || !(lambdas[1] + lambdas[2] > 0.0))
                throw DomainError("Marshall-Olkin: each coordinate needs a positive total rate");
        }
        if (family == Family::normal && !(sd > 0.0)) throw DomainError("normal sd must be positive");
        for (std::size_t l = 0; l < 3; ++l) {
            if (!std::isfinite(column_mean(l))) throw DomainError("column mean must be finite");
            if (family == Family::exponential && !(column_mean(l) > 0.0))
                throw DomainError("exponential column means must be positive");
        }
    }

    /// Short label for reports, e.g. "Normal(2,1)" or "Exp(4) MO(1,1,1)".
    std::string label() const {
        std::ostringstream os;
        os.precision(6);
        if (family == Family::normal)
            os << "Normal(" << base_mean << "," << sd << ")";
        else if (base_mean > 0.0)
            os << "Exp(" << 1.0 / base_mean << ")";
        else
            os << "Exp";
        if (kind == Kind::normal_rho) os << " rho=" << rho;
        if (kind == Kind::marshall_olkin)
            os << " MO(" << lambdas[0] << "," << lambdas[1] << "," << lambdas[2] << ")";
        return os.str();
    }
};

/// n standard normal pairs with correlation rho. Draws X with i.i.d. N(0,1)
/// entries and returns Y = X L^T where L is the lower Cholesky factor of
/// [[1, rho], [rho, 1]] (L L^T = Sigma).
inline std::vector<std::array<double, 2>> gen_bivariate_normal(double rho, std::size_t n, std::uint64_t seed) {
    if (!(std::abs(rho) <= 1.0)) throw DomainError("gen_bivariate_normal: |rho| must be at most 1");
    const double l21 = rho;
    const double l22 = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    Engine eng = make_engine(seed);
    boost::random::normal_distribution<double> normal;
    std::vector<std::array<double, 2>> out(n);
    for (auto& y : out) {
        const double x1 = normal(eng);
        const double x2 = normal(eng);
        y = {x1, l21 * x1 + l22 * x2};
    }
    return out;
}

namespace detail {

// -ln(U)/rate with U uniform on (0,1]; a zero rate drops the branch.
inline double exponential_branch(Engine& eng, double rate) {
    const double u = uniform_open_zero(eng);
    if (rate == 0.0) return std::numeric_limits<double>::infinity();
    return -std::log(u) / rate;
}

}  // namespace detail

/// Marshall-Olkin bivariate exponential pairs:
///   X1 = min(-ln U / l1, -ln V / l3),  X2 = min(-ln S / l2, -ln V / l3)
/// giving X1 ~ Exp(l1 + l3), X2 ~ Exp(l2 + l3), corr = l3 / (l1 + l2 + l3).
inline std::vector<std::array<double, 2>> gen_marshall_olkin(double l1, double l2, double l3, std::size_t n,
                                                             std::uint64_t seed) {
    if (!(l1 >= 0.0 && l2 >= 0.0 && l3 >= 0.0)) throw DomainError("gen_marshall_olkin: rates must be >= 0");
    if (!(l1 + l3 > 0.0) || !(l2 + l3 > 0.0))
        throw DomainError("gen_marshall_olkin: each coordinate needs a positive total rate");
    Engine eng = make_engine(seed);
    std::vector<std::array<double, 2>> out(n);
    for (auto& x : out) {
        const double u = detail::exponential_branch(eng, l1);
        const double v = detail::exponential_branch(eng, l3);
        const double s = detail::exponential_branch(eng, l2);
        x = {std::min(u, v), std::min(s, v)};
    }
    return out;
}

/// Three-sample dataset drawn from `spec`.
inline CSampleDataset gen_c_sample(const DependenceSpec& spec, std::size_t n, std::uint64_t seed) {
    spec.validate();
    if (n < 1) throw DomainError("gen_c_sample: need at least one row");
    constexpr std::size_t c = 3;
    // standardized draws: N(0,1) for the normal family, Exp(1) for exponential
    std::vector<double> z(n * c);

    auto independent_column = [&](std::size_t l) {
        Engine eng = make_engine(derive_seed(seed, {l + 1}));
        boost::random::normal_distribution<double> normal;
        for (std::size_t i = 0; i < n; ++i)
            z[i * c + l] = spec.family == Family::normal ? normal(eng) : detail::exponential_branch(eng, 1.0);
    };

    switch (spec.kind) {
        case DependenceSpec::Kind::independent:
            for (std::size_t l = 0; l < c; ++l) independent_column(l);
            break;
        case DependenceSpec::Kind::normal_rho: {
            const auto pairs = gen_bivariate_normal(spec.rho, n, derive_seed(seed, {0}));
            for (std::size_t i = 0; i < n; ++i) {
                z[i * c] = pairs[i][0];
                z[i * c + 1] = pairs[i][1];
            }
            independent_column(2);
            break;
        }
        case DependenceSpec::Kind::marshall_olkin: {
            const auto [l1, l2, l3] = spec.lambdas;
            const auto pairs = gen_marshall_olkin(l1, l2, l3, n, derive_seed(seed, {0}));
            for (std::size_t i = 0; i < n; ++i) {
                z[i * c] = pairs[i][0] * (l1 + l3);
                z[i * c + 1] = pairs[i][1] * (l2 + l3);
            }
            independent_column(2);
            break;
        }
    }

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t l = 0; l < c; ++l) {
            double& v = z[i * c + l];
            v = spec.family == Family::normal ? spec.column_mean(l) + spec.sd * v : spec.column_mean(l) * v;
        }
    return CSampleDataset(n, c, std::move(z));
}

}  // namespace lqe
