#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>

#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace lqe {

// std::mt19937_64's output sequence is fixed by the standard; Boost
// distributions are used on top of it because std:: distributions differ
// between standard library implementations.
using Engine = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// Independent stream seed for (master, tag_1, ..., tag_m). The same tags
/// always give the same seed, whatever order streams are consumed in.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> tags) noexcept {
    std::uint64_t h = splitmix64(master);
    for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632BE59BD9B4E019ULL));
    return h;
}

inline Engine make_engine(std::uint64_t seed) { return Engine(seed); }

/// Uniform on (0, 1].
inline double uniform_open_zero(Engine& eng) {
    boost::random::uniform_01<double> u;
    return 1.0 - u(eng);
}

/// Uniformly random permutation in place (Fisher-Yates).
template <typename T>
void shuffle(std::span<T> items, Engine& eng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        boost::random::uniform_int_distribution<std::size_t> pick(0, i - 1);
        std::swap(items[i - 1], items[pick(eng)]);
    }
}

}  // namespace lqe
