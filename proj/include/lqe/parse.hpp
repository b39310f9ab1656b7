#pragma once

#include <charconv>
#include <cstdint>
#include <string>
#include <string_view>

#include "lqe/errors.hpp"

namespace lqe {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

/// Whole-string decimal parse; throws DomainError naming `what`.
inline double parse_double(std::string_view text, const std::string& what) {
    const auto s = trim(text);
    double v = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        throw DomainError(what + ": '" + std::string(text) + "' is not a number");
    return v;
}

inline std::uint64_t parse_unsigned(std::string_view text, const std::string& what) {
    const auto s = trim(text);
    std::uint64_t v = 0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || end != s.data() + s.size())
        throw DomainError(what + ": '" + std::string(text) + "' is not a non-negative integer");
    return v;
}

}  // namespace lqe
