#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mcpgw::util {

std::string_view trim(std::string_view s) noexcept;
std::string to_lower(std::string_view s);
std::vector<std::string_view> split_lines(std::string_view s);
bool starts_with_ci(std::string_view s, std::string_view prefix) noexcept;

/// Levenshtein distance over bytes.
std::size_t edit_distance(std::string_view a, std::string_view b);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(std::string_view s, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

/// Fixed-point rendering of `numerator / denominator * 100` to two decimals,
/// rounding half up in exact integer arithmetic. Denominator must be positive.
std::string percent_2dp(std::int64_t numerator, std::int64_t denominator);

/// Same rounding rule applied to a double (used for means).
std::string fixed_2dp(double value);

/// UTC timestamp, ISO 8601 with milliseconds.
std::string utc_timestamp_now();

}  // namespace mcpgw::util
