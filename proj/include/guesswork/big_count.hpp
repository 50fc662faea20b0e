#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

namespace guesswork {

/// Exact guess counts. Ranks of long strings overflow 64 bits (2^1000 for
/// k = 1000 binary strings), so counts are arbitrary precision.
using BigCount = boost::multiprecision::cpp_int;

inline std::optional<std::uint64_t> to_u64(const BigCount& n) {
  if (n < 0 || n > std::numeric_limits<std::uint64_t>::max()) {
    return std::nullopt;
  }
  return n.convert_to<std::uint64_t>();
}

/// Natural logarithm of a positive count, without overflowing a double.
inline double log_of(const BigCount& n) {
  if (n <= 0) {
    return -std::numeric_limits<double>::infinity();
  }
  const auto bits = boost::multiprecision::msb(n);
  if (bits < 62) {
    return std::log(n.convert_to<double>());
  }
  const auto shift = bits - 61;
  const BigCount top = n >> shift;
  return std::log(top.convert_to<double>()) + static_cast<double>(shift) * std::log(2.0);
}

inline std::string to_string(const BigCount& n) { return n.str(); }

} // namespace guesswork
