#include "guesswork/csv.hpp"

#include <cmath>
#include <cstdio>

namespace guesswork {

std::string format_number(double value) {
  if (std::isnan(value)) {
    return "nan";
  }
  if (std::isinf(value)) {
    return value > 0 ? "inf" : "-inf";
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

} // namespace guesswork
