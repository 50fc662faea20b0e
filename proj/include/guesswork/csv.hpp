#pragma once

#include <string>

namespace guesswork {

/// Round-trippable decimal text for a double; "inf" / "-inf" for infinities
/// and "nan" for NaN. Output is locale independent.
std::string format_number(double value);

} // namespace guesswork
