#pragma once

#include <string>

namespace kdict {

/// Shortest decimal string that parses back to the same double. Infinities
/// print as "inf"/"-inf", NaN as "nan".
std::string format_double(double value);

/// Inverse of format_double; throws ParseError on malformed text.
double parse_double(const std::string& text);

}  // namespace kdict
