#pragma once

#include <string>

namespace garchint {

// Shortest-round-trip-safe decimal form with 17 significant digits.
std::string format_double(double v);

}  // namespace garchint
