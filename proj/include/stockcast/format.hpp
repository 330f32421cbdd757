#pragma once

#include <string>

namespace stockcast {

/// Shortest decimal text that reads back to the same double. Non-finite
/// values print as nan, inf, -inf.
[[nodiscard]] std::string format_double(double value);

/// Fixed notation with the given number of decimals.
[[nodiscard]] std::string format_fixed(double value, int decimals);

}  // namespace stockcast
