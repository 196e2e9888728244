#pragma once

#include <string>

namespace extqv {

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

}  // namespace extqv
