#pragma once

#include <string>

namespace osplab {

/// Shortest round-trip decimal form; infinities print as "inf" / "-inf".
std::string format_double(double value);

}  // namespace osplab
