#pragma once

#include <fmt/format.h>

#include <string>

namespace antikz {

// All emitted floats carry 17 significant digits so tables round-trip exactly.
inline std::string fmt_real(double v) { return fmt::format("{:.17g}", v); }

}  // namespace antikz
