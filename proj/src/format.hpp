#pragma once

#include <string>

#include <fmt/format.h>

namespace gho::detail {

// Shortest representation that round-trips; output is byte-identical across runs.
inline std::string num(double v) { return fmt::format("{}", v); }

}  // namespace gho::detail
