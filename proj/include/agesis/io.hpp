#pragma once

#include <string>

namespace agesis::io {

/// Deterministic double formatting for CSV output (%.12g, locale-free).
std::string fmt(double x);

} // namespace agesis::io
