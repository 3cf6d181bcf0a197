// Curve config files (JSON): fields A, B, conductor, base_root_number,
// optional root-rule table and override path.
#pragma once

#include "twistlab/curve.hpp"

#include <string>

namespace twistlab {

/// Loads and validates a curve config. Throws std::invalid_argument on a
/// missing file, malformed JSON, or an invalid curve.
BaseCurve load_curve(const std::string& path);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace twistlab
