#pragma once

#include <string>

namespace curesurv {

/// Fixed-precision text used by every result table and report.
inline constexpr int kOutputDigits = 10;

/// `value` with `digits` significant digits ("%.*g" style).
std::string format_number(double value, int digits = kOutputDigits);

/// Shortest text that parses back to exactly `value`.
std::string format_exact(double value);

/// `value` rounded to `digits` significant digits, as a double.
double round_significant(double value, int digits = kOutputDigits);

}  // namespace curesurv
