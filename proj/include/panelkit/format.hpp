#pragma once

#include <string>

namespace panelkit {

/// Table number in the classic econometrics-package layout: 8 characters of
/// digits-plus-point (sign extra), i.e. decimals fill whatever the integer
/// part leaves free; scientific notation with 2 decimals once the integer
/// part alone would overflow the width. NaN renders as "NA".
std::string format_statistic(double x);

/// Fixed-decimal cell (coefficient comparisons, probabilities). Values whose
/// rounded form would show as zero print as plain "0.0000..." of the chosen
/// width; NaN renders as "NA".
std::string format_fixed(double x, int decimals);

/// Probability with 4 decimals by default; anything below half the last
/// printed digit shows as 0.0000, mirroring published tables.
std::string format_probability(double p, int decimals = 4);

}  // namespace panelkit
