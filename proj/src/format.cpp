#include "panelkit/format.hpp"

#include <cmath>
#include <cstdio>

namespace panelkit {

namespace {

// Total character budget for the digits and decimal point of a table cell.
constexpr int kCellWidth = 8;

std::string printf_string(const char* fmt, int decimals, double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, decimals, x);
    return buf;
}

}  // namespace

std::string format_statistic(double x) {
    if (std::isnan(x)) return "NA";
    if (x == 0.0) return "0.000000";

    const double ax = std::fabs(x);
    // Digits left of the point once rounded to a representable width. The
    // +0.5 ulp nudge is unnecessary here: snprintf re-rounds anyway and a
    // value such as 9999.9996 widening to 10000.000 still fits the budget.
    int int_digits = ax < 1.0 ? 1 : static_cast<int>(std::floor(std::log10(ax))) + 1;
    if (int_digits > kCellWidth || ax < 1e-15) {
        return printf_string("%.*E", 2, x);
    }
    int decimals = kCellWidth - int_digits - 1;  // -1 for the point itself
    if (decimals < 0) decimals = 0;
    std::string out = printf_string("%.*f", decimals, x);
    // Rounding can add an integer digit (9999.9999 -> 10000.000); reformat
    // once with one fewer decimal so the width stays put, or fall back to
    // scientific when there is no decimal left to drop.
    const std::size_t width = out.size() - (x < 0.0 ? 1 : 0);
    if (width > kCellWidth) {
        if (decimals == 0) return printf_string("%.*E", 2, x);
        out = printf_string("%.*f", decimals - 1, x);
    }
    return out;
}

std::string format_fixed(double x, int decimals) {
    if (std::isnan(x)) return "NA";
    return printf_string("%.*f", decimals, x);
}

std::string format_probability(double p, int decimals) {
    if (std::isnan(p)) return "NA";
    return printf_string("%.*f", decimals, p);
}

}  // namespace panelkit
