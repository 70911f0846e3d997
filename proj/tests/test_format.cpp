#include <limits>
#include <string>

#include <doctest.h>

#include "panelkit/format.hpp"

using namespace panelkit;

namespace {
const double kNaN = std::numeric_limits<double>::quiet_NaN();
}

TEST_CASE("statistics render in an eight-character budget") {
    // Published regression tables, spot-checked digit for digit.
    CHECK(format_statistic(64.00942) == "64.00942");
    CHECK(format_statistic(377.7075) == "377.7075");
    CHECK(format_statistic(6485.240) == "6485.240");
    CHECK(format_statistic(0.421127) == "0.421127");
    CHECK(format_statistic(0.066978) == "0.066978");
    CHECK(format_statistic(16637.50) == "16637.50");
    CHECK(format_statistic(9066.633) == "9066.633");
    CHECK(format_statistic(-984.2615) == "-984.2615");
    CHECK(format_statistic(33.82844) == "33.82844");
}

TEST_CASE("magnitude overflow switches to scientific") {
    CHECK(format_statistic(4.52e9) == "4.52E+09");
    CHECK(format_statistic(-4.52e9) == "-4.52E+09");
    CHECK(format_statistic(123456789.0) == "1.23E+08");
    // Rounding across a power of ten must not widen the cell.
    CHECK(format_statistic(9999.99999) == "10000.00");
    CHECK(format_statistic(99999999.5) == "1.00E+08");
    // Tiny magnitudes keep significant digits instead of rendering 0.000000.
    CHECK(format_statistic(3.2e-17) == "3.20E-17");
}

TEST_CASE("statistic special cases") {
    CHECK(format_statistic(kNaN) == "NA");
    CHECK(format_statistic(0.0) == "0.000000");
    CHECK(format_statistic(1.0) == "1.000000");
    CHECK(format_statistic(-1.5) == "-1.500000");
}

TEST_CASE("fixed and probability formats") {
    CHECK(format_fixed(46.874074, 6) == "46.874074");
    CHECK(format_fixed(0.253945, 6) == "0.253945");
    CHECK(format_fixed(0.7420, 4) == "0.7420");
    CHECK(format_fixed(kNaN, 6) == "NA");
    CHECK(format_probability(0.0452) == "0.0452");
    CHECK(format_probability(0.00004) == "0.0000");
    CHECK(format_probability(1.0) == "1.0000");
    CHECK(format_probability(0.0504, 3) == "0.050");
    CHECK(format_probability(kNaN) == "NA");
}
