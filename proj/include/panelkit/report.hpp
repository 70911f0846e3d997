#pragma once

#include <string>
#include <vector>

#include "panelkit/factor.hpp"
#include "panelkit/hausman.hpp"
#include "panelkit/panel.hpp"

namespace panelkit {

/// One table cell. Numeric cells keep the raw value next to the rendered
/// text so the JSON and text outputs are two views of the same numbers.
struct Cell {
    enum class Kind { Blank, Text, Number, Integer };
    Kind kind = Kind::Blank;
    std::string text;
    double value = 0.0;
    long ivalue = 0;

    static Cell blank();
    static Cell label(std::string text);
    static Cell statistic(double x);             // width-filling table format
    static Cell fixed(double x, int decimals);   // fixed decimal places
    static Cell probability(double p, int decimals = 4);
    static Cell integer(long n);
};

struct HeaderLine {
    std::string label;  // "" renders the value as a bare line
    std::string value;
};

struct ReportTable {
    std::string name;                  // machine-readable key in JSON
    std::string heading;               // centered section heading, "" = none
    std::vector<std::string> columns;  // header row; empty = no header
    std::vector<std::vector<Cell>> rows;
};

struct ReportDocument {
    std::string title;
    std::vector<HeaderLine> header;
    std::vector<ReportTable> tables;
    std::vector<std::string> footnotes;
    std::vector<std::string> warnings;
    // true: every table shares one ruled width (regression-report style);
    // false: each table is a standalone block (factor-report style).
    bool shared_width = true;
};

/// Fixed-width text rendering; deterministic and locale-independent, so the
/// same document is byte-identical across runs and platforms.
std::string to_text(const ReportDocument& doc);

/// JSON rendering with a top-level schema marker; numeric cells carry full
/// double precision, the text mode's rounding is cosmetic.
std::string to_json_string(const ReportDocument& doc);

ReportDocument build_fit_report(const PanelFit& panel_fit);
ReportDocument build_hausman_report(const HausmanResult& result);
ReportDocument build_factor_report(const FactorSolution& solution,
                                   double suppress_threshold = 0.10,
                                   double loading_cutoff = 0.60);

}  // namespace panelkit
