#include "panelkit/report.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "panelkit/format.hpp"

namespace panelkit {

Cell Cell::blank() { return Cell{}; }

Cell Cell::label(std::string text) {
    Cell c;
    c.kind = Kind::Text;
    c.text = std::move(text);
    return c;
}

Cell Cell::statistic(double x) {
    Cell c;
    c.kind = Kind::Number;
    c.value = x;
    c.text = format_statistic(x);
    return c;
}

Cell Cell::fixed(double x, int decimals) {
    Cell c;
    c.kind = Kind::Number;
    c.value = x;
    c.text = format_fixed(x, decimals);
    return c;
}

Cell Cell::probability(double p, int decimals) {
    Cell c;
    c.kind = Kind::Number;
    c.value = p;
    c.text = format_probability(p, decimals);
    return c;
}

Cell Cell::integer(long n) {
    Cell c;
    c.kind = Kind::Integer;
    c.ivalue = n;
    c.value = static_cast<double>(n);
    c.text = std::to_string(n);
    return c;
}

namespace {

constexpr int kColumnGap = 2;

std::size_t table_column_count(const ReportTable& table) {
    std::size_t n = table.columns.size();
    for (const auto& row : table.rows) n = std::max(n, row.size());
    return n;
}

std::vector<std::size_t> column_widths(const ReportTable& table, std::size_t n_cols) {
    std::vector<std::size_t> widths(n_cols, 0);
    for (std::size_t j = 0; j < table.columns.size(); ++j) {
        widths[j] = std::max(widths[j], table.columns[j].size());
    }
    for (const auto& row : table.rows) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            widths[j] = std::max(widths[j], row[j].text.size());
        }
    }
    return widths;
}

void append_padded(std::string& out, const std::string& text, std::size_t width,
                   bool right_align) {
    const std::size_t pad = width > text.size() ? width - text.size() : 0;
    if (right_align) out.append(pad, ' ');
    out += text;
    if (!right_align) out.append(pad, ' ');
}

std::size_t natural_width(const ReportTable& table) {
    const std::size_t n_cols = table_column_count(table);
    if (n_cols == 0) return table.heading.size();
    std::vector<std::size_t> widths = column_widths(table, n_cols);
    std::size_t natural = kColumnGap * (n_cols - 1);
    for (std::size_t w : widths) natural += w;
    return std::max(natural, table.heading.size());
}

void render_table(std::string& out, const ReportTable& table, std::size_t doc_width,
                  bool with_top_rule) {
    const std::size_t n_cols = table_column_count(table);
    if (n_cols == 0) return;
    std::vector<std::size_t> widths = column_widths(table, n_cols);

    std::size_t natural = kColumnGap * (n_cols - 1);
    for (std::size_t w : widths) natural += w;
    // Stretch the label column so the right edge of the numbers stays flush
    // with the rules.
    if (doc_width > natural) widths[0] += doc_width - natural;

    const std::string rule_heavy(doc_width, '=');
    const std::string rule_light(doc_width, '-');

    if (with_top_rule) {
        out += rule_heavy;
        out += '\n';
    }
    if (!table.heading.empty()) {
        const std::size_t pad =
            doc_width > table.heading.size() ? (doc_width - table.heading.size()) / 2 : 0;
        out.append(pad, ' ');
        out += table.heading;
        out += '\n';
        out += rule_light;
        out += '\n';
    }
    if (!table.columns.empty()) {
        std::string line;
        for (std::size_t j = 0; j < n_cols; ++j) {
            if (j > 0) line.append(kColumnGap, ' ');
            append_padded(line, j < table.columns.size() ? table.columns[j] : "", widths[j],
                          j > 0);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
        out += rule_light;
        out += '\n';
    }
    for (const auto& row : table.rows) {
        std::string line;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j > 0) line.append(kColumnGap, ' ');
            const Cell& cell = row[j];
            const bool right =
                cell.kind == Cell::Kind::Number || cell.kind == Cell::Kind::Integer;
            append_padded(line, cell.text, widths[j], right);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line;
        out += '\n';
    }
    out += rule_heavy;
    out += '\n';
}

nlohmann::json cell_to_json(const Cell& cell) {
    switch (cell.kind) {
        case Cell::Kind::Blank:
            return nullptr;
        case Cell::Kind::Text:
            return cell.text;
        case Cell::Kind::Integer:
            return nlohmann::json{{"value", cell.ivalue}, {"text", cell.text}};
        case Cell::Kind::Number:
        default:
            if (std::isnan(cell.value)) {
                return nlohmann::json{{"value", nullptr}, {"text", cell.text}};
            }
            return nlohmann::json{{"value", cell.value}, {"text", cell.text}};
    }
}

}  // namespace

std::string to_text(const ReportDocument& doc) {
    std::string out;
    if (!doc.title.empty()) {
        out += doc.title;
        out += '\n';
    }
    for (const auto& line : doc.header) {
        if (!line.label.empty()) {
            out += line.label;
            out += ": ";
        }
        out += line.value;
        out += '\n';
    }
    for (const auto& warning : doc.warnings) {
        out += "** ";
        out += warning;
        out += '\n';
    }
    if (doc.shared_width) {
        // One shared width keeps the section rules flush across tables.
        std::size_t doc_width = 0;
        for (const auto& table : doc.tables) {
            doc_width = std::max(doc_width, natural_width(table));
        }
        bool first = true;
        for (const auto& table : doc.tables) {
            render_table(out, table, doc_width, first);
            first = false;
        }
    } else {
        bool first = true;
        for (const auto& table : doc.tables) {
            if (!first) out += '\n';
            render_table(out, table, natural_width(table), true);
            first = false;
        }
    }
    for (const auto& note : doc.footnotes) {
        out += note;
        out += '\n';
    }
    return out;
}

std::string to_json_string(const ReportDocument& doc) {
    nlohmann::json j;
    j["schema"] = "panelkit/1";
    j["title"] = doc.title;
    j["header"] = nlohmann::json::array();
    for (const auto& line : doc.header) {
        j["header"].push_back({{"label", line.label}, {"value", line.value}});
    }
    j["warnings"] = doc.warnings;
    j["tables"] = nlohmann::json::array();
    for (const auto& table : doc.tables) {
        nlohmann::json jt;
        jt["name"] = table.name;
        jt["heading"] = table.heading;
        jt["columns"] = table.columns;
        jt["rows"] = nlohmann::json::array();
        for (const auto& row : table.rows) {
            nlohmann::json jr = nlohmann::json::array();
            for (const auto& cell : row) jr.push_back(cell_to_json(cell));
            jt["rows"].push_back(std::move(jr));
        }
        j["tables"].push_back(std::move(jt));
    }
    j["footnotes"] = doc.footnotes;
    return j.dump(2) + "\n";
}

namespace {

std::string method_line(const PanelFit& fit) {
    switch (fit.model) {
        case PanelModel::Pooled:
            return "Panel Least Squares";
        case PanelModel::Fixed:
            return fit.weighting == PanelWeighting::CrossSection
                       ? "Panel EGLS (Cross-section weights)"
                       : "Panel Least Squares";
        case PanelModel::Random:
        default:
            return "Panel EGLS (Cross-section random effects)";
    }
}

void add_shape_header(ReportDocument& doc, const PanelInfo& info) {
    doc.header.push_back({"Sample", info.first_period + " " + info.last_period});
    doc.header.push_back({"Periods included", std::to_string(info.n_periods)});
    doc.header.push_back({"Cross-sections included", std::to_string(info.n_entities)});
    doc.header.push_back(
        {"Total panel (balanced) observations", std::to_string(info.n_obs)});
}

void add_pair(ReportTable& table, const std::string& left_label, Cell left_value,
              const std::string& right_label, Cell right_value) {
    table.rows.push_back({Cell::label(left_label), std::move(left_value),
                          right_label.empty() ? Cell::blank() : Cell::label(right_label),
                          std::move(right_value)});
}

ReportTable full_statistics_table(const FitStats& stats) {
    ReportTable table;
    table.name = "statistics";
    add_pair(table, "R-squared", Cell::statistic(stats.r_squared),
             "Mean dependent var", Cell::statistic(stats.mean_dep));
    add_pair(table, "Adjusted R-squared", Cell::statistic(stats.adj_r_squared),
             "S.D. dependent var", Cell::statistic(stats.sd_dep));
    add_pair(table, "S.E. of regression", Cell::statistic(stats.se_regression),
             "Akaike info criterion", Cell::statistic(stats.aic));
    add_pair(table, "Sum squared resid", Cell::statistic(stats.ssr),
             "Schwarz criterion", Cell::statistic(stats.schwarz));
    add_pair(table, "Log likelihood", Cell::statistic(stats.log_likelihood),
             "Hannan-Quinn criter.", Cell::statistic(stats.hannan_quinn));
    add_pair(table, "F-statistic", Cell::statistic(stats.f_statistic),
             "Durbin-Watson stat", Cell::statistic(stats.durbin_watson));
    add_pair(table, "Prob(F-statistic)", Cell::fixed(stats.f_prob, 6), "", Cell::blank());
    return table;
}

ReportTable weighted_statistics_table(const FitStats& stats) {
    ReportTable table;
    table.name = "weighted_statistics";
    table.heading = "Weighted Statistics";
    add_pair(table, "R-squared", Cell::statistic(stats.r_squared),
             "Mean dependent var", Cell::statistic(stats.mean_dep));
    add_pair(table, "Adjusted R-squared", Cell::statistic(stats.adj_r_squared),
             "S.D. dependent var", Cell::statistic(stats.sd_dep));
    add_pair(table, "S.E. of regression", Cell::statistic(stats.se_regression),
             "Sum squared resid", Cell::statistic(stats.ssr));
    add_pair(table, "F-statistic", Cell::statistic(stats.f_statistic),
             "Durbin-Watson stat", Cell::statistic(stats.durbin_watson));
    add_pair(table, "Prob(F-statistic)", Cell::fixed(stats.f_prob, 6), "", Cell::blank());
    return table;
}

ReportTable unweighted_statistics_table(const FitStats& stats) {
    ReportTable table;
    table.name = "unweighted_statistics";
    table.heading = "Unweighted Statistics";
    add_pair(table, "R-squared", Cell::statistic(stats.r_squared),
             "Mean dependent var", Cell::statistic(stats.mean_dep));
    add_pair(table, "Sum squared resid", Cell::statistic(stats.ssr),
             "Durbin-Watson stat", Cell::statistic(stats.durbin_watson));
    return table;
}

}  // namespace

ReportDocument build_fit_report(const PanelFit& panel_fit) {
    const PanelInfo& info = panel_fit.info;
    ReportDocument doc;
    doc.header.push_back({"Dependent Variable", info.dependent});
    doc.header.push_back({"Method", method_line(panel_fit)});
    add_shape_header(doc, info);
    if (panel_fit.model == PanelModel::Random) {
        doc.header.push_back({"", "Swamy and Arora estimator of component variances"});
    }
    if (panel_fit.weighting == PanelWeighting::CrossSection) {
        doc.header.push_back({"", "Linear estimation after one-step weighting matrix"});
    }
    doc.warnings = panel_fit.warnings;

    ReportTable coef;
    coef.name = "coefficients";
    coef.columns = {"Variable", "Coefficient", "Std. Error", "t-Statistic", "Prob."};
    const long k = static_cast<long>(info.regressors.size());
    for (long j = 0; j <= k; ++j) {
        const std::string name =
            j < k ? info.regressors[static_cast<std::size_t>(j)] : std::string("C");
        coef.rows.push_back({Cell::label(name),
                             Cell::statistic(panel_fit.fit.coefficients(j)),
                             Cell::statistic(panel_fit.fit.std_errors(j)),
                             Cell::statistic(panel_fit.fit.t_stats(j)),
                             Cell::probability(panel_fit.fit.p_values(j))});
    }
    doc.tables.push_back(std::move(coef));

    if (panel_fit.model == PanelModel::Fixed) {
        ReportTable effects;
        effects.name = "effects_specification";
        effects.heading = "Effects Specification";
        effects.rows.push_back({Cell::label("Cross-section fixed (dummy variables)")});
        doc.tables.push_back(std::move(effects));
    } else if (panel_fit.model == PanelModel::Random && panel_fit.components) {
        const VarianceComponents& vc = *panel_fit.components;
        ReportTable effects;
        effects.name = "effects_specification";
        effects.heading = "Effects Specification";
        effects.columns = {"", "S.D.", "Rho"};
        effects.rows.push_back({Cell::label("Cross-section random"),
                                Cell::statistic(vc.sigma_u), Cell::fixed(vc.rho_u, 4)});
        effects.rows.push_back({Cell::label("Idiosyncratic random"),
                                Cell::statistic(vc.sigma_e), Cell::fixed(vc.rho_e, 4)});
        doc.tables.push_back(std::move(effects));
    }

    if (panel_fit.weighted_stats && panel_fit.unweighted_stats) {
        doc.tables.push_back(weighted_statistics_table(*panel_fit.weighted_stats));
        doc.tables.push_back(unweighted_statistics_table(*panel_fit.unweighted_stats));
    } else {
        doc.tables.push_back(full_statistics_table(panel_fit.fit.stats));
    }

    doc.footnotes.push_back("Estimation equation: " + equation_text(panel_fit));
    return doc;
}

ReportDocument build_hausman_report(const HausmanResult& result) {
    ReportDocument doc;
    doc.title = "Correlated Random Effects - Hausman Test";
    doc.header.push_back({"Test", "cross-section random effects"});
    if (result.info.n_obs > 0) {
        doc.header.push_back({"Dependent Variable", result.info.dependent});
        add_shape_header(doc, result.info);
    }
    doc.warnings = result.warnings;

    ReportTable summary;
    summary.name = "test_summary";
    summary.columns = {"Test Summary", "Chi-Sq. Statistic", "Chi-Sq. d.f.", "Prob."};
    summary.rows.push_back({Cell::label("Cross-section random"),
                            Cell::fixed(result.statistic, 6), Cell::integer(result.df),
                            Cell::probability(result.p_value)});
    doc.tables.push_back(std::move(summary));

    ReportTable rows;
    rows.name = "comparisons";
    rows.heading = "Cross-section random effects test comparisons:";
    rows.columns = {"Variable", "Fixed", "Random", "Var(Diff.)", "Prob."};
    for (const auto& row : result.per_variable) {
        rows.rows.push_back({Cell::label(row.name), Cell::fixed(row.fixed_coef, 6),
                             Cell::fixed(row.random_coef, 6), Cell::fixed(row.var_diff, 6),
                             Cell::probability(row.prob)});
    }
    doc.tables.push_back(std::move(rows));

    if (!result.covariance_note.empty()) {
        doc.footnotes.push_back("Note: " + result.covariance_note);
    }
    return doc;
}

ReportDocument build_factor_report(const FactorSolution& solution, double suppress_threshold,
                                   double loading_cutoff) {
    const long p = static_cast<long>(solution.variables.size());
    const long m = solution.retained;
    const double dp = static_cast<double>(p);

    ReportDocument doc;
    doc.title = "Principal Component Factor Analysis";
    doc.shared_width = false;
    doc.header.push_back({"Variables", std::to_string(p)});
    doc.header.push_back({"Observations", std::to_string(solution.n_obs)});
    doc.header.push_back({"Extraction Method", "Principal Component Analysis"});
    doc.header.push_back({"Rotation Method", solution.rotated
                                                  ? "Varimax with Kaiser Normalization"
                                                  : "none"});
    doc.warnings = solution.warnings;

    ReportTable adequacy;
    adequacy.name = "adequacy";
    adequacy.heading = "KMO and Bartlett's Test";
    adequacy.rows.push_back({Cell::label("Kaiser-Meyer-Olkin Measure of Sampling Adequacy"),
                             Cell::fixed(solution.kmo, 3)});
    adequacy.rows.push_back({Cell::label("Bartlett's Test of Sphericity  Approx. Chi-Square"),
                             Cell::fixed(solution.bartlett.chi_square, 3)});
    adequacy.rows.push_back({Cell::label("  df"), Cell::integer(solution.bartlett.df)});
    adequacy.rows.push_back(
        {Cell::label("  Sig."), Cell::probability(solution.bartlett.p_value, 3)});
    doc.tables.push_back(std::move(adequacy));

    ReportTable variance;
    variance.name = "total_variance_explained";
    variance.heading = "Total Variance Explained";
    variance.columns = {"Component", "Initial Total", "% of Variance", "Cumulative %",
                        "Extraction Total", "% of Variance", "Cumulative %"};
    if (solution.rotated) {
        variance.columns.insert(variance.columns.end(),
                                {"Rotation Total", "% of Variance", "Cumulative %"});
    }
    double rotation_cum = 0.0;
    for (long f = 0; f < p; ++f) {
        std::vector<Cell> row;
        row.push_back(Cell::integer(f + 1));
        row.push_back(Cell::fixed(solution.eigenvalues(f), 3));
        row.push_back(Cell::fixed(solution.pct_variance(f), 3));
        row.push_back(Cell::fixed(solution.cumulative_pct(f), 3));
        if (f < m) {
            row.push_back(Cell::fixed(solution.eigenvalues(f), 3));
            row.push_back(Cell::fixed(solution.pct_variance(f), 3));
            row.push_back(Cell::fixed(solution.cumulative_pct(f), 3));
            if (solution.rotated) {
                const double pct = 100.0 * solution.rotation_ssl(f) / dp;
                rotation_cum += pct;
                row.push_back(Cell::fixed(solution.rotation_ssl(f), 3));
                row.push_back(Cell::fixed(pct, 3));
                row.push_back(Cell::fixed(rotation_cum, 3));
            }
        }
        variance.rows.push_back(std::move(row));
    }
    doc.tables.push_back(std::move(variance));

    ReportTable communalities;
    communalities.name = "communalities";
    communalities.heading = "Communalities";
    communalities.columns = {"", "Initial", "Extraction"};
    for (long j = 0; j < p; ++j) {
        communalities.rows.push_back({Cell::label(solution.variables[static_cast<std::size_t>(j)]),
                                      Cell::fixed(1.0, 3),
                                      Cell::fixed(solution.communalities(j), 3)});
    }
    doc.tables.push_back(std::move(communalities));

    ReportTable matrix;
    matrix.name = solution.rotated ? "rotated_component_matrix" : "component_matrix";
    matrix.heading = solution.rotated ? "Rotated Component Matrix" : "Component Matrix";
    matrix.columns.push_back("");
    for (long f = 1; f <= m; ++f) matrix.columns.push_back(std::to_string(f));
    for (long j = 0; j < p; ++j) {
        std::vector<Cell> row;
        row.push_back(Cell::label(solution.variables[static_cast<std::size_t>(j)]));
        for (long f = 0; f < m; ++f) {
            const double loading = solution.rotated_loadings(j, f);
            row.push_back(std::fabs(loading) < suppress_threshold ? Cell::blank()
                                                                  : Cell::fixed(loading, 3));
        }
        matrix.rows.push_back(std::move(row));
    }
    doc.tables.push_back(std::move(matrix));

    // Factor cards: who loads where, at the reporting cutoff.
    ReportTable cards;
    cards.name = "factor_summary";
    cards.heading = "Factor Summary";
    cards.columns = {"Factor", "% of Variance", "Variables (loading)"};
    for (long f = 0; f < m; ++f) {
        std::string members;
        for (long j = 0; j < p; ++j) {
            const double loading = solution.rotated_loadings(j, f);
            if (std::fabs(loading) < loading_cutoff) continue;
            if (!members.empty()) members += ", ";
            members += solution.variables[static_cast<std::size_t>(j)] + " (" +
                       format_fixed(loading, 3) + ")";
        }
        if (members.empty()) members = "(none at cutoff " + format_fixed(loading_cutoff, 2) + ")";
        cards.rows.push_back({Cell::integer(f + 1),
                              Cell::fixed(100.0 * solution.rotation_ssl(f) / dp, 3),
                              Cell::label(members)});
    }
    doc.tables.push_back(std::move(cards));

    doc.footnotes.push_back("Extraction Method: Principal Component Analysis.");
    if (solution.rotated) {
        doc.footnotes.push_back("Rotation Method: Varimax with Kaiser Normalization.");
        if (solution.rotation_converged) {
            doc.footnotes.push_back("Rotation converged in " +
                                    std::to_string(solution.rotation_iterations) +
                                    " iterations.");
        }
    }
    return doc;
}

}  // namespace panelkit
