#include "panelkit/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "panelkit/errors.hpp"

namespace panelkit {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) fields.push_back(trim(field));
    if (!line.empty() && line.back() == ',') fields.push_back("");
    return fields;
}

bool parse_number(const std::string& text, double& out) {
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end && std::isfinite(out);
}

// Periods sort numerically when every label is a number, lexically otherwise.
void sort_period_labels(std::vector<std::string>& periods) {
    std::vector<double> numeric(periods.size());
    bool all_numeric = true;
    for (std::size_t i = 0; i < periods.size(); ++i) {
        if (!parse_number(periods[i], numeric[i])) {
            all_numeric = false;
            break;
        }
    }
    if (all_numeric) {
        std::vector<std::size_t> order(periods.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return numeric[a] < numeric[b]; });
        std::vector<std::string> sorted;
        sorted.reserve(periods.size());
        for (std::size_t i : order) sorted.push_back(periods[i]);
        periods = std::move(sorted);
    } else {
        std::sort(periods.begin(), periods.end());
    }
}

}  // namespace

PanelDataset::PanelDataset(std::vector<std::string> entities, std::vector<std::string> periods,
                           std::vector<std::pair<std::string, Eigen::MatrixXd>> variables,
                           std::map<std::string, std::string> units)
    : entities_(std::move(entities)), periods_(std::move(periods)), units_(std::move(units)) {
    if (entities_.size() < 2 || periods_.size() < 2) {
        fail(ErrorCode::TooSmall, "panel needs at least 2 entities and 2 periods, got " +
                                      std::to_string(entities_.size()) + " x " +
                                      std::to_string(periods_.size()));
    }
    std::set<std::string> seen_entities(entities_.begin(), entities_.end());
    if (seen_entities.size() != entities_.size()) {
        fail(ErrorCode::DuplicateRow, "entity labels are not unique");
    }
    std::set<std::string> seen_periods(periods_.begin(), periods_.end());
    if (seen_periods.size() != periods_.size()) {
        fail(ErrorCode::DuplicateRow, "period labels are not unique");
    }
    for (auto& [name, matrix] : variables) {
        if (static_cast<std::size_t>(matrix.rows()) != entities_.size() ||
            static_cast<std::size_t>(matrix.cols()) != periods_.size()) {
            fail(ErrorCode::MissingCell, "variable '" + name + "' is not a full " +
                                             std::to_string(entities_.size()) + " x " +
                                             std::to_string(periods_.size()) + " matrix");
        }
        if (!matrix.allFinite()) {
            fail(ErrorCode::NonNumericValue, "variable '" + name + "' contains non-finite values");
        }
        if (index_.count(name)) {
            fail(ErrorCode::DuplicateRow, "variable '" + name + "' given twice");
        }
        index_[name] = names_.size();
        names_.push_back(name);
        matrices_.push_back(std::move(matrix));
    }
}

bool PanelDataset::has_variable(const std::string& name) const { return index_.count(name) > 0; }

const Eigen::MatrixXd& PanelDataset::values(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) fail(ErrorCode::BadSelection, "unknown variable '" + name + "'");
    return matrices_[it->second];
}

double PanelDataset::value(const std::string& name, const std::string& entity,
                           const std::string& period) const {
    const auto& matrix = values(name);
    const auto eit = std::find(entities_.begin(), entities_.end(), entity);
    if (eit == entities_.end()) fail(ErrorCode::BadSelection, "unknown entity '" + entity + "'");
    const auto pit = std::find(periods_.begin(), periods_.end(), period);
    if (pit == periods_.end()) fail(ErrorCode::BadSelection, "unknown period '" + period + "'");
    return matrix(eit - entities_.begin(), pit - periods_.begin());
}

std::string PanelDataset::unit(const std::string& name) const {
    auto it = units_.find(name);
    return it == units_.end() ? "" : it->second;
}

void VariableSelection::validate(const PanelDataset& data) const {
    if (regressors.empty()) fail(ErrorCode::BadSelection, "no regressors selected");
    auto require = [&](const std::string& name) {
        if (!data.has_variable(name)) {
            std::string available;
            for (const auto& v : data.variable_names()) {
                if (!available.empty()) available += ", ";
                available += v;
            }
            fail(ErrorCode::BadSelection,
                 "variable '" + name + "' not in dataset (available: " + available + ")");
        }
    };
    require(dependent);
    std::set<std::string> seen;
    for (const auto& r : regressors) {
        require(r);
        if (r == dependent) {
            fail(ErrorCode::BadSelection, "dependent '" + dependent + "' also used as regressor");
        }
        if (!seen.insert(r).second) {
            fail(ErrorCode::BadSelection, "regressor '" + r + "' selected twice");
        }
    }
}

StackedData stack(const PanelDataset& data, const VariableSelection& sel, ConstantColumn constant) {
    sel.validate(data);
    const auto n = static_cast<Eigen::Index>(data.n_observations());
    const auto n_entities = static_cast<Eigen::Index>(data.n_entities());
    const auto n_periods = static_cast<Eigen::Index>(data.n_periods());
    const auto k_vars = static_cast<Eigen::Index>(sel.regressors.size());
    const Eigen::Index offset = constant == ConstantColumn::Leading ? 1 : 0;

    StackedData out;
    out.y.resize(n);
    out.x.resize(n, k_vars + offset);
    if (offset == 1) out.x.col(0).setOnes();
    out.index.reserve(static_cast<std::size_t>(n));

    const Eigen::MatrixXd& dep = data.values(sel.dependent);
    std::vector<const Eigen::MatrixXd*> regs;
    regs.reserve(sel.regressors.size());
    for (const auto& r : sel.regressors) regs.push_back(&data.values(r));

    Eigen::Index row = 0;
    for (Eigen::Index i = 0; i < n_entities; ++i) {
        for (Eigen::Index t = 0; t < n_periods; ++t, ++row) {
            out.y(row) = dep(i, t);
            for (Eigen::Index j = 0; j < k_vars; ++j) out.x(row, offset + j) = (*regs[j])(i, t);
            out.index.emplace_back(data.entities()[i], data.periods()[t]);
        }
    }
    return out;
}

Eigen::MatrixXd observation_matrix(const PanelDataset& data,
                                   const std::vector<std::string>& variables) {
    for (const auto& name : variables) {
        if (!data.has_variable(name)) {
            fail(ErrorCode::BadSelection, "unknown variable: " + name);
        }
    }
    const auto n_entities = static_cast<Eigen::Index>(data.n_entities());
    const auto n_periods = static_cast<Eigen::Index>(data.n_periods());
    Eigen::MatrixXd out(n_entities * n_periods, static_cast<Eigen::Index>(variables.size()));
    for (std::size_t j = 0; j < variables.size(); ++j) {
        const Eigen::MatrixXd& grid = data.values(variables[j]);
        Eigen::Index row = 0;
        for (Eigen::Index i = 0; i < n_entities; ++i) {
            for (Eigen::Index t = 0; t < n_periods; ++t, ++row) {
                out(row, static_cast<Eigen::Index>(j)) = grid(i, t);
            }
        }
    }
    return out;
}

PanelDataset load_long_csv(const std::string& path, const std::string& entity_col,
                           const std::string& time_col) {
    std::ifstream file(path);
    if (!file) fail(ErrorCode::IoError, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line)) fail(ErrorCode::IoError, "'" + path + "' is empty");
    const auto header = split_csv_line(line);
    if (header.size() < 2) fail(ErrorCode::IoError, "'" + path + "' header needs entity and period columns");

    // Entity/time columns default to the first two header fields.
    std::size_t entity_idx = 0;
    std::size_t time_idx = 1;
    auto locate = [&](const std::string& wanted, const char* role) {
        auto it = std::find(header.begin(), header.end(), wanted);
        if (it == header.end()) {
            fail(ErrorCode::IoError, std::string(role) + " column '" + wanted + "' not in header");
        }
        return static_cast<std::size_t>(it - header.begin());
    };
    if (!entity_col.empty()) entity_idx = locate(entity_col, "entity");
    if (!time_col.empty()) time_idx = locate(time_col, "time");
    if (entity_idx == time_idx) fail(ErrorCode::IoError, "entity and time columns coincide");

    std::vector<std::string> var_names;
    std::vector<std::size_t> var_cols;
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c == entity_idx || c == time_idx) continue;
        var_names.push_back(header[c]);
        var_cols.push_back(c);
    }

    struct Row {
        std::string entity;
        std::string period;
        std::vector<double> values;
    };
    std::vector<Row> rows;
    std::vector<std::string> entities;
    std::vector<std::string> periods;
    std::set<std::pair<std::string, std::string>> seen;

    std::size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " fields, got " +
                                         std::to_string(fields.size()));
        }
        Row row;
        row.entity = fields[entity_idx];
        row.period = fields[time_idx];
        if (!seen.insert({row.entity, row.period}).second) {
            fail(ErrorCode::DuplicateRow,
                 "(" + row.entity + ", " + row.period + ") appears more than once");
        }
        if (std::find(entities.begin(), entities.end(), row.entity) == entities.end()) {
            entities.push_back(row.entity);
        }
        if (std::find(periods.begin(), periods.end(), row.period) == periods.end()) {
            periods.push_back(row.period);
        }
        row.values.resize(var_cols.size());
        for (std::size_t j = 0; j < var_cols.size(); ++j) {
            if (!parse_number(fields[var_cols[j]], row.values[j])) {
                fail(ErrorCode::NonNumericValue, path + ":" + std::to_string(line_no) +
                                                     ": column '" + var_names[j] + "' value '" +
                                                     fields[var_cols[j]] + "' is not a finite number");
            }
        }
        rows.push_back(std::move(row));
    }

    if (entities.size() < 2 || periods.size() < 2) {
        fail(ErrorCode::TooSmall, "panel needs at least 2 entities and 2 periods, got " +
                                      std::to_string(entities.size()) + " x " +
                                      std::to_string(periods.size()));
    }
    for (const auto& e : entities) {
        for (const auto& p : periods) {
            if (!seen.count({e, p})) {
                fail(ErrorCode::MissingCell, "no row for (" + e + ", " + p + ")");
            }
        }
    }

    sort_period_labels(periods);

    std::map<std::string, std::size_t> entity_pos;
    std::map<std::string, std::size_t> period_pos;
    for (std::size_t i = 0; i < entities.size(); ++i) entity_pos[entities[i]] = i;
    for (std::size_t t = 0; t < periods.size(); ++t) period_pos[periods[t]] = t;

    std::vector<std::pair<std::string, Eigen::MatrixXd>> variables;
    for (std::size_t j = 0; j < var_names.size(); ++j) {
        Eigen::MatrixXd m(entities.size(), periods.size());
        for (const auto& row : rows) {
            m(static_cast<Eigen::Index>(entity_pos[row.entity]),
              static_cast<Eigen::Index>(period_pos[row.period])) = row.values[j];
        }
        variables.emplace_back(var_names[j], std::move(m));
    }
    return PanelDataset(std::move(entities), std::move(periods), std::move(variables));
}

PanelDataset load_wide_csv(const std::string& path, const std::string& variable_name) {
    std::ifstream file(path);
    if (!file) fail(ErrorCode::IoError, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line)) fail(ErrorCode::IoError, "'" + path + "' is empty");
    auto header = split_csv_line(line);
    if (header.size() < 3) {
        fail(ErrorCode::TooSmall, "wide table needs at least 2 period columns");
    }
    std::vector<std::string> periods(header.begin() + 1, header.end());

    std::vector<std::string> entities;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(header.size()) + " fields, got " +
                                         std::to_string(fields.size()));
        }
        if (std::find(entities.begin(), entities.end(), fields[0]) != entities.end()) {
            fail(ErrorCode::DuplicateRow, "entity '" + fields[0] + "' appears more than once");
        }
        entities.push_back(fields[0]);
        std::vector<double> values(periods.size());
        for (std::size_t j = 0; j < periods.size(); ++j) {
            if (!parse_number(fields[j + 1], values[j])) {
                fail(ErrorCode::NonNumericValue, path + ":" + std::to_string(line_no) +
                                                     ": period '" + periods[j] + "' value '" +
                                                     fields[j + 1] + "' is not a finite number");
            }
        }
        rows.push_back(std::move(values));
    }
    if (entities.size() < 2) {
        fail(ErrorCode::TooSmall, "panel needs at least 2 entities, got " +
                                      std::to_string(entities.size()));
    }

    // Reorder the period columns ascending, keeping cells attached.
    std::vector<std::string> sorted_periods = periods;
    sort_period_labels(sorted_periods);
    std::vector<std::size_t> source(sorted_periods.size());
    for (std::size_t t = 0; t < sorted_periods.size(); ++t) {
        auto it = std::find(periods.begin(), periods.end(), sorted_periods[t]);
        source[t] = static_cast<std::size_t>(it - periods.begin());
    }

    Eigen::MatrixXd m(entities.size(), sorted_periods.size());
    for (std::size_t i = 0; i < entities.size(); ++i) {
        for (std::size_t t = 0; t < sorted_periods.size(); ++t) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = rows[i][source[t]];
        }
    }
    std::vector<std::pair<std::string, Eigen::MatrixXd>> variables;
    variables.emplace_back(variable_name, std::move(m));
    return PanelDataset(std::move(entities), std::move(sorted_periods), std::move(variables));
}

void write_long_csv(const PanelDataset& data, const std::string& path) {
    std::ofstream file(path);
    if (!file) fail(ErrorCode::IoError, "cannot open '" + path + "' for writing");

    file << "entity,period";
    for (const auto& name : data.variable_names()) file << "," << name;
    file << "\n";

    char buf[64];
    for (const auto& entity : data.entities()) {
        for (const auto& period : data.periods()) {
            file << entity << "," << period;
            for (const auto& name : data.variable_names()) {
                std::snprintf(buf, sizeof(buf), "%.17g", data.value(name, entity, period));
                file << "," << buf;
            }
            file << "\n";
        }
    }
    if (!file) fail(ErrorCode::IoError, "write to '" + path + "' failed");
}

PanelDataset embedded_sample(const std::string& name) {
    static const std::vector<std::string> regions = {
        "North-West", "Center",          "North-East",         "South-East",
        "South-Muntenia", "Bucharest-Ilfov", "South-West-Oltenia", "West"};

    if (name == "romania_broadband") {
        Eigen::MatrixXd m(8, 5);
        m << 28, 70, 85, 89, 90,  // North-West
            23, 65, 80, 82, 90,   // Center
            17, 57, 77, 77, 87,   // North-East
            23, 57, 77, 79, 84,   // South-East
            23, 61, 79, 82, 86,   // South-Muntenia
            33, 80, 91, 92, 94,   // Bucharest-Ilfov
            15, 62, 83, 82, 86,   // South-West-Oltenia
            22, 75, 87, 89, 90;   // West
        std::vector<std::pair<std::string, Eigen::MatrixXd>> variables;
        variables.emplace_back("BROADBAND", std::move(m));
        return PanelDataset(regions, {"2010", "2015", "2019", "2020", "2021"}, std::move(variables),
                            {{"BROADBAND", "% of households"}});
    }
    if (name == "romania_ecommerce") {
        Eigen::MatrixXd m(8, 4);
        m << 2, 14, 40, 37,  // North-West
            5, 9, 39, 43,    // Center
            3, 9, 32, 33,    // North-East
            3, 7, 30, 31,    // South-East
            2, 11, 32, 33,   // South-Muntenia
            8, 19, 56, 58,   // Bucharest-Ilfov
            3, 9, 36, 35,    // South-West-Oltenia
            4, 8, 39, 41;    // West
        std::vector<std::pair<std::string, Eigen::MatrixXd>> variables;
        variables.emplace_back("E-COMMERCE", std::move(m));
        return PanelDataset(regions, {"2010", "2015", "2020", "2021"}, std::move(variables),
                            {{"E-COMMERCE", "% of individuals"}});
    }
    fail(ErrorCode::UnknownSample,
         "'" + name + "' (available: romania_broadband, romania_ecommerce)");
}

TableData load_table_csv(const std::string& path) {
    std::ifstream file(path);
    if (!file) fail(ErrorCode::IoError, "cannot open '" + path + "'");

    std::string line;
    if (!std::getline(file, line)) fail(ErrorCode::IoError, "'" + path + "' is empty");
    TableData out;
    out.columns = split_csv_line(line);
    if (out.columns.empty()) fail(ErrorCode::IoError, "'" + path + "' has an empty header");

    std::vector<std::vector<double>> rows;
    std::size_t line_no = 1;
    while (std::getline(file, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != out.columns.size()) {
            fail(ErrorCode::IoError, path + ":" + std::to_string(line_no) + ": expected " +
                                         std::to_string(out.columns.size()) + " fields, got " +
                                         std::to_string(fields.size()));
        }
        std::vector<double> values(fields.size());
        for (std::size_t j = 0; j < fields.size(); ++j) {
            if (!parse_number(fields[j], values[j])) {
                fail(ErrorCode::NonNumericValue, path + ":" + std::to_string(line_no) +
                                                     ": column '" + out.columns[j] + "' value '" +
                                                     fields[j] + "' is not a finite number");
            }
        }
        rows.push_back(std::move(values));
    }
    out.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(out.columns.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return out;
}

}  // namespace panelkit
