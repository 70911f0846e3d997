#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace panelkit {

/// Balanced entity x time table of named numeric variables. Immutable after
/// construction; every variable matrix is |entities| rows x |periods| columns
/// with no missing cells.
class PanelDataset {
public:
    /// Validates balance, uniqueness, strict period ordering and minimum size
    /// (at least 2 entities and 2 periods).
    PanelDataset(std::vector<std::string> entities, std::vector<std::string> periods,
                 std::vector<std::pair<std::string, Eigen::MatrixXd>> variables,
                 std::map<std::string, std::string> units = {});

    const std::vector<std::string>& entities() const { return entities_; }
    const std::vector<std::string>& periods() const { return periods_; }
    const std::vector<std::string>& variable_names() const { return names_; }

    std::size_t n_entities() const { return entities_.size(); }
    std::size_t n_periods() const { return periods_.size(); }
    std::size_t n_observations() const { return entities_.size() * periods_.size(); }

    bool has_variable(const std::string& name) const;
    const Eigen::MatrixXd& values(const std::string& name) const;
    double value(const std::string& name, const std::string& entity, const std::string& period) const;

    /// Unit annotation for a variable ("" when none was recorded).
    std::string unit(const std::string& name) const;

private:
    std::vector<std::string> entities_;
    std::vector<std::string> periods_;
    std::vector<std::string> names_;
    std::vector<Eigen::MatrixXd> matrices_;
    std::map<std::string, std::size_t> index_;
    std::map<std::string, std::string> units_;
};

/// Dependent variable plus ordered regressors; validated against a dataset.
struct VariableSelection {
    std::string dependent;
    std::vector<std::string> regressors;

    void validate(const PanelDataset& data) const;
};

/// The (entity, period) origin of each stacked observation row.
using ObsIndex = std::vector<std::pair<std::string, std::string>>;

struct StackedData {
    Eigen::VectorXd y;
    Eigen::MatrixXd x;
    ObsIndex index;  // (entity, period) per row
};

enum class ConstantColumn { None, Leading };

/// Stacks the selection entity-major then time-ascending. With
/// ConstantColumn::Leading the first column of x is all ones.
StackedData stack(const PanelDataset& data, const VariableSelection& sel,
                  ConstantColumn constant = ConstantColumn::None);

/// One column per requested variable, rows entity-major then time-ascending
/// (the same row order as stack). Errors: BadSelection on unknown names.
Eigen::MatrixXd observation_matrix(const PanelDataset& data,
                                   const std::vector<std::string>& variables);

/// Long CSV loader: header `entity,period,var1,...`, one row per
/// (entity, period). Entity order is first appearance; period order is
/// ascending (numeric when every label parses as a number, lexical otherwise).
PanelDataset load_long_csv(const std::string& path, const std::string& entity_col = "",
                           const std::string& time_col = "");

/// Wide CSV loader for a single variable: one row per entity, one column per
/// period, first header cell names the entity axis.
PanelDataset load_wide_csv(const std::string& path, const std::string& variable_name);

/// Writes the long CSV form with 17 significant digits, so that
/// load_long_csv(write_long_csv(d)) == d at full binary precision.
void write_long_csv(const PanelDataset& data, const std::string& path);

/// Published sample tables; name is "romania_broadband" or "romania_ecommerce".
PanelDataset embedded_sample(const std::string& name);

/// Plain rectangular CSV (header row, all-numeric columns) used by the factor
/// analysis front end: returns column names and an n x p value matrix.
struct TableData {
    std::vector<std::string> columns;
    Eigen::MatrixXd values;
};
TableData load_table_csv(const std::string& path);

}  // namespace panelkit
