#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "panelkit/dataset.hpp"
#include "panelkit/panel.hpp"

namespace panelkit {

/// One row of the fixed-vs-random comparison table.
struct HausmanRow {
    std::string name;
    double fixed_coef = 0.0;
    double random_coef = 0.0;
    double var_diff = 0.0;  // Var(fixed_j) - Var(random_j)
    double prob = 0.0;      // two-sided normal p of the per-coefficient gap
};

struct HausmanResult {
    double statistic = 0.0;
    long df = 0;  // number of compared slopes
    double p_value = 1.0;
    std::vector<HausmanRow> per_variable;
    bool indefinite = false;  // covariance difference was not positive definite
    std::vector<std::string> warnings;
    /// Degrees-of-freedom conventions behind the two covariance matrices,
    /// surfaced in reports because packages differ here.
    std::string covariance_note;
    /// Shape of the panel the comparison ran on; left empty (n_obs = 0) when
    /// the result was built from injected components.
    PanelInfo info;
};

/// Quadratic-form core on already-estimated slope blocks; the entry point
/// both hausman() and the tests' injection seam use. Slopes only, no
/// intercept. A non-positive-definite difference switches the inverse to a
/// spectral pseudo-inverse and raises the indefinite flag instead of failing.
HausmanResult hausman_from_components(const std::vector<std::string>& names,
                                      const Eigen::VectorXd& fixed_coefs,
                                      const Eigen::MatrixXd& fixed_cov,
                                      const Eigen::VectorXd& random_coefs,
                                      const Eigen::MatrixXd& random_cov);

/// Estimates the unweighted within fit and the random-effects fit on the
/// selection and compares their slope vectors:
///   H = d' [V_fixed - V_random]^-1 d,  d = b_fixed - b_random,
/// chi-square with one degree of freedom per slope under "random effects
/// appropriate".
HausmanResult hausman(const PanelDataset& data, const VariableSelection& sel);

}  // namespace panelkit
