#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace panelkit {

/// Fit statistic block reported with every regression table.
struct FitStats {
    double r_squared = 0.0;
    double adj_r_squared = 0.0;
    double se_regression = 0.0;
    double ssr = 0.0;
    double log_likelihood = 0.0;
    double aic = 0.0;
    double schwarz = 0.0;
    double hannan_quinn = 0.0;
    double f_statistic = 0.0;
    double f_prob = 0.0;
    double durbin_watson = 0.0;
    double mean_dep = 0.0;
    double sd_dep = 0.0;
    long n = 0;
    long k = 0;
    /// Set when ssr vanishes; likelihood-based fields are then NaN markers.
    bool perfect_fit = false;
};

struct RegressionFit {
    Eigen::VectorXd coefficients;  // constant last when one is present
    Eigen::VectorXd std_errors;
    Eigen::VectorXd t_stats;
    Eigen::VectorXd p_values;
    Eigen::MatrixXd covariance;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    FitStats stats;
};

/// Coefficients, residual sum of squares and (X'X)^-1 without the reporting
/// layer; the building block shared by all estimators.
struct OlsCore {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    Eigen::VectorXd fitted;
    Eigen::MatrixXd xtx_inverse;
    double ssr = 0.0;
};

/// Least squares via Householder QR; throws RankDeficient when the singular
/// value ratio of X falls below 1e-10 and TooFewObservations when n <= k.
OlsCore ols_core(const Eigen::VectorXd& y, const Eigen::MatrixXd& x);

/// Full OLS fit with covariance s^2 (X'X)^-1, t statistics, two-sided
/// Student-t p-values (df = n - k) and the complete statistic block.
/// `group_sizes` marks entity runs for the Durbin-Watson boundary rule;
/// leave empty for a single series.
RegressionFit solve_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        std::span<const long> group_sizes = {});

/// Assembles FitStats from data, fitted values and residuals. `k` is the
/// parameter count used in every degrees-of-freedom correction; the F test
/// uses df (k-1, n-k), which assumes a constant (or equivalent) is included.
FitStats compute_fit_statistics(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                                const Eigen::VectorXd& residuals, long n, long k,
                                std::span<const long> group_sizes = {});

/// Per-observation information criteria from a log likelihood.
struct InfoCriteria {
    double aic;
    double schwarz;
    double hannan_quinn;
};
InfoCriteria info_criteria(double log_likelihood, long n, long k);

/// 1 - (1 - r2)(n - 1)/(n - k).
double adjusted_r_squared(double r_squared, long n, long k);

/// (r2/(k-1)) / ((1-r2)/(n-k)).
double f_from_r_squared(double r_squared, long n, long k);

/// Durbin-Watson with entity-boundary pairs excluded: lags never cross from
/// one group's last observation into the next group's first.
double durbin_watson(const Eigen::VectorXd& residuals, std::span<const long> group_sizes);

}  // namespace panelkit
