#pragma once

#include <Eigen/Dense>
#include <limits>
#include <string>
#include <vector>

namespace panelkit {

/// Pearson correlation matrix with its variable names; symmetric with an
/// exact unit diagonal.
struct CorrelationMatrix {
    std::vector<std::string> variables;
    Eigen::MatrixXd values;
};

struct BartlettTest {
    double chi_square = 0.0;
    long df = 0;
    double p_value = 1.0;
};

/// Full principal-component decomposition of a correlation matrix.
struct PcaExtraction {
    Eigen::VectorXd eigenvalues;   // descending, length p
    Eigen::MatrixXd eigenvectors;  // p x p, column f pairs with eigenvalue f
    Eigen::MatrixXd loadings;      // column f = eigenvector_f * sqrt(lambda_f)
};

struct VarimaxResult {
    Eigen::MatrixXd loadings;
    int iterations = 0;  // completed sweeps over all column pairs
    bool converged = true;
};

enum class RotationMethod { None, Varimax };

struct FactorOptions {
    long retain = -1;  // -1 = Kaiser criterion (eigenvalue > 1); else fixed m
    RotationMethod rotation = RotationMethod::Varimax;
    bool kaiser_normalize = true;
    double tolerance = 1e-5;  // relative criterion change per sweep
    int max_iterations = 1000;
};

/// The assembled solution: diagnostics, variance bookkeeping for every
/// component, and the retained (optionally rotated) loading block.
struct FactorSolution {
    std::vector<std::string> variables;
    long n_obs = 0;
    Eigen::MatrixXd correlation;  // input matrix, kept for factor scores

    Eigen::VectorXd eigenvalues;     // all p, descending
    Eigen::VectorXd pct_variance;    // 100 * lambda / p
    Eigen::VectorXd cumulative_pct;  // running total of pct_variance

    long retained = 0;
    Eigen::MatrixXd loadings;          // p x m, unrotated
    Eigen::MatrixXd rotated_loadings;  // p x m; equals `loadings` when unrotated
    Eigen::VectorXd communalities;     // row sums of squared retained loadings

    bool rotated = false;
    int rotation_iterations = 0;
    bool rotation_converged = true;
    Eigen::VectorXd rotation_ssl;  // column sums of squared rotated loadings

    double kmo = std::numeric_limits<double>::quiet_NaN();  // NaN when undefined
    BartlettTest bartlett;
    std::vector<std::string> warnings;
};

/// Per-observation coordinates on the retained factors.
struct FactorScores {
    std::vector<std::string> factor_names;  // f_1 .. f_m
    Eigen::MatrixXd scores;                 // n x m, regression method
};

/// Pearson correlations of an n x p observation matrix. Errors:
/// ZeroVarianceColumn (named), TooFewObservations (n < 3).
CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& data,
                                     const std::vector<std::string>& variables);

/// chi2 = -(n - 1 - (2p+5)/6) ln det R against chi-square(p(p-1)/2).
/// SingularCorrelation when the determinant is not positive.
BartlettTest bartlett_sphericity(const CorrelationMatrix& corr, long n_obs);

/// Kaiser-Meyer-Olkin sampling adequacy: squared raw correlations against
/// squared anti-image partial correlations. UndefinedKMO when every
/// off-diagonal correlation is zero.
double kmo(const CorrelationMatrix& corr);

/// Eigendecomposition with descending eigenvalues; loading signs fixed so
/// each column's largest-magnitude entry is positive.
PcaExtraction pca_extract(const CorrelationMatrix& corr);

/// Count of eigenvalues strictly greater than 1.
long kaiser_retain(const Eigen::VectorXd& eigenvalues);

/// V = sum_f [ sum_j b_jf^4 / p - (sum_j b_jf^2 / p)^2 ], the objective the
/// rotation maximizes; exposed for tests and oracles.
double varimax_criterion(const Eigen::MatrixXd& loadings);

/// Cycles of pairwise planar rotations; Kaiser normalization divides each
/// row by its communality sqrt for the duration of the rotation. Iterations
/// count full sweeps; non-convergence returns the best iterate with the
/// flag cleared to false rather than failing.
VarimaxResult varimax_rotate(const Eigen::MatrixXd& loadings, bool kaiser_normalize = true,
                             double tolerance = 1e-5, int max_iterations = 1000);

/// Runs the whole pipeline on a correlation matrix: adequacy diagnostics,
/// extraction, retention, rotation, variance bookkeeping. Rotated columns
/// are reordered by explained variance and sign-aligned. Throws
/// NoComponentsRetained when retention selects zero components.
FactorSolution summarize_solution(const CorrelationMatrix& corr, long n_obs,
                                  const FactorOptions& options = {});

/// Regression-method scores: standardized data times R^-1 times the rotated
/// loadings. Columns are mean zero on the data the solution was built from.
FactorScores factor_scores(const Eigen::MatrixXd& data, const FactorSolution& solution);

}  // namespace panelkit
