#include "panelkit/hausman.hpp"

#include <cmath>
#include <limits>

#include "panelkit/distributions.hpp"
#include "panelkit/errors.hpp"
#include "panelkit/panel.hpp"

namespace panelkit {

namespace {

// Relative spectral cutoff for the pseudo-inverse fallback.
constexpr double kPinvTolerance = 1e-12;

}  // namespace

HausmanResult hausman_from_components(const std::vector<std::string>& names,
                                      const Eigen::VectorXd& fixed_coefs,
                                      const Eigen::MatrixXd& fixed_cov,
                                      const Eigen::VectorXd& random_coefs,
                                      const Eigen::MatrixXd& random_cov) {
    const Eigen::Index k = fixed_coefs.size();
    if (random_coefs.size() != k || fixed_cov.rows() != k || fixed_cov.cols() != k ||
        random_cov.rows() != k || random_cov.cols() != k ||
        static_cast<Eigen::Index>(names.size()) != k) {
        fail(ErrorCode::BadSelection, "mismatched slope blocks in the comparison");
    }
    if (k == 0) fail(ErrorCode::BadSelection, "no slopes to compare");

    const Eigen::VectorXd d = fixed_coefs - random_coefs;
    // Symmetrize before the eigendecomposition; the diagonal is untouched.
    const Eigen::MatrixXd v =
        0.5 * ((fixed_cov - random_cov) + (fixed_cov - random_cov).transpose());

    HausmanResult out;
    out.df = static_cast<long>(k);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(v);
    if (eig.info() != Eigen::Success) {
        fail(ErrorCode::ConvergenceFailure, "eigendecomposition of the covariance difference");
    }
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const double max_abs = lambda.array().abs().maxCoeff();

    // H = sum over kept eigenpairs of (q'd)^2 / lambda. With a positive
    // definite difference this is the plain inverse; otherwise a spectral
    // pseudo-inverse over the positive directions only, flagged rather than
    // fatal so batch runs keep going.
    out.indefinite = lambda.minCoeff() <= 0.0;
    double statistic = 0.0;
    for (Eigen::Index j = 0; j < k; ++j) {
        if (out.indefinite && lambda(j) <= kPinvTolerance * max_abs) continue;
        const double proj = eig.eigenvectors().col(j).dot(d);
        statistic += proj * proj / lambda(j);
    }
    if (max_abs == 0.0) statistic = 0.0;  // both covariances identical
    out.statistic = statistic;
    out.p_value = dist::chi_square_sf(statistic, static_cast<double>(k));
    if (out.indefinite) {
        out.warnings.push_back(
            "covariance difference is not positive definite; statistic uses a "
            "pseudo-inverse and its chi-square reference is approximate");
    }

    out.per_variable.reserve(static_cast<std::size_t>(k));
    for (Eigen::Index j = 0; j < k; ++j) {
        HausmanRow row;
        row.name = names[static_cast<std::size_t>(j)];
        row.fixed_coef = fixed_coefs(j);
        row.random_coef = random_coefs(j);
        row.var_diff = fixed_cov(j, j) - random_cov(j, j);
        if (row.var_diff > 0.0) {
            row.prob = dist::normal_two_sided(d(j) / std::sqrt(row.var_diff));
        } else if (d(j) == 0.0) {
            row.prob = 1.0;
        } else {
            row.prob = std::numeric_limits<double>::quiet_NaN();
            out.warnings.push_back("variance difference for '" + row.name +
                                   "' is not positive; its row probability is undefined");
        }
        out.per_variable.push_back(std::move(row));
    }
    return out;
}

HausmanResult hausman(const PanelDataset& data, const VariableSelection& sel) {
    sel.validate(data);
    const PanelFit fixed = fit_fixed_effects(data, sel, PanelWeighting::None);
    const PanelFit random = fit_random_effects(data, sel);

    const Eigen::Index k = static_cast<Eigen::Index>(sel.regressors.size());
    HausmanResult out = hausman_from_components(
        sel.regressors, fixed.fit.coefficients.head(k), fixed.fit.covariance.topLeftCorner(k, k),
        random.fit.coefficients.head(k), random.fit.covariance.topLeftCorner(k, k));
    for (const auto& w : random.warnings) out.warnings.push_back(w);
    out.info = fixed.info;
    out.covariance_note =
        "fixed-side covariance from the within regression (residual df = N*T - N - slopes); "
        "random-side covariance from the quasi-demeaned GLS regression (residual df = "
        "N*T - slopes - 1)";
    return out;
}

}  // namespace panelkit
