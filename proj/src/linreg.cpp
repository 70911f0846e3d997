#include "panelkit/linreg.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "panelkit/distributions.hpp"
#include "panelkit/errors.hpp"

namespace panelkit {

namespace {

constexpr double kRankTolerance = 1e-10;  // smallest/largest singular value

// Perfect-fit detection: exact zeros, or residual mass at the level of
// accumulated rounding where the likelihood digits are meaningless.
bool is_perfect_fit(double ssr, double tss) { return ssr <= 1e-26 * tss || ssr <= 1e-280; }

}  // namespace

OlsCore ols_core(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const Eigen::Index n = x.rows();
    const Eigen::Index k = x.cols();
    if (y.size() != n) fail(ErrorCode::BadSelection, "y and X row counts differ");
    if (n <= k) {
        fail(ErrorCode::TooFewObservations,
             std::to_string(n) + " observations for " + std::to_string(k) + " parameters");
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(x);
    const auto& sv = svd.singularValues();
    if (sv(0) <= 0.0 || sv(k - 1) / sv(0) < kRankTolerance) {
        // Column-pivoted QR identifies which column dropped the rank.
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
        qr.setThreshold(kRankTolerance);
        std::string detail = "singular value ratio below 1e-10";
        const Eigen::Index rank = qr.rank();
        if (rank < k) {
            const auto perm = qr.colsPermutation().indices();
            detail += "; column " + std::to_string(perm(rank)) + " appears linearly dependent";
        }
        fail(ErrorCode::RankDeficient, detail);
    }

    OlsCore out;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
    out.beta = qr.solve(y);
    out.fitted = x * out.beta;
    out.residuals = y - out.fitted;
    out.ssr = out.residuals.squaredNorm();

    // (X'X)^-1 from the triangular factor; only used for covariance reporting.
    const Eigen::MatrixXd r =
        qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    const Eigen::MatrixXd r_inv =
        r.triangularView<Eigen::Upper>().solve(Eigen::MatrixXd::Identity(k, k));
    out.xtx_inverse = r_inv * r_inv.transpose();
    return out;
}

double durbin_watson(const Eigen::VectorXd& residuals, std::span<const long> group_sizes) {
    const double denom = residuals.squaredNorm();
    if (denom <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    double num = 0.0;
    if (group_sizes.empty()) {
        for (Eigen::Index t = 1; t < residuals.size(); ++t) {
            const double d = residuals(t) - residuals(t - 1);
            num += d * d;
        }
    } else {
        Eigen::Index offset = 0;
        for (long size : group_sizes) {
            for (long t = 1; t < size; ++t) {
                const double d = residuals(offset + t) - residuals(offset + t - 1);
                num += d * d;
            }
            offset += size;
        }
    }
    return num / denom;
}

InfoCriteria info_criteria(double log_likelihood, long n, long k) {
    const double dn = static_cast<double>(n);
    const double dk = static_cast<double>(k);
    InfoCriteria out;
    out.aic = (-2.0 * log_likelihood + 2.0 * dk) / dn;
    out.schwarz = (-2.0 * log_likelihood + dk * std::log(dn)) / dn;
    out.hannan_quinn = (-2.0 * log_likelihood + 2.0 * dk * std::log(std::log(dn))) / dn;
    return out;
}

double adjusted_r_squared(double r_squared, long n, long k) {
    return 1.0 - (1.0 - r_squared) * static_cast<double>(n - 1) / static_cast<double>(n - k);
}

double f_from_r_squared(double r_squared, long n, long k) {
    return (r_squared / static_cast<double>(k - 1)) /
           ((1.0 - r_squared) / static_cast<double>(n - k));
}

FitStats compute_fit_statistics(const Eigen::VectorXd& y, const Eigen::VectorXd& fitted,
                                const Eigen::VectorXd& residuals, long n, long k,
                                std::span<const long> group_sizes) {
    if (y.size() != fitted.size() || y.size() != residuals.size() ||
        y.size() != static_cast<Eigen::Index>(n)) {
        fail(ErrorCode::BadSelection, "inconsistent lengths in fit statistics input");
    }
    if (n <= k) fail(ErrorCode::TooFewObservations, "n <= k in fit statistics");

    const double dn = static_cast<double>(n);
    FitStats stats;
    stats.n = n;
    stats.k = k;
    stats.mean_dep = y.mean();
    const double tss = (y.array() - stats.mean_dep).matrix().squaredNorm();
    stats.sd_dep = std::sqrt(tss / (dn - 1.0));
    stats.ssr = residuals.squaredNorm();
    stats.se_regression = std::sqrt(stats.ssr / static_cast<double>(n - k));
    stats.durbin_watson = durbin_watson(residuals, group_sizes);

    stats.perfect_fit = is_perfect_fit(stats.ssr, tss);
    if (stats.perfect_fit) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        stats.r_squared = 1.0;
        stats.adj_r_squared = 1.0;
        stats.log_likelihood = nan;
        stats.aic = nan;
        stats.schwarz = nan;
        stats.hannan_quinn = nan;
        stats.f_statistic = nan;
        stats.f_prob = nan;
        return stats;
    }

    stats.r_squared = tss > 0.0 ? 1.0 - stats.ssr / tss : 0.0;
    stats.adj_r_squared = adjusted_r_squared(stats.r_squared, n, k);
    stats.log_likelihood =
        -0.5 * dn * (1.0 + std::log(2.0 * std::numbers::pi) + std::log(stats.ssr / dn));
    const InfoCriteria ic = info_criteria(stats.log_likelihood, n, k);
    stats.aic = ic.aic;
    stats.schwarz = ic.schwarz;
    stats.hannan_quinn = ic.hannan_quinn;
    if (k > 1) {
        stats.f_statistic = f_from_r_squared(stats.r_squared, n, k);
        stats.f_prob = dist::f_sf(stats.f_statistic, static_cast<double>(k - 1),
                                  static_cast<double>(n - k));
    } else {
        stats.f_statistic = std::numeric_limits<double>::quiet_NaN();
        stats.f_prob = std::numeric_limits<double>::quiet_NaN();
    }
    return stats;
}

RegressionFit solve_ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                        std::span<const long> group_sizes) {
    const long n = static_cast<long>(x.rows());
    const long k = static_cast<long>(x.cols());
    OlsCore core = ols_core(y, x);

    RegressionFit fit;
    fit.coefficients = std::move(core.beta);
    fit.fitted = std::move(core.fitted);
    fit.residuals = std::move(core.residuals);
    fit.stats = compute_fit_statistics(y, fit.fitted, fit.residuals, n, k, group_sizes);

    const double s2 = core.ssr / static_cast<double>(n - k);
    fit.covariance = s2 * core.xtx_inverse;
    fit.std_errors = fit.covariance.diagonal().array().max(0.0).sqrt();
    fit.t_stats.resize(k);
    fit.p_values.resize(k);
    for (long j = 0; j < k; ++j) {
        fit.t_stats(j) = fit.coefficients(j) / fit.std_errors(j);
        fit.p_values(j) = dist::student_t_two_sided(fit.t_stats(j), static_cast<double>(n - k));
    }
    return fit;
}

}  // namespace panelkit
