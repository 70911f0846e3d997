#include "panelkit/factor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "panelkit/distributions.hpp"
#include "panelkit/errors.hpp"

namespace panelkit {

namespace {

// Eigendecomposition of a correlation matrix with a positivity check; shared
// by the determinant, inverse and KMO paths.
Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> decompose(const Eigen::MatrixXd& r,
                                                         const char* caller) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
    if (eig.info() != Eigen::Success) {
        fail(ErrorCode::ConvergenceFailure, std::string(caller) + ": eigensolver did not converge");
    }
    return eig;
}

// Column sign convention: largest-magnitude entry positive.
void fix_column_signs(Eigen::MatrixXd& m) {
    for (Eigen::Index f = 0; f < m.cols(); ++f) {
        Eigen::Index arg = 0;
        m.col(f).array().abs().maxCoeff(&arg);
        if (m(arg, f) < 0.0) m.col(f) = -m.col(f);
    }
}

}  // namespace

CorrelationMatrix correlation_matrix(const Eigen::MatrixXd& data,
                                     const std::vector<std::string>& variables) {
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (static_cast<Eigen::Index>(variables.size()) != p) {
        fail(ErrorCode::BadSelection, "variable name count does not match column count");
    }
    if (n < 3) fail(ErrorCode::TooFewObservations, "correlations need at least 3 observations");

    const Eigen::MatrixXd centered = data.rowwise() - data.colwise().mean();
    Eigen::VectorXd norms(p);
    for (Eigen::Index j = 0; j < p; ++j) {
        norms(j) = centered.col(j).norm();
        if (norms(j) <= 0.0) {
            fail(ErrorCode::ZeroVarianceColumn,
                 "variable '" + variables[static_cast<std::size_t>(j)] + "' has zero variance");
        }
    }

    CorrelationMatrix out;
    out.variables = variables;
    out.values = Eigen::MatrixXd::Identity(p, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = i + 1; j < p; ++j) {
            double r = centered.col(i).dot(centered.col(j)) / (norms(i) * norms(j));
            r = std::clamp(r, -1.0, 1.0);
            out.values(i, j) = r;
            out.values(j, i) = r;
        }
    }
    return out;
}

BartlettTest bartlett_sphericity(const CorrelationMatrix& corr, long n_obs) {
    const Eigen::Index p = corr.values.rows();
    if (n_obs <= p) {
        fail(ErrorCode::TooFewObservations, "sphericity test needs more observations than variables");
    }
    const auto eig = decompose(corr.values, "bartlett_sphericity");
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        fail(ErrorCode::SingularCorrelation, "correlation determinant is not positive");
    }
    const double log_det = eig.eigenvalues().array().log().sum();
    const double dp = static_cast<double>(p);

    BartlettTest out;
    out.chi_square = -(static_cast<double>(n_obs) - 1.0 - (2.0 * dp + 5.0) / 6.0) * log_det;
    if (out.chi_square == 0.0) out.chi_square = 0.0;  // normalize -0.0
    out.df = static_cast<long>(p * (p - 1) / 2);
    out.p_value = dist::chi_square_sf(out.chi_square, static_cast<double>(out.df));
    return out;
}

double kmo(const CorrelationMatrix& corr) {
    const Eigen::Index p = corr.values.rows();
    const auto eig = decompose(corr.values, "kmo");
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        fail(ErrorCode::SingularCorrelation, "correlation matrix is not invertible");
    }
    const Eigen::MatrixXd inverse = eig.eigenvectors() *
                                    eig.eigenvalues().array().inverse().matrix().asDiagonal() *
                                    eig.eigenvectors().transpose();

    // Anti-image partial correlations q_ij = -inv_ij / sqrt(inv_ii inv_jj);
    // only their squares enter, so the sign is immaterial.
    double sum_r2 = 0.0;
    double sum_q2 = 0.0;
    for (Eigen::Index i = 0; i < p; ++i) {
        for (Eigen::Index j = 0; j < p; ++j) {
            if (i == j) continue;
            sum_r2 += corr.values(i, j) * corr.values(i, j);
            const double q = inverse(i, j) / std::sqrt(inverse(i, i) * inverse(j, j));
            sum_q2 += q * q;
        }
    }
    if (sum_r2 <= 0.0) {
        fail(ErrorCode::UndefinedKMO, "all off-diagonal correlations are zero");
    }
    return sum_r2 / (sum_r2 + sum_q2);
}

PcaExtraction pca_extract(const CorrelationMatrix& corr) {
    const Eigen::Index p = corr.values.rows();
    const auto eig = decompose(corr.values, "pca_extract");

    PcaExtraction out;
    // Eigen reports ascending order; tables want descending.
    out.eigenvalues = eig.eigenvalues().reverse();
    out.eigenvectors = eig.eigenvectors().rowwise().reverse();
    fix_column_signs(out.eigenvectors);

    out.loadings.resize(p, p);
    for (Eigen::Index f = 0; f < p; ++f) {
        // Tiny negative eigenvalues (PSD up to rounding) load as zero.
        out.loadings.col(f) = out.eigenvectors.col(f) * std::sqrt(std::max(out.eigenvalues(f), 0.0));
    }
    return out;
}

long kaiser_retain(const Eigen::VectorXd& eigenvalues) {
    return static_cast<long>((eigenvalues.array() > 1.0).count());
}

double varimax_criterion(const Eigen::MatrixXd& loadings) {
    const double p = static_cast<double>(loadings.rows());
    double v = 0.0;
    for (Eigen::Index f = 0; f < loadings.cols(); ++f) {
        const Eigen::ArrayXd sq = loadings.col(f).array().square();
        const double mean_sq = sq.sum() / p;
        v += sq.square().sum() / p - mean_sq * mean_sq;
    }
    return v;
}

VarimaxResult varimax_rotate(const Eigen::MatrixXd& loadings, bool kaiser_normalize,
                             double tolerance, int max_iterations) {
    const Eigen::Index p = loadings.rows();
    const Eigen::Index m = loadings.cols();
    if (m < 1) fail(ErrorCode::BadSelection, "rotation needs at least one factor column");

    VarimaxResult out;
    if (m == 1) {
        out.loadings = loadings;
        out.iterations = 1;
        out.converged = true;
        return out;
    }

    Eigen::MatrixXd b = loadings;
    Eigen::VectorXd row_scale = Eigen::VectorXd::Ones(p);
    if (kaiser_normalize) {
        for (Eigen::Index j = 0; j < p; ++j) {
            const double h = b.row(j).norm();
            if (h <= 0.0) {
                fail(ErrorCode::ZeroCommunalityRow,
                     "row " + std::to_string(j) + " has zero communality; "
                     "Kaiser normalization is undefined");
            }
            row_scale(j) = h;
            b.row(j) /= h;
        }
    }

    const double dp = static_cast<double>(p);
    double v_prev = varimax_criterion(b);
    int iterations = 0;
    bool converged = false;

    while (iterations < max_iterations) {
        ++iterations;
        // One sweep: the closed-form optimal planar angle for every column
        // pair, applied in sequence.
        for (Eigen::Index f = 0; f + 1 < m; ++f) {
            for (Eigen::Index g = f + 1; g < m; ++g) {
                const Eigen::ArrayXd u =
                    b.col(f).array().square() - b.col(g).array().square();
                const Eigen::ArrayXd w = 2.0 * b.col(f).array() * b.col(g).array();
                const double a_sum = u.sum();
                const double b_sum = w.sum();
                const double c_sum = (u.square() - w.square()).sum();
                const double d_sum = 2.0 * (u * w).sum();
                const double num = d_sum - 2.0 * a_sum * b_sum / dp;
                const double den = c_sum - (a_sum * a_sum - b_sum * b_sum) / dp;
                if (num == 0.0 && den == 0.0) continue;
                const double phi = 0.25 * std::atan2(num, den);
                if (std::abs(phi) < 1e-14) continue;
                const double c = std::cos(phi);
                const double s = std::sin(phi);
                const Eigen::VectorXd rotated_f = c * b.col(f) + s * b.col(g);
                b.col(g) = -s * b.col(f) + c * b.col(g);
                b.col(f) = rotated_f;
            }
        }
        const double v_now = varimax_criterion(b);
        const double rel = (v_now - v_prev) / std::max(std::abs(v_prev), 1e-30);
        v_prev = v_now;
        if (rel < tolerance) {
            converged = true;
            break;
        }
    }

    if (kaiser_normalize) {
        for (Eigen::Index j = 0; j < p; ++j) b.row(j) *= row_scale(j);
    }
    out.loadings = std::move(b);
    out.iterations = iterations;
    out.converged = converged;
    return out;
}

FactorSolution summarize_solution(const CorrelationMatrix& corr, long n_obs,
                                  const FactorOptions& options) {
    const Eigen::Index p = corr.values.rows();

    FactorSolution sol;
    sol.variables = corr.variables;
    sol.n_obs = n_obs;
    sol.correlation = corr.values;
    sol.bartlett = bartlett_sphericity(corr, n_obs);
    try {
        sol.kmo = kmo(corr);
    } catch (const ToolkitError& e) {
        if (e.code() != ErrorCode::UndefinedKMO) throw;
        sol.warnings.push_back("sampling adequacy is undefined: no nonzero correlations");
    }

    PcaExtraction pca = pca_extract(corr);
    sol.eigenvalues = std::move(pca.eigenvalues);
    sol.pct_variance = 100.0 * sol.eigenvalues / static_cast<double>(p);
    sol.cumulative_pct.resize(p);
    std::partial_sum(sol.pct_variance.data(), sol.pct_variance.data() + p,
                     sol.cumulative_pct.data());

    long m = options.retain;
    if (m < 0) {
        m = kaiser_retain(sol.eigenvalues);
    } else if (m == 0 || m > static_cast<long>(p)) {
        fail(ErrorCode::BadSelection,
             "fixed retention must lie between 1 and the variable count");
    }
    if (m == 0) {
        fail(ErrorCode::NoComponentsRetained,
             "no components retained: no eigenvalue exceeds 1");
    }
    sol.retained = m;
    sol.loadings = pca.loadings.leftCols(m);
    sol.communalities = sol.loadings.cwiseProduct(sol.loadings).rowwise().sum();

    if (options.rotation == RotationMethod::Varimax) {
        VarimaxResult rot = varimax_rotate(sol.loadings, options.kaiser_normalize,
                                           options.tolerance, options.max_iterations);
        sol.rotated = true;
        sol.rotation_iterations = rot.iterations;
        sol.rotation_converged = rot.converged;
        if (!rot.converged) {
            sol.warnings.push_back("rotation did not converge in " +
                                   std::to_string(options.max_iterations) +
                                   " sweeps; best iterate reported");
        }

        // Presentation order: factors by explained variance, descending,
        // then the usual sign convention per column.
        const Eigen::VectorXd ssl =
            rot.loadings.cwiseProduct(rot.loadings).colwise().sum().transpose();
        std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&ssl](Eigen::Index a, Eigen::Index b) { return ssl(a) > ssl(b); });
        sol.rotated_loadings.resize(p, m);
        for (long f = 0; f < m; ++f) {
            sol.rotated_loadings.col(f) = rot.loadings.col(order[static_cast<std::size_t>(f)]);
        }
        fix_column_signs(sol.rotated_loadings);
    } else {
        sol.rotated = false;
        sol.rotated_loadings = sol.loadings;
    }
    sol.rotation_ssl =
        sol.rotated_loadings.cwiseProduct(sol.rotated_loadings).colwise().sum().transpose();
    return sol;
}

FactorScores factor_scores(const Eigen::MatrixXd& data, const FactorSolution& solution) {
    const Eigen::Index n = data.rows();
    const Eigen::Index p = data.cols();
    if (p != static_cast<Eigen::Index>(solution.variables.size())) {
        fail(ErrorCode::BadSelection, "data column count does not match the solution");
    }
    if (n < 2) fail(ErrorCode::TooFewObservations, "scores need at least 2 observations");

    const auto eig = decompose(solution.correlation, "factor_scores");
    if (eig.eigenvalues().minCoeff() <= 0.0) {
        fail(ErrorCode::SingularCorrelation, "correlation matrix is not invertible");
    }
    const Eigen::MatrixXd inverse = eig.eigenvectors() *
                                    eig.eigenvalues().array().inverse().matrix().asDiagonal() *
                                    eig.eigenvectors().transpose();

    Eigen::MatrixXd z = data.rowwise() - data.colwise().mean();
    for (Eigen::Index j = 0; j < p; ++j) {
        const double sd = z.col(j).norm() / std::sqrt(static_cast<double>(n - 1));
        if (sd <= 0.0) {
            fail(ErrorCode::ZeroVarianceColumn,
                 "variable '" + solution.variables[static_cast<std::size_t>(j)] +
                     "' has zero variance");
        }
        z.col(j) /= sd;
    }

    FactorScores out;
    out.scores = z * (inverse * solution.rotated_loadings);
    out.factor_names.reserve(static_cast<std::size_t>(solution.retained));
    for (long f = 1; f <= solution.retained; ++f) {
        out.factor_names.push_back("f_" + std::to_string(f));
    }
    return out;
}

}  // namespace panelkit
