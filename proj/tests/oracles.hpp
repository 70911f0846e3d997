// Independent reference implementations used to cross-check the library.
// Everything here favors clarity over speed: extended precision, textbook
// formulas, brute-force designs, no shared code with the library internals.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using LongMatrix = std::vector<std::vector<long double>>;
using LongVector = std::vector<long double>;

inline LongMatrix long_matrix(std::size_t rows, std::size_t cols) {
    return LongMatrix(rows, LongVector(cols, 0.0L));
}

/// Gauss-Jordan solve of A z = b in extended precision, partial pivoting.
inline LongVector gauss_solve(LongMatrix a, LongVector b) {
    const std::size_t n = a.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(static_cast<double>(a[r][col])) >
                std::fabs(static_cast<double>(a[pivot][col]))) {
                pivot = r;
            }
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        const long double diag = a[col][col];
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double factor = a[r][col] / diag;
            for (std::size_t c = col; c < n; ++c) a[r][c] -= factor * a[col][c];
            b[r] -= factor * b[col];
        }
    }
    LongVector z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = b[i] / a[i][i];
    return z;
}

/// Full inverse via Gauss-Jordan, for covariance cross-checks.
inline LongMatrix gauss_inverse(LongMatrix a) {
    const std::size_t n = a.size();
    LongMatrix inv = long_matrix(n, n);
    for (std::size_t i = 0; i < n; ++i) inv[i][i] = 1.0L;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::fabs(static_cast<double>(a[r][col])) >
                std::fabs(static_cast<double>(a[pivot][col]))) {
                pivot = r;
            }
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const long double diag = a[col][col];
        for (std::size_t c = 0; c < n; ++c) {
            a[col][c] /= diag;
            inv[col][c] /= diag;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const long double factor = a[r][col];
            for (std::size_t c = 0; c < n; ++c) {
                a[r][c] -= factor * a[col][c];
                inv[r][c] -= factor * inv[col][c];
            }
        }
    }
    return inv;
}

struct OlsOracle {
    Eigen::VectorXd coefficients;
    Eigen::MatrixXd covariance;  // s^2 (X'X)^-1
    double ssr = 0.0;
};

/// Ordinary least squares through the raw normal equations in long double.
inline OlsOracle ols(const Eigen::VectorXd& y, const Eigen::MatrixXd& x) {
    const std::size_t n = static_cast<std::size_t>(x.rows());
    const std::size_t k = static_cast<std::size_t>(x.cols());
    LongMatrix xtx = long_matrix(k, k);
    LongVector xty(k, 0.0L);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t a = 0; a < k; ++a) {
            const long double xa = x(static_cast<long>(i), static_cast<long>(a));
            xty[a] += xa * static_cast<long double>(y(static_cast<long>(i)));
            for (std::size_t b = 0; b < k; ++b) {
                xtx[a][b] += xa * static_cast<long double>(
                                      x(static_cast<long>(i), static_cast<long>(b)));
            }
        }
    }
    const LongVector beta = gauss_solve(xtx, xty);
    long double ssr = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        long double fit = 0.0L;
        for (std::size_t a = 0; a < k; ++a) {
            fit += static_cast<long double>(x(static_cast<long>(i), static_cast<long>(a))) *
                   beta[a];
        }
        const long double e = static_cast<long double>(y(static_cast<long>(i))) - fit;
        ssr += e * e;
    }
    const LongMatrix inv = gauss_inverse(xtx);
    const long double s2 = ssr / static_cast<long double>(n - k);

    OlsOracle out;
    out.coefficients.resize(static_cast<long>(k));
    out.covariance.resize(static_cast<long>(k), static_cast<long>(k));
    for (std::size_t a = 0; a < k; ++a) {
        out.coefficients(static_cast<long>(a)) = static_cast<double>(beta[a]);
        for (std::size_t b = 0; b < k; ++b) {
            out.covariance(static_cast<long>(a), static_cast<long>(b)) =
                static_cast<double>(s2 * inv[a][b]);
        }
    }
    out.ssr = static_cast<double>(ssr);
    return out;
}

/// Least-squares-dummy-variables estimate: regress y on [x, one dummy per
/// entity] with no common constant. Returns slopes first, then the N entity
/// intercepts, with the matching covariance.
inline OlsOracle lsdv(const Eigen::VectorXd& y, const Eigen::MatrixXd& x,
                      const std::vector<long>& group_sizes) {
    const long n = x.rows();
    const long k = x.cols();
    const long n_groups = static_cast<long>(group_sizes.size());
    Eigen::MatrixXd design = Eigen::MatrixXd::Zero(n, k + n_groups);
    design.leftCols(k) = x;
    long row = 0;
    for (long g = 0; g < n_groups; ++g) {
        for (long t = 0; t < group_sizes[static_cast<std::size_t>(g)]; ++t, ++row) {
            design(row, k + g) = 1.0;
        }
    }
    return ols(y, design);
}

/// d' V^{-1} d in extended precision.
inline double quadratic_form(const Eigen::MatrixXd& v, const Eigen::VectorXd& d) {
    const std::size_t k = static_cast<std::size_t>(d.size());
    LongMatrix a = long_matrix(k, k);
    LongVector b(k);
    for (std::size_t i = 0; i < k; ++i) {
        b[i] = static_cast<long double>(d(static_cast<long>(i)));
        for (std::size_t j = 0; j < k; ++j) {
            a[i][j] = static_cast<long double>(v(static_cast<long>(i), static_cast<long>(j)));
        }
    }
    const LongVector z = gauss_solve(a, b);
    long double q = 0.0L;
    for (std::size_t i = 0; i < k; ++i) q += b[i] * z[i];
    return static_cast<double>(q);
}

/// Pearson correlation straight from the definition.
inline double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
    const std::size_t n = xs.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += xs[i];
        my += ys[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

/// The raw varimax objective, written independently of the library.
inline double varimax_objective(const Eigen::MatrixXd& loadings) {
    const double p = static_cast<double>(loadings.rows());
    double total = 0.0;
    for (long f = 0; f < loadings.cols(); ++f) {
        double sum2 = 0.0;
        double sum4 = 0.0;
        for (long j = 0; j < loadings.rows(); ++j) {
            const double b2 = loadings(j, f) * loadings(j, f);
            sum2 += b2;
            sum4 += b2 * b2;
        }
        total += sum4 / p - (sum2 / p) * (sum2 / p);
    }
    return total;
}

/// Exhaustive planar-rotation search: repeatedly sweeps all column pairs,
/// trying a fine grid of angles and keeping any improvement. Slow but free of
/// the closed-form angle algebra the library uses.
inline Eigen::MatrixXd varimax_grid(Eigen::MatrixXd loadings, int sweeps = 60,
                                    int grid = 720) {
    const long m = loadings.cols();
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        bool improved = false;
        for (long a = 0; a < m - 1; ++a) {
            for (long b = a + 1; b < m; ++b) {
                double best = varimax_objective(loadings);
                double best_angle = 0.0;
                for (int g = 1; g < grid; ++g) {
                    const double angle = (3.14159265358979323846 / 2.0) *
                                         static_cast<double>(g) / static_cast<double>(grid);
                    Eigen::MatrixXd trial = loadings;
                    const double c = std::cos(angle);
                    const double s = std::sin(angle);
                    trial.col(a) = c * loadings.col(a) + s * loadings.col(b);
                    trial.col(b) = -s * loadings.col(a) + c * loadings.col(b);
                    const double value = varimax_objective(trial);
                    if (value > best + 1e-15) {
                        best = value;
                        best_angle = angle;
                    }
                }
                if (best_angle != 0.0) {
                    const double c = std::cos(best_angle);
                    const double s = std::sin(best_angle);
                    const Eigen::VectorXd col_a = loadings.col(a);
                    const Eigen::VectorXd col_b = loadings.col(b);
                    loadings.col(a) = c * col_a + s * col_b;
                    loadings.col(b) = -s * col_a + c * col_b;
                    improved = true;
                }
            }
        }
        if (!improved) break;
    }
    return loadings;
}

}  // namespace oracle
