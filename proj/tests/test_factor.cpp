#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "panelkit/errors.hpp"
#include "panelkit/factor.hpp"
#include "oracles.hpp"

using namespace panelkit;

namespace {

std::vector<std::string> var_names(long p) {
    std::vector<std::string> names;
    for (long j = 0; j < p; ++j) names.push_back("V" + std::to_string(j + 1));
    return names;
}

CorrelationMatrix equicorrelated(long p, double r) {
    CorrelationMatrix corr;
    corr.variables = var_names(p);
    corr.values = Eigen::MatrixXd::Constant(p, p, r);
    corr.values.diagonal().setOnes();
    return corr;
}

/// Deterministic uniform in [-1, 1) from raw engine words, so the test data
/// is identical on every platform.
double portable_uniform(std::mt19937_64& gen) {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    return 2.0 * u - 1.0;
}

Eigen::MatrixXd random_observations(long n, long p, unsigned long long seed) {
    std::mt19937_64 gen(seed);
    Eigen::MatrixXd out(n, p);
    // Two latent drivers plus noise give a real factor structure.
    for (long i = 0; i < n; ++i) {
        const double f1 = portable_uniform(gen);
        const double f2 = portable_uniform(gen);
        for (long j = 0; j < p; ++j) {
            const double w1 = (j % 2 == 0) ? 0.9 : 0.2;
            const double w2 = (j % 2 == 0) ? 0.1 : 0.8;
            out(i, j) = w1 * f1 + w2 * f2 + 0.35 * portable_uniform(gen);
        }
    }
    return out;
}

}  // namespace

TEST_CASE("pearson correlation matches the hand formula") {
    Eigen::MatrixXd data(4, 2);
    data << 1, 2, 2, 1, 3, 4, 5, 3;
    CorrelationMatrix corr = correlation_matrix(data, {"X", "Y"});
    const double expected =
        oracle::pearson({1.0, 2.0, 3.0, 5.0}, {2.0, 1.0, 4.0, 3.0});
    CHECK(expected == doctest::Approx(std::sqrt(7.0) / 5.0).epsilon(1e-14));
    CHECK(corr.values(0, 1) == doctest::Approx(expected).epsilon(1e-13));
    CHECK(corr.values(1, 0) == corr.values(0, 1));
    CHECK(corr.values(0, 0) == 1.0);
    CHECK(corr.values(1, 1) == 1.0);
}

TEST_CASE("perfectly collinear columns correlate to one, never past it") {
    Eigen::MatrixXd data(5, 2);
    for (long i = 0; i < 5; ++i) {
        data(i, 0) = static_cast<double>(i) + 0.25;
        data(i, 1) = 3.0 * data(i, 0) - 7.0;
    }
    CorrelationMatrix corr = correlation_matrix(data, {"A", "B"});
    CHECK(corr.values(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(corr.values(0, 1) <= 1.0);
}

TEST_CASE("correlation input validation") {
    Eigen::MatrixXd tiny(2, 2);
    tiny << 1, 2, 3, 4;
    try {
        correlation_matrix(tiny, {"A", "B"});
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::TooFewObservations);
    }

    Eigen::MatrixXd flat(4, 2);
    flat.col(0) << 1, 2, 3, 4;
    flat.col(1).setConstant(5.0);
    try {
        correlation_matrix(flat, {"A", "B"});
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::ZeroVarianceColumn);
        CHECK(std::string(e.what()).find("B") != std::string::npos);
    }
}

TEST_CASE("bartlett sphericity on closed-form determinants") {
    // Identity correlation: ln det = 0, so the statistic vanishes.
    CorrelationMatrix identity = equicorrelated(3, 0.0);
    BartlettTest flat = bartlett_sphericity(identity, 50);
    CHECK(flat.chi_square == 0.0);
    CHECK(flat.df == 3);
    CHECK(flat.p_value == 1.0);

    // Equicorrelated p = 3: det = (1-r)^2 (1+2r).
    CorrelationMatrix corr = equicorrelated(3, 0.5);
    BartlettTest test = bartlett_sphericity(corr, 50);
    const double det = 0.25 * 2.0;
    const double factor = 49.0 - 11.0 / 6.0;
    CHECK(test.chi_square == doctest::Approx(-factor * std::log(det)).epsilon(1e-12));
    CHECK(test.df == 3);

    // p = 12 has 66 off-diagonal pairs.
    BartlettTest wide = bartlett_sphericity(equicorrelated(12, 0.3), 28);
    CHECK(wide.df == 66);

    // Singular matrices cannot be tested.
    try {
        bartlett_sphericity(equicorrelated(3, 1.0), 50);
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::SingularCorrelation);
    }
    // The sample must outnumber the variables.
    try {
        bartlett_sphericity(equicorrelated(12, 0.3), 12);
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::TooFewObservations);
    }
}

TEST_CASE("kmo on the equicorrelated closed form") {
    // p = 3, r = 1/2: every partial correlation is r/(1+r) = 1/3, so
    // KMO = 3 r^2 / (3 r^2 + 3 q^2) = (1/4) / (1/4 + 1/9) = 9/13.
    CHECK(kmo(equicorrelated(3, 0.5)) == doctest::Approx(9.0 / 13.0).epsilon(1e-12));

    try {
        kmo(equicorrelated(4, 0.0));
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::UndefinedKMO);
    }

    // Any real dataset lands in (0, 1].
    Eigen::MatrixXd data = random_observations(40, 6, 11);
    CorrelationMatrix corr = correlation_matrix(data, var_names(6));
    const double measure = kmo(corr);
    CHECK(measure > 0.0);
    CHECK(measure <= 1.0);
}

TEST_CASE("two-variable extraction has closed-form eigenstructure") {
    const double r = 0.36;
    PcaExtraction pca = pca_extract(equicorrelated(2, r));
    CHECK(pca.eigenvalues(0) == doctest::Approx(1.0 + r).epsilon(1e-13));
    CHECK(pca.eigenvalues(1) == doctest::Approx(1.0 - r).epsilon(1e-13));
    const double load0 = std::sqrt((1.0 + r) / 2.0);
    const double load1 = std::sqrt((1.0 - r) / 2.0);
    CHECK(std::fabs(pca.loadings(0, 0)) == doctest::Approx(load0).epsilon(1e-12));
    CHECK(std::fabs(pca.loadings(1, 0)) == doctest::Approx(load0).epsilon(1e-12));
    CHECK(std::fabs(pca.loadings(0, 1)) == doctest::Approx(load1).epsilon(1e-12));
    // Sign rule: the dominant entry of each column is positive.
    for (long f = 0; f < 2; ++f) {
        long arg = 0;
        pca.loadings.col(f).cwiseAbs().maxCoeff(&arg);
        CHECK(pca.loadings(arg, f) > 0.0);
    }
}

TEST_CASE("kaiser retention is strict") {
    Eigen::VectorXd values(4);
    values << 2.5, 1.0 + 1e-9, 1.0, 0.2;
    CHECK(kaiser_retain(values) == 2);
    values << 1.0, 1.0, 1.0, 1.0;
    CHECK(kaiser_retain(values) == 0);
    values << 0.9, 0.5, 0.1, 0.0;
    CHECK(kaiser_retain(values) == 0);
}

TEST_CASE("single factor rotation is the identity") {
    Eigen::MatrixXd loadings(3, 1);
    loadings << 0.9, 0.8, 0.7;
    VarimaxResult rot = varimax_rotate(loadings);
    CHECK(rot.converged);
    CHECK(rot.iterations == 1);
    CHECK((rot.loadings - loadings).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rotation preserves communalities and improves the criterion") {
    Eigen::MatrixXd data = random_observations(60, 6, 2718);
    CorrelationMatrix corr = correlation_matrix(data, var_names(6));
    FactorOptions options;
    options.retain = 2;
    FactorSolution sol = summarize_solution(corr, 60, options);

    REQUIRE(sol.rotated);
    CHECK(sol.rotation_converged);
    for (long j = 0; j < 6; ++j) {
        const double before = sol.loadings.row(j).squaredNorm();
        const double after = sol.rotated_loadings.row(j).squaredNorm();
        CHECK(after == doctest::Approx(before).epsilon(1e-10));
        CHECK(sol.communalities(j) == doctest::Approx(before).epsilon(1e-12));
    }
    CHECK(oracle::varimax_objective(sol.rotated_loadings) >=
          oracle::varimax_objective(sol.loadings) - 1e-12);

    // Rotated columns arrive in descending explained-variance order with the
    // dominant entry of each column positive.
    for (long f = 0; f + 1 < 2; ++f) {
        CHECK(sol.rotation_ssl(f) >= sol.rotation_ssl(f + 1));
    }
    for (long f = 0; f < 2; ++f) {
        long arg = 0;
        sol.rotated_loadings.col(f).cwiseAbs().maxCoeff(&arg);
        CHECK(sol.rotated_loadings(arg, f) > 0.0);
    }
}

TEST_CASE("sweep count is monotone in the iteration budget") {
    Eigen::MatrixXd data = random_observations(80, 8, 555);
    CorrelationMatrix corr = correlation_matrix(data, var_names(8));
    PcaExtraction pca = pca_extract(corr);
    const Eigen::MatrixXd loadings = pca.loadings.leftCols(3);

    // Without row normalization every pairwise step maximizes the raw
    // criterion directly, so more sweeps can only improve it.
    double prev = oracle::varimax_objective(loadings);
    for (long budget = 1; budget <= 6; ++budget) {
        VarimaxResult rot = varimax_rotate(loadings, false, 0.0, budget);
        CHECK(rot.iterations <= budget);
        const double value = oracle::varimax_objective(rot.loadings);
        CHECK(value >= prev - 1e-12);
        prev = value;
    }
    // A zero tolerance with a tiny budget reports non-convergence but still
    // returns the iterate reached.
    VarimaxResult rot = varimax_rotate(loadings, false, 0.0, 1);
    CHECK(!rot.converged);
}

TEST_CASE("two-factor rotation reaches the grid-search optimum") {
    for (unsigned long long seed : {11ULL, 22ULL, 33ULL}) {
        Eigen::MatrixXd data = random_observations(50, 6, seed);
        CorrelationMatrix corr = correlation_matrix(data, var_names(6));
        PcaExtraction pca = pca_extract(corr);
        const Eigen::MatrixXd loadings = pca.loadings.leftCols(2);

        VarimaxResult rot = varimax_rotate(loadings, /*kaiser_normalize=*/false);
        const Eigen::MatrixXd best = oracle::varimax_grid(loadings);
        CHECK(oracle::varimax_objective(rot.loadings) >=
              oracle::varimax_objective(best) - 1e-4);
    }
}

TEST_CASE("full solution bookkeeping") {
    Eigen::MatrixXd data = random_observations(70, 6, 90);
    CorrelationMatrix corr = correlation_matrix(data, var_names(6));
    FactorSolution sol = summarize_solution(corr, 70);

    CHECK(sol.eigenvalues.sum() == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(sol.pct_variance.sum() == doctest::Approx(100.0).epsilon(1e-10));
    CHECK(sol.cumulative_pct(5) == doctest::Approx(100.0).epsilon(1e-10));
    for (long f = 0; f + 1 < 6; ++f) {
        CHECK(sol.eigenvalues(f) >= sol.eigenvalues(f + 1));
        CHECK(sol.cumulative_pct(f) <= sol.cumulative_pct(f + 1));
    }
    CHECK(sol.retained == kaiser_retain(sol.eigenvalues));
    CHECK(sol.retained >= 1);
    CHECK(sol.bartlett.df == 15);
    CHECK(sol.kmo > 0.0);

    // Fixed retention overrides Kaiser.
    FactorOptions fixed;
    fixed.retain = 3;
    FactorSolution sol3 = summarize_solution(corr, 70, fixed);
    CHECK(sol3.retained == 3);
    CHECK(sol3.rotated_loadings.cols() == 3);

    FactorOptions none;
    none.retain = 2;
    none.rotation = RotationMethod::None;
    FactorSolution flat = summarize_solution(corr, 70, none);
    CHECK(!flat.rotated);
    CHECK((flat.rotated_loadings - flat.loadings).cwiseAbs().maxCoeff() == 0.0);

    FactorOptions bad;
    bad.retain = 9;
    try {
        summarize_solution(corr, 70, bad);
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::BadSelection);
    }
}

TEST_CASE("uncorrelated columns retain nothing under kaiser") {
    // Orthogonal patterns over eight observations: the correlation matrix is
    // exactly the identity, so no eigenvalue exceeds one.
    Eigen::MatrixXd data(8, 3);
    data.col(0) << 1, 1, 1, 1, -1, -1, -1, -1;
    data.col(1) << 1, 1, -1, -1, 1, 1, -1, -1;
    data.col(2) << 1, -1, 1, -1, 1, -1, 1, -1;
    CorrelationMatrix corr = correlation_matrix(data, var_names(3));
    CHECK(corr.values.cwiseAbs().maxCoeff() == 1.0);  // diagonal only
    CHECK((corr.values - Eigen::MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() == 0.0);
    try {
        summarize_solution(corr, 8);
        CHECK(false);
    } catch (const ToolkitError& e) {
        CHECK(e.code() == ErrorCode::NoComponentsRetained);
    }
}

TEST_CASE("variable rescaling does not move the solution") {
    Eigen::MatrixXd data = random_observations(45, 5, 1234);
    CorrelationMatrix base_corr = correlation_matrix(data, var_names(5));
    FactorSolution base = summarize_solution(base_corr, 45);

    Eigen::MatrixXd scaled = data;
    scaled.col(0) *= 250.0;
    scaled.col(3) *= 1e-6;
    CorrelationMatrix scaled_corr = correlation_matrix(scaled, var_names(5));
    FactorSolution moved = summarize_solution(scaled_corr, 45);

    REQUIRE(moved.retained == base.retained);
    for (long j = 0; j < 5; ++j) {
        for (long f = 0; f < base.retained; ++f) {
            CHECK(moved.rotated_loadings(j, f) ==
                  doctest::Approx(base.rotated_loadings(j, f)).epsilon(1e-8));
        }
    }
}

TEST_CASE("factor scores are centered and reproduce the one-variable case") {
    Eigen::MatrixXd data = random_observations(50, 6, 31);
    CorrelationMatrix corr = correlation_matrix(data, var_names(6));
    FactorSolution sol = summarize_solution(corr, 50);
    FactorScores scores = factor_scores(data, sol);

    REQUIRE(scores.scores.cols() == sol.retained);
    CHECK(scores.factor_names[0] == "f_1");
    for (long f = 0; f < sol.retained; ++f) {
        CHECK(scores.scores.col(f).mean() == doctest::Approx(0.0).scale(1.0).epsilon(1e-10));
    }

    // One variable, one factor: the score is the standardized variable.
    Eigen::MatrixXd single = data.leftCols(1);
    CorrelationMatrix corr1 = correlation_matrix(single, {"V1"});
    FactorOptions opts;
    opts.retain = 1;
    FactorSolution sol1 = summarize_solution(corr1, 50, opts);
    FactorScores s1 = factor_scores(single, sol1);
    Eigen::VectorXd centered = single.col(0).array() - single.col(0).mean();
    Eigen::VectorXd standardized = centered / (centered.norm() / std::sqrt(49.0));
    for (long i = 0; i < 50; ++i) {
        CHECK(s1.scores(i, 0) == doctest::Approx(standardized(i)).epsilon(1e-10));
    }
}
