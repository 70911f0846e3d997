#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include <doctest.h>

#include "panelkit/errors.hpp"
#include "panelkit/panel.hpp"
#include "panelkit/simulate.hpp"

using namespace panelkit;

namespace {

PanelDGP base_dgp() {
    PanelDGP dgp;
    dgp.n_entities = 8;
    dgp.n_periods = 12;
    dgp.beta.resize(2);
    dgp.beta << 2.0, 3.0;
    dgp.intercept = 5.0;
    dgp.sigma_u = 4.0;
    dgp.sigma_e = 1.0;
    dgp.regressor_laws = {RegressorLaw::uniform(0.0, 10.0), RegressorLaw::uniform(0.0, 10.0)};
    dgp.seed = 42;
    return dgp;
}

VariableSelection select(long k) {
    VariableSelection sel;
    sel.dependent = "Y";
    for (long j = 1; j <= k; ++j) sel.regressors.push_back("X" + std::to_string(j));
    return sel;
}

}  // namespace

TEST_CASE("same seed reproduces the panel bit for bit") {
    SimulatedPanel a = generate(base_dgp());
    SimulatedPanel b = generate(base_dgp());
    for (const auto& name : {"Y", "X1", "X2"}) {
        CHECK((a.data.values(name) - b.data.values(name)).cwiseAbs().maxCoeff() == 0.0);
    }
    CHECK((a.truth.entity_effects - b.truth.entity_effects).cwiseAbs().maxCoeff() == 0.0);

    PanelDGP other = base_dgp();
    other.seed = 43;
    SimulatedPanel c = generate(other);
    CHECK((a.data.values("Y") - c.data.values("Y")).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("the word-to-variate mapping is pinned") {
    // First regressor draw for the first observation: the engine has served
    // two words per entity effect, and uniforms map the top 53 bits of one
    // word into [0, 10).
    PanelDGP dgp = base_dgp();
    SimulatedPanel panel = generate(dgp);
    std::mt19937_64 engine(dgp.seed);
    for (long i = 0; i < 2 * dgp.n_entities; ++i) engine();
    const double expected = 10.0 * (static_cast<double>(engine() >> 11) * 0x1.0p-53);
    CHECK(panel.data.values("X1")(0, 0) == expected);
}

TEST_CASE("zero noise produces an exactly linear panel") {
    PanelDGP dgp = base_dgp();
    dgp.sigma_u = 0.0;
    dgp.sigma_e = 0.0;
    SimulatedPanel panel = generate(dgp);

    CHECK(panel.truth.entity_effects.cwiseAbs().maxCoeff() == 0.0);

    PanelFit pooled = fit_pooled(panel.data, select(2));
    CHECK(pooled.fit.stats.perfect_fit);
    CHECK(pooled.fit.coefficients(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(pooled.fit.coefficients(1) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(pooled.fit.coefficients(2) == doctest::Approx(5.0).epsilon(1e-9));

    PanelFit within = fit_fixed_effects(panel.data, select(2));
    CHECK(within.fit.coefficients(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(within.fit.coefficients(1) == doctest::Approx(3.0).epsilon(1e-9));

    PanelFit random = fit_random_effects(panel.data, select(2));
    CHECK(random.fit.coefficients(0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(random.fit.coefficients(1) == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(random.fit.coefficients(2) == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("entity effect sample variance approaches sigma_u squared") {
    PanelDGP dgp;
    dgp.n_entities = 20000;
    dgp.n_periods = 2;
    dgp.beta.resize(1);
    dgp.beta << 1.0;
    dgp.sigma_u = 3.0;
    dgp.sigma_e = 0.5;
    dgp.regressor_laws = {RegressorLaw::uniform(0.0, 1.0)};
    dgp.seed = 7;
    SimulatedPanel panel = generate(dgp);
    const Eigen::VectorXd& u = panel.truth.entity_effects;
    const double mean = u.mean();
    const double var =
        (u.array() - mean).square().sum() / static_cast<double>(u.size() - 1);
    CHECK(std::fabs(var - 9.0) < 0.05 * 9.0);
}

TEST_CASE("regressor laws are honored") {
    PanelDGP dgp = base_dgp();
    dgp.regressor_laws = {RegressorLaw::uniform(-2.0, -1.0), RegressorLaw::gaussian(7.0, 0.0)};
    SimulatedPanel panel = generate(dgp);
    CHECK(panel.data.values("X1").minCoeff() >= -2.0);
    CHECK(panel.data.values("X1").maxCoeff() < -1.0);
    // A zero-sd gaussian is a constant stream.
    CHECK(panel.data.values("X2").minCoeff() == 7.0);
    CHECK(panel.data.values("X2").maxCoeff() == 7.0);

    PanelDGP wide = base_dgp();
    wide.n_entities = 400;
    wide.regressor_laws = {RegressorLaw::gaussian(10.0, 2.0), RegressorLaw::uniform(0.0, 1.0)};
    SimulatedPanel big = generate(wide);
    const Eigen::MatrixXd& x1 = big.data.values("X1");
    const double mean = x1.mean();
    CHECK(std::fabs(mean - 10.0) < 0.1);
}

TEST_CASE("monte carlo slope means sit on the truth") {
    double sum1 = 0.0;
    double sum2 = 0.0;
    std::vector<double> b1;
    std::vector<double> b2;
    for (unsigned long long seed = 1; seed <= 100; ++seed) {
        PanelDGP dgp = base_dgp();
        dgp.seed = seed;
        SimulatedPanel panel = generate(dgp);
        PanelFit fe = fit_fixed_effects(panel.data, select(2));
        b1.push_back(fe.fit.coefficients(0));
        b2.push_back(fe.fit.coefficients(1));
        sum1 += b1.back();
        sum2 += b2.back();
    }
    const double mean1 = sum1 / 100.0;
    const double mean2 = sum2 / 100.0;
    double var1 = 0.0;
    double var2 = 0.0;
    for (int i = 0; i < 100; ++i) {
        var1 += (b1[static_cast<std::size_t>(i)] - mean1) * (b1[static_cast<std::size_t>(i)] - mean1);
        var2 += (b2[static_cast<std::size_t>(i)] - mean2) * (b2[static_cast<std::size_t>(i)] - mean2);
    }
    var1 /= 99.0;
    var2 /= 99.0;
    const double mcse1 = std::sqrt(var1 / 100.0);
    const double mcse2 = std::sqrt(var2 / 100.0);
    CHECK(std::fabs(mean1 - 2.0) < 3.0 * mcse1);
    CHECK(std::fabs(mean2 - 3.0) < 3.0 * mcse2);
}

TEST_CASE("weighting pays off under entity-level heteroskedasticity") {
    double weighted_se = 0.0;
    double unweighted_se = 0.0;
    for (unsigned long long seed = 1; seed <= 100; ++seed) {
        PanelDGP dgp = base_dgp();
        dgp.seed = seed;
        dgp.sigma_e = 2.0;
        dgp.per_entity_scale = {0.2, 0.2, 0.5, 0.5, 1.0, 1.0, 4.0, 4.0};
        SimulatedPanel panel = generate(dgp);
        PanelFit plain = fit_fixed_effects(panel.data, select(2));
        PanelFit weighted =
            fit_fixed_effects(panel.data, select(2), PanelWeighting::CrossSection);
        unweighted_se += plain.fit.std_errors(0) + plain.fit.std_errors(1);
        weighted_se += weighted.fit.std_errors(0) + weighted.fit.std_errors(1);
    }
    CHECK(weighted_se < unweighted_se);
}

TEST_CASE("invalid generating processes are rejected") {
    auto expect_invalid = [](PanelDGP dgp) {
        try {
            generate(dgp);
            return false;
        } catch (const ToolkitError& e) {
            return e.code() == ErrorCode::InvalidDgp;
        }
    };
    PanelDGP dgp = base_dgp();
    dgp.n_entities = 1;
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.n_periods = 1;
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.beta.resize(0);
    dgp.regressor_laws.clear();
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.sigma_e = -1.0;
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.regressor_laws.pop_back();
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.regressor_laws[0] = RegressorLaw::uniform(3.0, 3.0);
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.per_entity_scale = {1.0, 1.0};
    CHECK(expect_invalid(dgp));

    dgp = base_dgp();
    dgp.per_entity_scale.assign(8, 1.0);
    dgp.per_entity_scale[3] = 0.0;
    CHECK(expect_invalid(dgp));
}

TEST_CASE("generated panels round-trip through the CSV layer") {
    SimulatedPanel panel = generate(base_dgp());
    const char* path = "pk_sim_roundtrip.csv";
    write_long_csv(panel.data, path);
    PanelDataset loaded = load_long_csv(path);
    CHECK(loaded.n_entities() == 8);
    CHECK(loaded.n_periods() == 12);
    for (const auto& name : {"Y", "X1", "X2"}) {
        CHECK((loaded.values(name) - panel.data.values(name)).cwiseAbs().maxCoeff() == 0.0);
    }
    std::remove(path);
}
