#include "panelkit/panel.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "panelkit/distributions.hpp"
#include "panelkit/errors.hpp"
#include "panelkit/format.hpp"

namespace panelkit {

namespace {

// Stacked selection split into the pieces every panel estimator needs:
// entity means, entity-demeaned data, and the (equal) group sizes.
struct PanelParts {
    Eigen::VectorXd y;       // NT rows, entity-major then time ascending
    Eigen::MatrixXd x;       // NT x k slope regressors, no constant
    Eigen::VectorXd y_mean;  // N entity means
    Eigen::MatrixXd x_mean;  // N x k entity means
    Eigen::VectorXd y_dem;   // y minus own entity mean
    Eigen::MatrixXd x_dem;
    std::vector<long> groups;
    long n = 0;  // entities
    long t = 0;  // periods
    long k = 0;  // slope count
};

PanelParts split_by_entity(const PanelDataset& data, const VariableSelection& sel) {
    StackedData stacked = stack(data, sel, ConstantColumn::None);

    PanelParts parts;
    parts.n = static_cast<long>(data.n_entities());
    parts.t = static_cast<long>(data.n_periods());
    parts.k = static_cast<long>(sel.regressors.size());
    parts.y = std::move(stacked.y);
    parts.x = std::move(stacked.x);
    parts.groups.assign(static_cast<std::size_t>(parts.n), parts.t);

    parts.y_mean.resize(parts.n);
    parts.x_mean.resize(parts.n, parts.k);
    parts.y_dem.resizeLike(parts.y);
    parts.x_dem.resizeLike(parts.x);
    for (long i = 0; i < parts.n; ++i) {
        const long row0 = i * parts.t;
        const Eigen::RowVectorXd mu_x = parts.x.middleRows(row0, parts.t).colwise().mean();
        const double mu_y = parts.y.segment(row0, parts.t).mean();
        parts.y_mean(i) = mu_y;
        parts.x_mean.row(i) = mu_x;
        parts.y_dem.segment(row0, parts.t) = parts.y.segment(row0, parts.t).array() - mu_y;
        parts.x_dem.middleRows(row0, parts.t) =
            parts.x.middleRows(row0, parts.t).rowwise() - mu_x;
    }
    return parts;
}

PanelInfo make_info(const PanelDataset& data, const VariableSelection& sel) {
    PanelInfo info;
    info.dependent = sel.dependent;
    info.regressors = sel.regressors;
    info.n_entities = static_cast<long>(data.n_entities());
    info.n_periods = static_cast<long>(data.n_periods());
    info.n_obs = info.n_entities * info.n_periods;
    info.first_period = data.periods().front();
    info.last_period = data.periods().back();
    return info;
}

// Coefficient table from a solved design: covariance, errors, t's and
// two-sided Student-t p-values at the given residual degrees of freedom.
void fill_coefficient_table(RegressionFit& fit, long df) {
    const Eigen::Index k = fit.coefficients.size();
    fit.std_errors = fit.covariance.diagonal().array().max(0.0).sqrt();
    fit.t_stats.resize(k);
    fit.p_values.resize(k);
    for (Eigen::Index j = 0; j < k; ++j) {
        fit.t_stats(j) = fit.coefficients(j) / fit.std_errors(j);
        fit.p_values(j) = dist::student_t_two_sided(fit.t_stats(j), static_cast<double>(df));
    }
}

// Within estimator on data rescaled per entity by `weight` (all ones for the
// unweighted fit). Slopes come from the demeaned regression; the entity
// intercepts fall out of the original-scale means because each entity's
// scale factor cancels inside its own normal equation.
struct WithinFit {
    Eigen::VectorXd beta;        // k slopes
    double common = 0.0;         // mean of entity intercepts
    Eigen::VectorXd alpha;       // N entity intercepts
    Eigen::MatrixXd covariance;  // (k+1)x(k+1), constant last
    Eigen::VectorXd residuals;   // original scale: y - x beta - alpha_i
    double ssr_within = 0.0;     // of the scaled demeaned regression
    double s2 = 0.0;             // ssr_within / (NT - N - k)
};

WithinFit within_engine(const PanelParts& parts, const Eigen::VectorXd& weight) {
    const long nt = parts.n * parts.t;
    if (nt <= parts.n + parts.k) {
        fail(ErrorCode::TooFewObservations,
             "within regression needs N*T > N + " + std::to_string(parts.k) +
                 " for the entity-demeaned degrees of freedom");
    }

    Eigen::VectorXd y_s = parts.y_dem;
    Eigen::MatrixXd x_s = parts.x_dem;
    for (long i = 0; i < parts.n; ++i) {
        y_s.segment(i * parts.t, parts.t) *= weight(i);
        x_s.middleRows(i * parts.t, parts.t) *= weight(i);
    }

    OlsCore core = ols_core(y_s, x_s);
    const long df = nt - parts.n - parts.k;

    WithinFit out;
    out.beta = std::move(core.beta);
    out.ssr_within = core.ssr;
    out.s2 = core.ssr / static_cast<double>(df);

    out.alpha = parts.y_mean - parts.x_mean * out.beta;
    out.common = out.alpha.mean();

    out.residuals.resize(nt);
    for (long i = 0; i < parts.n; ++i) {
        out.residuals.segment(i * parts.t, parts.t) =
            parts.y.segment(i * parts.t, parts.t) -
            parts.x.middleRows(i * parts.t, parts.t) * out.beta -
            Eigen::VectorXd::Constant(parts.t, out.alpha(i));
    }

    // Covariance of (slopes, common intercept). With V = s2 (X~'X~)^-1 and
    // xg the grand mean regressor row, the mean-of-intercepts estimator has
    //   var(C) = s2 * sum_i sigma_i^2 / (N^2 T) + xg' V xg,
    //   cov(C, beta) = -V xg,
    // which reduces to s2/(NT) + xg' V xg in the unweighted case.
    const Eigen::MatrixXd v_beta = out.s2 * core.xtx_inverse;
    const Eigen::VectorXd x_grand = parts.x_mean.colwise().mean().transpose();
    const double sigma_sq_sum = weight.array().inverse().square().sum();
    const double var_c =
        out.s2 * sigma_sq_sum / (static_cast<double>(parts.n) * static_cast<double>(parts.n) *
                                 static_cast<double>(parts.t)) +
        x_grand.dot(v_beta * x_grand);

    out.covariance.resize(parts.k + 1, parts.k + 1);
    out.covariance.topLeftCorner(parts.k, parts.k) = v_beta;
    out.covariance.topRightCorner(parts.k, 1) = -(v_beta * x_grand);
    out.covariance.bottomLeftCorner(1, parts.k) = -(v_beta * x_grand).transpose();
    out.covariance(parts.k, parts.k) = var_c;
    return out;
}

RegressionFit assemble_within_table(const PanelParts& parts, const WithinFit& within) {
    RegressionFit fit;
    fit.coefficients.resize(parts.k + 1);
    fit.coefficients.head(parts.k) = within.beta;
    fit.coefficients(parts.k) = within.common;
    fit.covariance = within.covariance;
    fit.residuals = within.residuals;
    fit.fitted = parts.y - within.residuals;
    fill_coefficient_table(fit, parts.n * parts.t - parts.n - parts.k);
    return fit;
}

// Random-effects GLS at a given theta: OLS on v - theta * entity_mean(v)
// with the constant column shrunk to (1 - theta). Entity predictions use the
// shrinkage factor 1 - (1-theta)^2 = T su^2 / (se^2 + T su^2).
struct GlsOutcome {
    RegressionFit fit;       // original-scale residuals/fitted
    FitStats weighted;       // transformed-data statistics
    FitStats unweighted;     // original-scale statistics
    Eigen::VectorXd alpha;   // common + predicted deviation per entity
    Eigen::VectorXd u_pred;  // predicted entity deviations
    std::vector<std::string> warnings;
};

GlsOutcome random_gls(const PanelParts& parts, double theta) {
    const long nt = parts.n * parts.t;
    const long df = nt - parts.k - 1;
    if (df <= 0) {
        fail(ErrorCode::TooFewObservations, "GLS regression needs N*T > slopes + 1");
    }

    GlsOutcome out;
    Eigen::VectorXd beta(parts.k);
    double common = 0.0;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    Eigen::VectorXd w(nt);
    for (long i = 0; i < parts.n; ++i) {
        w.segment(i * parts.t, parts.t) =
            parts.y.segment(i * parts.t, parts.t).array() - theta * parts.y_mean(i);
    }

    if (theta < 1.0) {
        Eigen::MatrixXd z(nt, parts.k + 1);
        for (long i = 0; i < parts.n; ++i) {
            z.block(i * parts.t, 0, parts.t, parts.k) =
                parts.x.middleRows(i * parts.t, parts.t).rowwise() -
                theta * parts.x_mean.row(i);
        }
        z.col(parts.k).setConstant(1.0 - theta);

        OlsCore core = ols_core(w, z);
        beta = core.beta.head(parts.k);
        common = core.beta(parts.k);
        const double s2 = core.ssr / static_cast<double>(df);

        out.fit.coefficients = std::move(core.beta);
        out.fit.covariance = s2 * core.xtx_inverse;
        out.weighted = compute_fit_statistics(w, core.fitted, core.residuals, nt, parts.k + 1,
                                              parts.groups);
    } else {
        // theta = 1 is full demeaning: the transformed constant column is
        // identically zero, so the intercept comes from the grand means and
        // its variance is not identified by the transformed regression.
        OlsCore core = ols_core(parts.y_dem, parts.x_dem);
        beta = core.beta;
        common = parts.y_mean.mean() -
                 parts.x_mean.colwise().mean().dot(core.beta);
        const double s2 = core.ssr / static_cast<double>(df);

        out.fit.coefficients.resize(parts.k + 1);
        out.fit.coefficients.head(parts.k) = beta;
        out.fit.coefficients(parts.k) = common;
        out.fit.covariance = Eigen::MatrixXd::Constant(parts.k + 1, parts.k + 1, nan);
        out.fit.covariance.topLeftCorner(parts.k, parts.k) = s2 * core.xtx_inverse;
        out.weighted = compute_fit_statistics(parts.y_dem, core.fitted, core.residuals, nt,
                                              parts.k + 1, parts.groups);
        out.warnings.push_back("intercept variance is undefined at theta = 1");
    }

    fill_coefficient_table(out.fit, df);

    // Original-scale residuals against the composite prediction x'b + C.
    out.fit.residuals = parts.y - parts.x * beta - Eigen::VectorXd::Constant(nt, common);
    out.fit.fitted = parts.y - out.fit.residuals;
    out.unweighted = compute_fit_statistics(parts.y, out.fit.fitted, out.fit.residuals, nt,
                                            parts.k + 1, parts.groups);

    const double shrink = 1.0 - (1.0 - theta) * (1.0 - theta);
    out.u_pred.resize(parts.n);
    for (long i = 0; i < parts.n; ++i) {
        out.u_pred(i) = shrink * out.fit.residuals.segment(i * parts.t, parts.t).mean();
    }
    out.alpha = Eigen::VectorXd::Constant(parts.n, common) + out.u_pred;
    return out;
}

EffectsDecomposition make_effects(const PanelDataset& data, double common,
                                  const Eigen::VectorXd& alpha) {
    EffectsDecomposition effects;
    effects.common_intercept = common;
    effects.entities = data.entities();
    effects.entity_intercepts.assign(alpha.data(), alpha.data() + alpha.size());
    effects.deviations.resize(effects.entity_intercepts.size());
    for (std::size_t i = 0; i < effects.deviations.size(); ++i) {
        effects.deviations[i] = effects.entity_intercepts[i] - common;
    }
    return effects;
}

// "a * NAME" / "C" terms joined with sign-aware separators.
void append_term(std::string& text, bool first, double value, const std::string& factor) {
    if (first) {
        text += value < 0.0 ? "-" : "";
        text += format_statistic(std::fabs(value));
    } else {
        text += value < 0.0 ? " - " : " + ";
        text += format_statistic(std::fabs(value));
    }
    if (!factor.empty()) text += " * " + factor;
}

}  // namespace

PanelFit fit_pooled(const PanelDataset& data, const VariableSelection& sel) {
    sel.validate(data);
    StackedData stacked = stack(data, sel, ConstantColumn::None);
    const long n = static_cast<long>(stacked.y.size());
    const long k = static_cast<long>(sel.regressors.size());

    Eigen::MatrixXd design(n, k + 1);
    design.leftCols(k) = stacked.x;
    design.col(k).setOnes();

    const std::vector<long> groups(data.n_entities(), static_cast<long>(data.n_periods()));

    PanelFit out;
    out.model = PanelModel::Pooled;
    out.weighting = PanelWeighting::None;
    out.info = make_info(data, sel);
    out.fit = solve_ols(stacked.y, design, groups);
    return out;
}

PanelFit fit_fixed_effects(const PanelDataset& data, const VariableSelection& sel,
                           PanelWeighting weighting) {
    sel.validate(data);
    PanelParts parts = split_by_entity(data, sel);
    const long nt = parts.n * parts.t;
    const long k_all = parts.n + parts.k;  // reported parameters: slopes + entity intercepts

    WithinFit stage1 = within_engine(parts, Eigen::VectorXd::Ones(parts.n));

    PanelFit out;
    out.model = PanelModel::Fixed;
    out.weighting = weighting;
    out.info = make_info(data, sel);

    if (weighting == PanelWeighting::None) {
        out.fit = assemble_within_table(parts, stage1);
        out.fit.stats = compute_fit_statistics(parts.y, out.fit.fitted, out.fit.residuals, nt,
                                               k_all, parts.groups);
        out.effects = make_effects(data, stage1.common, stage1.alpha);
        return out;
    }

    // One-step cross-section weighting: per-entity residual scale from the
    // unweighted fit (divisor T, not T-1: these are one-step GLS weight
    // estimates, not unbiased variances), then a single reweighted pass.
    // An entity whose first-stage residuals vanish (to rounding) has no
    // estimable scale and would get an unbounded weight.
    const double overall_scale =
        std::sqrt(stage1.residuals.squaredNorm() / static_cast<double>(nt));
    Eigen::VectorXd weight(parts.n);
    for (long i = 0; i < parts.n; ++i) {
        const double sigma_i = std::sqrt(
            stage1.residuals.segment(i * parts.t, parts.t).squaredNorm() /
            static_cast<double>(parts.t));
        if (!(sigma_i > 1e-10 * overall_scale)) {
            fail(ErrorCode::DegenerateEntityVariance,
                 "entity '" + data.entities()[static_cast<std::size_t>(i)] +
                     "' has zero first-stage residual variance; cross-section weights undefined");
        }
        weight(i) = 1.0 / sigma_i;
    }

    WithinFit stage2 = within_engine(parts, weight);
    out.fit = assemble_within_table(parts, stage2);
    out.effects = make_effects(data, stage2.common, stage2.alpha);

    // Weighted statistics describe the rescaled regression; the unweighted
    // block re-evaluates the final coefficients on the original scale.
    Eigen::VectorXd y_w(nt), e_w(nt);
    for (long i = 0; i < parts.n; ++i) {
        y_w.segment(i * parts.t, parts.t) = weight(i) * parts.y.segment(i * parts.t, parts.t);
        e_w.segment(i * parts.t, parts.t) =
            weight(i) * stage2.residuals.segment(i * parts.t, parts.t);
    }
    const Eigen::VectorXd fitted_w = y_w - e_w;
    out.weighted_stats = compute_fit_statistics(y_w, fitted_w, e_w, nt, k_all, parts.groups);
    out.unweighted_stats = compute_fit_statistics(parts.y, out.fit.fitted, out.fit.residuals,
                                                  nt, k_all, parts.groups);
    out.fit.stats = *out.weighted_stats;
    return out;
}

PanelFit fit_random_effects(const PanelDataset& data, const VariableSelection& sel) {
    sel.validate(data);
    PanelParts parts = split_by_entity(data, sel);

    // Idiosyncratic variance from the within regression.
    const long df_within = parts.n * (parts.t - 1) - parts.k;
    if (df_within <= 0) {
        fail(ErrorCode::TooFewObservations,
             "within regression needs N*(T-1) > slope count for the idiosyncratic variance");
    }
    OlsCore within = ols_core(parts.y_dem, parts.x_dem);
    const double sigma_e2 = within.ssr / static_cast<double>(df_within);

    // Entity variance from the between regression of entity means.
    if (parts.n <= parts.k + 1) {
        fail(ErrorCode::NotEnoughEntities,
             "between regression needs more entities than slopes plus the constant");
    }
    Eigen::MatrixXd between_design(parts.n, parts.k + 1);
    between_design.leftCols(parts.k) = parts.x_mean;
    between_design.col(parts.k).setOnes();
    OlsCore between = ols_core(parts.y_mean, between_design);
    const double sigma_1sq = between.ssr / static_cast<double>(parts.n - parts.k - 1);

    PanelFit out;
    out.model = PanelModel::Random;
    out.weighting = PanelWeighting::None;
    out.info = make_info(data, sel);

    double sigma_u2 = sigma_1sq - sigma_e2 / static_cast<double>(parts.t);
    bool truncated = false;
    if (sigma_u2 < 0.0) {
        sigma_u2 = 0.0;
        truncated = true;
        out.warnings.push_back(
            "cross-section variance component estimate was negative and has been truncated "
            "to zero");
    }

    const double denom = static_cast<double>(parts.t) * sigma_u2 + sigma_e2;
    const double theta = denom > 0.0 ? 1.0 - std::sqrt(sigma_e2 / denom) : 0.0;

    VarianceComponents components;
    components.sigma_e = std::sqrt(sigma_e2);
    components.sigma_u = std::sqrt(sigma_u2);
    const double total = sigma_u2 + sigma_e2;
    components.rho_u = total > 0.0 ? sigma_u2 / total : 0.0;
    components.rho_e = total > 0.0 ? sigma_e2 / total : 1.0;
    components.theta = theta;
    components.truncated = truncated;

    GlsOutcome gls = random_gls(parts, theta);
    out.fit = std::move(gls.fit);
    out.weighted_stats = gls.weighted;
    out.unweighted_stats = gls.unweighted;
    out.fit.stats = *out.weighted_stats;
    out.effects = make_effects(data, out.fit.coefficients(parts.k), gls.alpha);
    out.components = components;
    for (auto& w : gls.warnings) out.warnings.push_back(std::move(w));
    return out;
}

PanelFit fit_random_effects_with_theta(const PanelDataset& data, const VariableSelection& sel,
                                       double theta) {
    sel.validate(data);
    if (!(theta >= 0.0 && theta <= 1.0)) {
        fail(ErrorCode::BadSelection, "theta must lie in [0, 1]");
    }
    PanelParts parts = split_by_entity(data, sel);

    PanelFit out;
    out.model = PanelModel::Random;
    out.weighting = PanelWeighting::None;
    out.info = make_info(data, sel);

    GlsOutcome gls = random_gls(parts, theta);
    out.fit = std::move(gls.fit);
    out.weighted_stats = gls.weighted;
    out.unweighted_stats = gls.unweighted;
    out.fit.stats = *out.weighted_stats;
    out.effects = make_effects(data, out.fit.coefficients(parts.k), gls.alpha);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    VarianceComponents components;
    components.sigma_e = nan;
    components.sigma_u = nan;
    components.rho_u = nan;
    components.rho_e = nan;
    components.theta = theta;
    out.components = components;
    out.warnings.push_back("variance components not estimated: theta supplied directly");
    for (auto& w : gls.warnings) out.warnings.push_back(std::move(w));
    return out;
}

double RegionalEquation::predict(const Eigen::VectorXd& x) const {
    if (x.size() != slopes.size()) {
        fail(ErrorCode::BadSelection, "prediction input length does not match regressor count");
    }
    return intercept + slopes.dot(x);
}

std::vector<RegionalEquation> extract_regional_equations(const PanelFit& panel_fit) {
    if (panel_fit.model != PanelModel::Fixed || !panel_fit.effects) {
        fail(ErrorCode::WrongModel,
             "per-entity equations require a fixed-effects fit (shared slopes, free "
             "intercepts)");
    }
    const auto& effects = *panel_fit.effects;
    const long k = static_cast<long>(panel_fit.info.regressors.size());
    const Eigen::VectorXd slopes = panel_fit.fit.coefficients.head(k);

    std::vector<RegionalEquation> out;
    out.reserve(effects.entities.size());
    for (std::size_t i = 0; i < effects.entities.size(); ++i) {
        RegionalEquation eq;
        eq.entity = effects.entities[i];
        eq.dependent = panel_fit.info.dependent;
        eq.regressors = panel_fit.info.regressors;
        eq.intercept = effects.entity_intercepts[i];
        eq.slopes = slopes;
        out.push_back(std::move(eq));
    }
    return out;
}

std::string equation_text(const PanelFit& panel_fit) {
    const auto& info = panel_fit.info;
    const long k = static_cast<long>(info.regressors.size());
    std::string text = info.dependent + " = ";
    for (long j = 0; j < k; ++j) {
        append_term(text, j == 0, panel_fit.fit.coefficients(j),
                    info.regressors[static_cast<std::size_t>(j)]);
    }
    append_term(text, false, panel_fit.fit.coefficients(k), "");
    return text;
}

std::string equation_text(const RegionalEquation& eq) {
    std::string text = eq.dependent + " (" + eq.entity + ") = ";
    append_term(text, true, eq.intercept, "");
    for (Eigen::Index j = 0; j < eq.slopes.size(); ++j) {
        append_term(text, false, eq.slopes(j), eq.regressors[static_cast<std::size_t>(j)]);
    }
    return text;
}

}  // namespace panelkit
