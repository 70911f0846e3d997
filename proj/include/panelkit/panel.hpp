#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "panelkit/dataset.hpp"
#include "panelkit/linreg.hpp"

namespace panelkit {

enum class PanelModel { Pooled, Fixed, Random };
enum class PanelWeighting { None, CrossSection };

/// Common intercept plus per-entity intercepts for models with entity
/// effects. entity_intercepts average to common_intercept and deviations sum
/// to zero; for random effects the deviations are shrinkage predictions of
/// the entity draws rather than free parameters.
struct EffectsDecomposition {
    double common_intercept = 0.0;
    std::vector<std::string> entities;
    std::vector<double> entity_intercepts;  // common + deviation, one per entity
    std::vector<double> deviations;
};

/// Swamy-Arora components of the composite error u_i + eps_it.
struct VarianceComponents {
    double sigma_e = 0.0;    // idiosyncratic std dev
    double sigma_u = 0.0;    // cross-section (entity) std dev
    double rho_u = 0.0;      // sigma_u^2 / (sigma_u^2 + sigma_e^2)
    double rho_e = 0.0;      // complement
    double theta = 0.0;      // quasi-demeaning factor in [0, 1]
    bool truncated = false;  // negative entity variance estimate clamped to 0
};

/// Shape and naming metadata every report header needs.
struct PanelInfo {
    std::string dependent;
    std::vector<std::string> regressors;  // slope order in the fit
    long n_entities = 0;
    long n_periods = 0;
    long n_obs = 0;
    std::string first_period;
    std::string last_period;
};

/// One estimated panel model. `fit` holds the reported coefficient table
/// (slopes in selection order, common intercept last). residuals/fitted in
/// `fit` are always on the original data scale; when a GLS transform is
/// involved, `fit.stats` describes the transformed regression and the
/// weighted_stats/unweighted_stats pair carries both views.
struct PanelFit {
    PanelModel model = PanelModel::Pooled;
    PanelWeighting weighting = PanelWeighting::None;
    PanelInfo info;
    RegressionFit fit;
    std::optional<EffectsDecomposition> effects;    // fixed/random only
    std::optional<VarianceComponents> components;   // random only
    std::optional<FitStats> weighted_stats;         // transformed-data block
    std::optional<FitStats> unweighted_stats;       // original-scale block
    std::vector<std::string> warnings;
};

/// OLS on the stacked panel, entity structure ignored.
PanelFit fit_pooled(const PanelDataset& data, const VariableSelection& sel);

/// Within (entity-demeaned) estimator; one intercept per entity. With
/// cross-section weighting, a one-step feasible GLS: per-entity residual
/// std devs from the unweighted first stage (divisor T) become inverse
/// weights and the fit is repeated on the rescaled data.
PanelFit fit_fixed_effects(const PanelDataset& data, const VariableSelection& sel,
                           PanelWeighting weighting = PanelWeighting::None);

/// Random-effects GLS with Swamy-Arora variance components: sigma_e^2 from
/// the within regression, sigma_u^2 from the between regression (truncated
/// at zero with a warning), then OLS on quasi-demeaned data v - theta*mean_i.
PanelFit fit_random_effects(const PanelDataset& data, const VariableSelection& sel);

/// The same GLS transform at a caller-chosen theta instead of the estimated
/// one; variance fields other than theta are NaN. Exists so the theta path
/// is testable in isolation (theta=0 is pooled OLS, theta=1 the within fit).
PanelFit fit_random_effects_with_theta(const PanelDataset& data, const VariableSelection& sel,
                                       double theta);

/// Per-entity prediction equation: shared slopes, entity-specific intercept.
struct RegionalEquation {
    std::string entity;
    std::string dependent;
    std::vector<std::string> regressors;
    double intercept = 0.0;
    Eigen::VectorXd slopes;

    /// intercept + slopes . x  (x in regressor order)
    double predict(const Eigen::VectorXd& x) const;
};

/// Splits a fixed-effects fit into one equation per entity. WrongModel for
/// anything but fixed effects, where slopes genuinely are shared parameters.
std::vector<RegionalEquation> extract_regional_equations(const PanelFit& panel_fit);

/// "DEP = a1 * X1 + ... + C" with the constant last, as coefficient tables
/// order it.
std::string equation_text(const PanelFit& panel_fit);

/// "DEP (entity) = C + a1 * X1 + ...", intercept leading.
std::string equation_text(const RegionalEquation& eq);

}  // namespace panelkit
