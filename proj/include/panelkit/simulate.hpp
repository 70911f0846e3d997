#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "panelkit/dataset.hpp"

namespace panelkit {

/// Distribution of one generated regressor.
struct RegressorLaw {
    enum class Kind { Uniform, Gaussian };
    Kind kind = Kind::Uniform;
    double a = 0.0;  // lower bound / mean
    double b = 1.0;  // upper bound / standard deviation

    static RegressorLaw uniform(double lo, double hi) {
        return {Kind::Uniform, lo, hi};
    }
    static RegressorLaw gaussian(double mean, double sd) {
        return {Kind::Gaussian, mean, sd};
    }
};

/// y_it = intercept + x_it' beta + u_i + scale_i * e_it with
/// u_i ~ N(0, sigma_u^2) and e_it ~ N(0, sigma_e^2).
struct PanelDGP {
    long n_entities = 0;
    long n_periods = 0;
    Eigen::VectorXd beta;
    double intercept = 0.0;
    double sigma_u = 0.0;
    double sigma_e = 0.0;
    std::vector<double> per_entity_scale;    // empty = homoskedastic (all 1)
    std::vector<RegressorLaw> regressor_laws;  // one per slope
    std::uint64_t seed = 0;
};

/// Everything the generator drew, for oracle comparisons.
struct SimulationTruth {
    Eigen::VectorXd beta;
    double intercept = 0.0;
    double sigma_u = 0.0;
    double sigma_e = 0.0;
    Eigen::VectorXd entity_effects;   // the realized u_i
    std::vector<double> scales;       // effective per-entity residual scale
    std::uint64_t seed = 0;
};

struct SimulatedPanel {
    PanelDataset data;  // variables Y, X1..Xk; entities E1..EN; periods 1..T
    SimulationTruth truth;
};

/// Deterministic for a fixed seed across platforms; the generator algorithm
/// and draw order are documented in the README so golden files stay pinned.
SimulatedPanel generate(const PanelDGP& dgp);

}  // namespace panelkit
