#include "panelkit/simulate.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <utility>

#include "panelkit/errors.hpp"

namespace panelkit {

namespace {

// Portable draws on top of the raw 64-bit stream: the mapping from words to
// variates is pinned here (and described in the README) so that a given seed
// yields the same panel on every platform. std::mt19937_64's output sequence
// is fully specified by the standard; the library distributions are not,
// which is why uniform and normal variates are derived by hand.
class PortableRng {
public:
    explicit PortableRng(std::uint64_t seed) : engine_(seed) {}

    // [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    // Box-Muller, cosine branch only: every normal consumes exactly two
    // words, keeping the draw count independent of past calls.
    double normal() {
        const double u1 = 1.0 - uniform01();  // (0, 1], keeps the log finite
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

private:
    std::mt19937_64 engine_;
};

void validate(const PanelDGP& dgp) {
    if (dgp.n_entities < 2 || dgp.n_periods < 2) {
        fail(ErrorCode::InvalidDgp, "panel needs at least 2 entities and 2 periods");
    }
    if (dgp.beta.size() < 1) fail(ErrorCode::InvalidDgp, "at least one slope is required");
    if (!(dgp.sigma_u >= 0.0) || !(dgp.sigma_e >= 0.0)) {
        fail(ErrorCode::InvalidDgp, "standard deviations must be nonnegative");
    }
    if (static_cast<Eigen::Index>(dgp.regressor_laws.size()) != dgp.beta.size()) {
        fail(ErrorCode::InvalidDgp, "one regressor law per slope is required");
    }
    for (const auto& law : dgp.regressor_laws) {
        if (law.kind == RegressorLaw::Kind::Uniform && !(law.a < law.b)) {
            fail(ErrorCode::InvalidDgp, "uniform law needs lower < upper");
        }
        if (law.kind == RegressorLaw::Kind::Gaussian && !(law.b >= 0.0)) {
            fail(ErrorCode::InvalidDgp, "gaussian law needs a nonnegative sd");
        }
    }
    if (!dgp.per_entity_scale.empty()) {
        if (static_cast<long>(dgp.per_entity_scale.size()) != dgp.n_entities) {
            fail(ErrorCode::InvalidDgp, "per-entity scale list must have one entry per entity");
        }
        for (double s : dgp.per_entity_scale) {
            if (!(s > 0.0)) fail(ErrorCode::InvalidDgp, "per-entity scales must be positive");
        }
    }
}

}  // namespace

SimulatedPanel generate(const PanelDGP& dgp) {
    validate(dgp);
    const long n = dgp.n_entities;
    const long t = dgp.n_periods;
    const long k = static_cast<long>(dgp.beta.size());

    PortableRng rng(dgp.seed);

    SimulationTruth truth;
    truth.beta = dgp.beta;
    truth.intercept = dgp.intercept;
    truth.sigma_u = dgp.sigma_u;
    truth.sigma_e = dgp.sigma_e;
    truth.seed = dgp.seed;
    truth.scales = dgp.per_entity_scale.empty()
                       ? std::vector<double>(static_cast<std::size_t>(n), 1.0)
                       : dgp.per_entity_scale;

    // Draw order (pinned): all entity effects first, then per observation —
    // entity-major, time-ascending — the k regressors followed by the noise.
    truth.entity_effects.resize(n);
    for (long i = 0; i < n; ++i) truth.entity_effects(i) = dgp.sigma_u * rng.normal();

    Eigen::MatrixXd y(n, t);
    std::vector<Eigen::MatrixXd> x(static_cast<std::size_t>(k), Eigen::MatrixXd(n, t));
    for (long i = 0; i < n; ++i) {
        for (long s = 0; s < t; ++s) {
            double mean = dgp.intercept + truth.entity_effects(i);
            for (long j = 0; j < k; ++j) {
                const auto& law = dgp.regressor_laws[static_cast<std::size_t>(j)];
                const double value = law.kind == RegressorLaw::Kind::Uniform
                                         ? rng.uniform(law.a, law.b)
                                         : law.a + law.b * rng.normal();
                x[static_cast<std::size_t>(j)](i, s) = value;
                mean += dgp.beta(j) * value;
            }
            const double noise =
                truth.scales[static_cast<std::size_t>(i)] * dgp.sigma_e * rng.normal();
            y(i, s) = mean + noise;
        }
    }

    std::vector<std::string> entities;
    entities.reserve(static_cast<std::size_t>(n));
    for (long i = 1; i <= n; ++i) entities.push_back("E" + std::to_string(i));
    std::vector<std::string> periods;
    periods.reserve(static_cast<std::size_t>(t));
    for (long s = 1; s <= t; ++s) periods.push_back(std::to_string(s));

    std::vector<std::pair<std::string, Eigen::MatrixXd>> variables;
    variables.emplace_back("Y", std::move(y));
    for (long j = 0; j < k; ++j) {
        variables.emplace_back("X" + std::to_string(j + 1),
                               std::move(x[static_cast<std::size_t>(j)]));
    }

    return SimulatedPanel{PanelDataset(std::move(entities), std::move(periods),
                                       std::move(variables)),
                          std::move(truth)};
}

}  // namespace panelkit
