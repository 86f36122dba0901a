#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "rshock/chain_data.hpp"
#include "rshock/factor.hpp"
#include "rshock/mixture.hpp"

namespace rshock {

enum class Mode { Mixture, Naive };

struct ChainConfig {
    int burnin = 2000;
    int draws = 3000;
    int thin = 3;
    std::uint64_t seed = 1;
    Mode mode = Mode::Mixture;
    VarianceUpdate variant = VarianceUpdate::Coherent;
    IntensityStatistic mh_statistic = IntensityStatistic::AllocationProbs;
    double init_prop_scale = 0.1;
    bool keep_variance_path = false;  // store per-day variance draws (memory-heavy)

    int retained() const { return draws / thin; }
};

// Retained posterior draws of one chain.
struct Draws {
    Eigen::MatrixXd loadings;        // retained x M
    Eigen::MatrixXd factors;         // retained x n_events
    Eigen::VectorXd min_var;         // retained; minimum-component variance
    Eigen::VectorXi nonempty_count;  // retained
    Eigen::VectorXd nonevent_prob;   // per row: inclusion frequency in component 0
    Eigen::VectorXd intensity;       // retained
    double accept_rate = 0.0;
    long numerical_rejects = 0;
    Eigen::MatrixXd variance_path;   // retained x rows when requested, else 0x0

    Eigen::Index retained() const { return loadings.rows(); }
};

// Runs the six-step cycle (component variances, allocations, weights +
// relabeling, intensity, loadings, factors + sign check), discards
// burn-in, keeps every thin-th draw. Deterministic given config.seed.
// Naive mode runs the same cycle with a single component, so the common
// variance is estimated from all non-ruling days. Throws ChainError on an
// empty non-event set or a non-finite draw at a retained iteration.
Draws run_chain(const ChainData& data, const MixturePriors& mpriors,
                const FactorPriors& fpriors, const SignRestriction& restriction,
                const ChainConfig& config);

const std::vector<double>& default_levels();

// Per-column quantiles of retained draws at the requested levels
// (defaults: 0.05, 0.16, 0.50, 0.84, 0.95).
Eigen::MatrixXd summarize(const Eigen::Ref<const Eigen::MatrixXd>& draws,
                          const std::vector<double>& probs = default_levels());

}  // namespace rshock
