#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rshock/gibbs.hpp"
#include "rshock/panel.hpp"

namespace rshock {

struct EstimationSettings {
    MixturePriors mixture;
    FactorPriors factor;
    SignRestriction restriction;
    ChainConfig chain;
    int threads = 1;  // worker cap for the horizon map
};

// One estimated horizon: draws plus the scale and the events that were
// still inside the sample at this horizon.
struct HorizonResult {
    int horizon = 0;
    Draws draws;
    ScaleMatrix scale;
    std::vector<Eigen::Index> event_ids;    // into EventCalendar entries
    std::vector<Eigen::Index> origin;       // base-panel row per chain row
};

// Differences, rescales and runs one chain per horizon h = 0..H. Chains
// use independent streams of settings.chain.seed, so results are
// identical whether horizons run serially or in parallel.
std::vector<HorizonResult> estimate_all(const Panel& panel, const EventCalendar& events,
                                        int max_horizon, const EstimationSettings& settings);

// Per-draw commonality shares (retained x M).
Eigen::MatrixXd commonality_draws(const Draws& draws, const ScaleMatrix& scale);

// Posterior median commonality per series.
Eigen::VectorXd compute_commonalities(const Draws& draws, const ScaleMatrix& scale);

// Impulse responses with the shock normalized per draw so the mean
// response of the target columns at the reference horizon equals
// direction * ref_magnitude.
struct IrfResult {
    std::vector<int> horizons;
    std::vector<double> levels;
    std::vector<Eigen::MatrixXd> irf;             // per horizon: levels x M, scaled loadings
    std::vector<Eigen::VectorXd> commonality;     // per horizon: M medians (unscaled draws)
    std::vector<Eigen::MatrixXd> factor_quantiles;  // per horizon: levels x events-present
    std::vector<std::vector<Eigen::Index>> factor_event_ids;  // per horizon
    Eigen::VectorXd scale_factors;                // per retained draw
    int ref_horizon = 10;
    double ref_magnitude = 1.0;
    int dropped_draws = 0;
    bool scaled_factors = false;
};

// Standard deviation of the target-column average of the level panel:
// the default reference magnitude for the normalization.
double default_ref_magnitude(const Panel& panel, const std::vector<Eigen::Index>& target_columns);

IrfResult normalize_shock(const std::vector<HorizonResult>& results,
                          const SignRestriction& restriction, int ref_horizon,
                          double ref_magnitude, bool scaled_factors = false,
                          const std::vector<double>& levels = default_levels());

// Per (event, horizon) quantiles of the factor draws. When
// `scale_factors` is non-null, factors are divided by the per-draw scale
// (shock units); otherwise raw.
std::vector<Eigen::MatrixXd> factor_at_events(const std::vector<HorizonResult>& results,
                                              const std::vector<double>& levels,
                                              const Eigen::VectorXd* scale_factors = nullptr);

// Resolves a glob pattern (`*`, `?`) against panel labels. Throws
// ValidationError when nothing matches.
std::vector<Eigen::Index> match_columns(const std::vector<std::string>& labels,
                                        const std::string& pattern);

}  // namespace rshock
