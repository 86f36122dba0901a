#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rshock/chain_data.hpp"
#include "rshock/factor.hpp"
#include "rshock/rng.hpp"

namespace rshock {

struct MixturePriors {
    double a0 = 0.1;       // inverse-gamma shape on component variances
    double b0 = 0.1;       // inverse-gamma rate on component variances
    double d = 10.0;       // gamma prior on the weight intensity: G(d, d*J)
    int components = 30;   // J, the a-priori maximum number of components
};

// Which inverse-gamma update to use for the component variances. The
// `Coherent` form carries the scaling matrix through the quadratic form
// and counts all M series per day; `Verbatim` drops both.
enum class VarianceUpdate { Coherent, Verbatim };

// Statistic entering the intensity MH ratio: the allocation-probability
// sum, or the Dirichlet weight sum behind a flag.
enum class IntensityStatistic { AllocationProbs, DirichletWeights };

// Mutable state of the common-volatility mixture for one chain. Not
// shared across threads; parallel chains each own one.
struct MixtureState {
    Eigen::VectorXd component_var;  // J, ascending after each relabeling
    Eigen::VectorXd weights;        // J, simplex
    std::vector<int> alloc;         // per row, 0-based; ruling rows forced to 0
    double intensity = 0.0;         // Dirichlet concentration c0
    double prop_scale = 0.1;        // MH log-normal proposal variance

    // Metropolis-Hastings bookkeeping.
    long accepted = 0;
    long attempted = 0;
    int window_accepted = 0;
    int window_attempted = 0;
    long numerical_rejects = 0;

    int components() const { return static_cast<int>(component_var.size()); }
};

// Allocation by quantile-binning of the per-day average squared
// standardized observation; component variances from bin means, uniform
// weights, intensity at its prior mean.
MixtureState init_mixture(const ChainData& data, const MixturePriors& priors, int components);

// Draws every component variance from its inverse-gamma conditional.
// Ruling rows contribute to component 0 net of the factor term.
void sample_component_variances(MixtureState& state, const ChainData& data,
                                const FactorState& factor, const MixturePriors& priors,
                                VarianceUpdate variant, Rng& rng);

// Reallocates every non-ruling day across components, in log space with
// max-subtraction. Ruling rows stay in component 0.
void sample_allocations(MixtureState& state, const ChainData& data, Rng& rng);

// Occupancy counts over non-ruling rows only.
Eigen::VectorXi occupancy(const MixtureState& state, const ChainData& data);

void sample_weights(MixtureState& state, const ChainData& data, Rng& rng);

// Log acceptance ratio of the intensity random-walk move, term by term:
// statistic, gamma-function, prior and proposal-asymmetry parts.
double intensity_log_accept(double current, double proposal, double statistic,
                            int components, double d);

// Value of the statistic under the configured convention.
double intensity_statistic(const MixtureState& state, const ChainData& data,
                           IntensityStatistic kind);

// One log-normal random-walk MH move on the intensity. Returns whether
// the proposal was accepted. Non-finite intermediate values reject the
// proposal and bump `numerical_rejects`.
bool sample_intensity(MixtureState& state, const ChainData& data, const MixturePriors& priors,
                      IntensityStatistic kind, Rng& rng);

// Proposal-scale adaptation: every 50 attempts, scale by 1.1 (rate > 0.4)
// or 0.9 (rate < 0.2). Frozen once burn-in is half done.
void adapt_proposal(MixtureState& state, double burnin_progress);

// Relabels components by ascending variance (stable on ties), remaps
// weights and allocations, and re-asserts ruling rows in component 0.
void permute_ascending(MixtureState& state, const ChainData& data);

// Non-ruling rows currently in the minimum-variance component. Throws
// ValidationError when empty.
std::vector<Eigen::Index> nonevent_set(const MixtureState& state, const ChainData& data);

// Number of components with at least one non-ruling day.
int count_nonempty(const MixtureState& state, const ChainData& data);

// Joint log density of (allocations, weights, component variances) under
// the mixture; used to verify relabeling invariance.
double mixture_log_density(const MixtureState& state, const ChainData& data);

}  // namespace rshock
