#pragma once

#include <Eigen/Dense>
#include <vector>

#include "rshock/chain_data.hpp"
#include "rshock/rng.hpp"

namespace rshock {

struct FactorPriors {
    double tau = 1.0;  // prior variance of each loading
};

// Loadings and per-ruling-day factors of one chain. `factors` is aligned
// with ChainData::event_rows.
struct FactorState {
    Eigen::VectorXd loadings;  // M
    Eigen::VectorXd factors;   // one per ruling row
};

// Normalization convention: the mean loading over `target_columns` must
// carry `direction`'s sign (<= 0 for -1, >= 0 for +1).
struct SignRestriction {
    std::vector<Eigen::Index> target_columns;
    int direction = -1;
};

FactorState init_factor(const ChainData& data);

// Independent Gaussian conditionals per series, estimated from ruling
// rows only; with no ruling rows this reduces to the prior N(0, tau).
void sample_loadings(FactorState& state, const ChainData& data, double min_var,
                     const FactorPriors& priors, Rng& rng);

// Gaussian conditional per ruling day; the posterior variance is common
// to all ruling days.
void sample_factors(FactorState& state, const ChainData& data, double min_var, Rng& rng);

// Mean loading over the restriction's target columns.
double sign_functional(const FactorState& state, const SignRestriction& restriction);

// Negates loadings and factors together when the restriction is violated;
// the products loading*factor are unchanged. Returns whether it flipped.
bool enforce_sign(FactorState& state, const SignRestriction& restriction);

// Share of ruling-day variance explained per series given the
// minimum-regime variance: l^2 / (l^2 + min_var * col_var).
Eigen::VectorXd commonality(const Eigen::Ref<const Eigen::VectorXd>& loadings,
                            double min_var, const Eigen::Ref<const Eigen::VectorXd>& col_var);

}  // namespace rshock
