#include "rshock/factor.hpp"

#include "rshock/common.hpp"

namespace rshock {

FactorState init_factor(const ChainData& data) {
    FactorState state;
    state.loadings = Eigen::VectorXd::Zero(data.series());
    state.factors = Eigen::VectorXd::Zero(data.n_events());
    return state;
}

void sample_loadings(FactorState& state, const ChainData& data, double min_var,
                     const FactorPriors& priors, Rng& rng) {
    if (!(min_var > 0.0)) throw ChainError("loadings: nonpositive minimum-regime variance");
    const Eigen::Index n = data.n_events();
    const double fsq = state.factors.squaredNorm();
    for (Eigen::Index i = 0; i < data.series(); ++i) {
        const double noise_var = min_var * data.col_var[i];
        double cross = 0.0;
        for (Eigen::Index e = 0; e < n; ++e) {
            cross += data.values(data.event_rows[static_cast<std::size_t>(e)], i) *
                     state.factors[e];
        }
        const double post_var = 1.0 / (fsq / noise_var + 1.0 / priors.tau);
        const double post_mean = post_var * cross / noise_var;
        state.loadings[i] = rng.normal(post_mean, post_var);
    }
}

void sample_factors(FactorState& state, const ChainData& data, double min_var, Rng& rng) {
    if (!(min_var > 0.0)) throw ChainError("factors: nonpositive minimum-regime variance");
    // posterior variance is shared by every ruling day
    const double precision =
        (state.loadings.array().square() / data.col_var.array()).sum() / min_var;
    const double post_var = 1.0 / (precision + 1.0);
    const Eigen::VectorXd weighted =
        state.loadings.cwiseQuotient(data.col_var) / min_var;
    for (Eigen::Index e = 0; e < data.n_events(); ++e) {
        const double cross = data.values.row(data.event_rows[static_cast<std::size_t>(e)])
                                 .dot(weighted.transpose());
        state.factors[e] = rng.normal(post_var * cross, post_var);
    }
}

double sign_functional(const FactorState& state, const SignRestriction& restriction) {
    if (restriction.target_columns.empty()) {
        throw ValidationError("sign restriction: no target columns");
    }
    double sum = 0.0;
    for (Eigen::Index c : restriction.target_columns) {
        sum += state.loadings[c];
    }
    return sum / static_cast<double>(restriction.target_columns.size());
}

bool enforce_sign(FactorState& state, const SignRestriction& restriction) {
    const double functional = sign_functional(state, restriction);
    const bool violated =
        restriction.direction < 0 ? functional > 0.0 : functional < 0.0;
    if (violated) {
        state.loadings = -state.loadings;
        state.factors = -state.factors;
    }
    return violated;
}

Eigen::VectorXd commonality(const Eigen::Ref<const Eigen::VectorXd>& loadings,
                            double min_var, const Eigen::Ref<const Eigen::VectorXd>& col_var) {
    const Eigen::ArrayXd lsq = loadings.array().square();
    return (lsq / (lsq + min_var * col_var.array())).matrix();
}

}  // namespace rshock
