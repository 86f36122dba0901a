#include "rshock/gibbs.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "rshock/common.hpp"
#include "rshock/stats.hpp"

namespace rshock {

namespace {

void validate_config(const ChainConfig& config) {
    if (config.burnin < 1 || config.draws < 1) {
        throw ValidationError("chain: burnin and draws must be at least 1");
    }
    if (config.thin < 1) throw ValidationError("chain: thin must be at least 1");
    if (config.retained() < 1) throw ValidationError("chain: thinning retains no draws");
}

}  // namespace

Draws run_chain(const ChainData& data, const MixturePriors& mpriors,
                const FactorPriors& fpriors, const SignRestriction& restriction,
                const ChainConfig& config) {
    validate_config(config);
    if (data.rows() < 2) throw ValidationError("chain: need at least 2 rows");
    for (Eigen::Index c : restriction.target_columns) {
        if (c < 0 || c >= data.series()) {
            throw ValidationError("chain: sign-restriction column out of range");
        }
    }

    const int components = config.mode == Mode::Naive ? 1 : mpriors.components;
    Rng rng(config.seed);
    MixtureState mixture = init_mixture(data, mpriors, components);
    mixture.prop_scale = config.init_prop_scale;
    FactorState factor = init_factor(data);

    const int retained = config.retained();
    Draws out;
    out.loadings.resize(retained, data.series());
    out.factors.resize(retained, data.n_events());
    out.min_var.resize(retained);
    out.nonempty_count.resize(retained);
    out.intensity.resize(retained);
    out.nonevent_prob = Eigen::VectorXd::Zero(data.rows());
    if (config.keep_variance_path) {
        out.variance_path.resize(retained, data.rows());
    }

    const int total = config.burnin + config.draws;
    int kept = 0;
    for (int iter = 0; iter < total; ++iter) {
        int step = 0;
        const auto trace = [&step](int expected) {
            if (++step != expected) throw std::logic_error("chain: step order broken");
        };

        trace(1);
        sample_component_variances(mixture, data, factor, mpriors, config.variant, rng);
        trace(2);
        sample_allocations(mixture, data, rng);
        trace(3);
        sample_weights(mixture, data, rng);
        permute_ascending(mixture, data);
        trace(4);
        sample_intensity(mixture, data, mpriors, config.mh_statistic, rng);
        adapt_proposal(mixture, static_cast<double>(iter + 1) / config.burnin);
        trace(5);
        sample_loadings(factor, data, mixture.component_var[0], fpriors, rng);
        trace(6);
        sample_factors(factor, data, mixture.component_var[0], rng);
        enforce_sign(factor, restriction);
        if (step != 6) throw std::logic_error("chain: incomplete iteration");

        const int post = iter - config.burnin;
        if (post < 0 || post % config.thin != config.thin - 1 || kept >= retained) continue;

        try {
            nonevent_set(mixture, data);
        } catch (const ValidationError&) {
            throw ChainError("chain: empty non-event set at retained iteration " +
                             std::to_string(iter));
        }
        const bool finite = factor.loadings.allFinite() && factor.factors.allFinite() &&
                            std::isfinite(mixture.component_var[0]) &&
                            std::isfinite(mixture.intensity);
        if (!finite) {
            throw ChainError("chain: non-finite draw at iteration " + std::to_string(iter));
        }

        out.loadings.row(kept) = factor.loadings.transpose();
        out.factors.row(kept) = factor.factors.transpose();
        out.min_var[kept] = mixture.component_var[0];
        out.nonempty_count[kept] = count_nonempty(mixture, data);
        out.intensity[kept] = mixture.intensity;
        for (Eigen::Index t = 0; t < data.rows(); ++t) {
            if (mixture.alloc[static_cast<std::size_t>(t)] == 0) out.nonevent_prob[t] += 1.0;
            if (config.keep_variance_path) {
                out.variance_path(kept, t) =
                    mixture.component_var[mixture.alloc[static_cast<std::size_t>(t)]];
            }
        }
        ++kept;
    }
    if (kept != retained) throw ChainError("chain: retained " + std::to_string(kept) +
                                           " draws, expected " + std::to_string(retained));

    out.nonevent_prob /= static_cast<double>(retained);
    out.accept_rate = mixture.attempted > 0
                          ? static_cast<double>(mixture.accepted) /
                                static_cast<double>(mixture.attempted)
                          : 0.0;
    out.numerical_rejects = mixture.numerical_rejects;
    return out;
}

const std::vector<double>& default_levels() {
    static const std::vector<double> levels{0.05, 0.16, 0.50, 0.84, 0.95};
    return levels;
}

Eigen::MatrixXd summarize(const Eigen::Ref<const Eigen::MatrixXd>& draws,
                          const std::vector<double>& probs) {
    return column_quantiles(draws, probs);
}

}  // namespace rshock
