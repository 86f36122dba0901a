#include "rshock/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "rshock/common.hpp"
#include "rshock/stats.hpp"

namespace rshock {

namespace {

constexpr double kVarFloor = 1e-12;
constexpr double kWeightFloor = 1e-300;
constexpr int kAdaptWindow = 50;

// Position of `row` inside data.event_rows; rows are sorted.
Eigen::Index event_position(const ChainData& data, Eigen::Index row) {
    const auto it = std::lower_bound(data.event_rows.begin(), data.event_rows.end(), row);
    return static_cast<Eigen::Index>(it - data.event_rows.begin());
}

// Log allocation weights (up to a shared constant) of row t across all
// components: log w_j - M/2 log theta_j^2 - q_t / (2 theta_j^2).
Eigen::VectorXd allocation_logits(const MixtureState& state, const ChainData& data,
                                  Eigen::Index t) {
    const double m = static_cast<double>(data.series());
    const int j_count = state.components();
    Eigen::VectorXd logits(j_count);
    for (int j = 0; j < j_count; ++j) {
        const double w = std::max(state.weights[j], kWeightFloor);
        const double var = state.component_var[j];
        logits[j] = std::log(w) - 0.5 * m * std::log(var) - data.qform_scaled[t] / (2.0 * var);
    }
    return logits;
}

}  // namespace

MixtureState init_mixture(const ChainData& data, const MixturePriors& priors, int components) {
    if (components < 1) throw ValidationError("mixture: need at least one component");
    MixtureState state;
    state.weights = Eigen::VectorXd::Constant(components, 1.0 / components);
    state.intensity = 1.0 / components;  // prior mean of c0 ~ G(d, dJ)
    state.prop_scale = 0.1;
    state.alloc.assign(static_cast<std::size_t>(data.rows()), 0);

    // rank non-ruling days by average squared standardized observation
    std::vector<Eigen::Index> order;
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        if (!data.is_event[static_cast<std::size_t>(t)]) order.push_back(t);
    }
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
        return data.qform_scaled[a] < data.qform_scaled[b];
    });

    const double m = static_cast<double>(data.series());
    const double prior_mean_var =
        priors.a0 > 1.0 ? priors.b0 / (priors.a0 - 1.0) : priors.b0 / priors.a0;
    state.component_var = Eigen::VectorXd::Constant(components, prior_mean_var);
    const std::size_t n = order.size();
    double last_var = prior_mean_var;
    for (int j = 0; j < components; ++j) {
        const std::size_t lo = n * static_cast<std::size_t>(j) / static_cast<std::size_t>(components);
        const std::size_t hi =
            n * (static_cast<std::size_t>(j) + 1) / static_cast<std::size_t>(components);
        double sum = 0.0;
        for (std::size_t k = lo; k < hi; ++k) {
            state.alloc[static_cast<std::size_t>(order[k])] = j;
            sum += data.qform_scaled[order[k]] / m;
        }
        if (hi > lo) {
            last_var = std::max(sum / static_cast<double>(hi - lo), kVarFloor);
        }
        state.component_var[j] = last_var;  // empty bin: carry the last mean forward
    }
    permute_ascending(state, data);
    return state;
}

void sample_component_variances(MixtureState& state, const ChainData& data,
                                const FactorState& factor, const MixturePriors& priors,
                                VarianceUpdate variant, Rng& rng) {
    const int j_count = state.components();
    const double m = static_cast<double>(data.series());
    Eigen::VectorXd count = Eigen::VectorXd::Zero(j_count);
    Eigen::VectorXd qsum = Eigen::VectorXd::Zero(j_count);
    const bool coherent = variant == VarianceUpdate::Coherent;

    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        const int j = state.alloc[static_cast<std::size_t>(t)];
        count[j] += 1.0;
        if (data.is_event[static_cast<std::size_t>(t)]) {
            // ruling day: the factor term is subtracted before squaring
            const Eigen::Index e = event_position(data, t);
            const Eigen::VectorXd resid =
                data.values.row(t).transpose() - factor.loadings * factor.factors[e];
            qsum[j] += coherent ? (resid.array().square() / data.col_var.array()).sum()
                                : resid.squaredNorm();
        } else {
            qsum[j] += coherent ? data.qform_scaled[t] : data.qform_raw[t];
        }
    }

    // occupied components take the textbook conjugate draw
    double occupied_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j < j_count; ++j) {
        if (count[j] <= 0.0) continue;
        const double a = priors.a0 + (coherent ? count[j] * m : count[j]) / 2.0;
        const double b = priors.b0 + qsum[j] / 2.0;
        state.component_var[j] = std::max(rng.inverse_gamma(a, b), kVarFloor);
        occupied_min = std::min(occupied_min, state.component_var[j]);
    }
    // empty components redraw from the prior, truncated below the occupied
    // minimum: the heavy lower tail of IG(a0, b0) would otherwise hand the
    // minimum-variance label to a structurally empty component on most
    // sweeps, emptying the non-event set
    const double bound = std::isfinite(occupied_min) ? occupied_min : 0.0;
    for (int j = 0; j < j_count; ++j) {
        if (count[j] > 0.0) continue;
        double draw = 0.0;
        for (int tries = 0; tries < 100000; ++tries) {
            draw = rng.inverse_gamma(priors.a0, priors.b0);
            if (draw > bound) break;
            draw = 0.0;
        }
        state.component_var[j] = std::max(draw > 0.0 ? draw : bound, kVarFloor);
    }
}

void sample_allocations(MixtureState& state, const ChainData& data, Rng& rng) {
    const int j_count = state.components();
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        if (data.is_event[static_cast<std::size_t>(t)]) {
            state.alloc[static_cast<std::size_t>(t)] = 0;
            continue;
        }
        Eigen::VectorXd logits = allocation_logits(state, data, t);
        const double top = logits.maxCoeff();
        Eigen::VectorXd probs = (logits.array() - top).exp();
        probs /= probs.sum();
        const double u = rng.uniform();
        double cum = 0.0;
        int pick = j_count - 1;
        for (int j = 0; j < j_count; ++j) {
            cum += probs[j];
            if (u < cum) {
                pick = j;
                break;
            }
        }
        state.alloc[static_cast<std::size_t>(t)] = pick;
    }
}

Eigen::VectorXi occupancy(const MixtureState& state, const ChainData& data) {
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(state.components());
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        if (!data.is_event[static_cast<std::size_t>(t)]) {
            counts[state.alloc[static_cast<std::size_t>(t)]] += 1;
        }
    }
    return counts;
}

void sample_weights(MixtureState& state, const ChainData& data, Rng& rng) {
    const Eigen::VectorXi counts = occupancy(state, data);
    Eigen::VectorXd concentration(state.components());
    for (int j = 0; j < state.components(); ++j) {
        concentration[j] = state.intensity + static_cast<double>(counts[j]);
    }
    state.weights = rng.dirichlet(concentration);
}

double intensity_log_accept(double current, double proposal, double statistic,
                            int components, double d) {
    const double j = static_cast<double>(components);
    const double dlog = std::log(proposal) - std::log(current);
    double out = (proposal - current) * statistic;
    out += std::lgamma(j * proposal) - std::lgamma(j * current);
    out -= j * (std::lgamma(proposal) - std::lgamma(current));
    out += (d - 1.0) * dlog;          // gamma prior, shape part
    out -= d * j * (proposal - current);  // gamma prior, rate part
    out += dlog;                      // log-normal proposal asymmetry
    return out;
}

double intensity_statistic(const MixtureState& state, const ChainData& data,
                           IntensityStatistic kind) {
    if (kind == IntensityStatistic::DirichletWeights) {
        double sum = 0.0;
        for (int j = 0; j < state.components(); ++j) {
            sum += std::log(std::max(state.weights[j], kWeightFloor));
        }
        return sum;
    }
    // sum of log allocation probabilities over components and non-ruling days
    double sum = 0.0;
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        if (data.is_event[static_cast<std::size_t>(t)]) continue;
        const Eigen::VectorXd logits = allocation_logits(state, data, t);
        const double lse = log_sum_exp(logits);
        sum += logits.sum() - static_cast<double>(state.components()) * lse;
    }
    return sum;
}

bool sample_intensity(MixtureState& state, const ChainData& data, const MixturePriors& priors,
                      IntensityStatistic kind, Rng& rng) {
    state.attempted += 1;
    state.window_attempted += 1;
    const double statistic = intensity_statistic(state, data, kind);
    const double proposal =
        std::exp(std::log(state.intensity) + std::sqrt(state.prop_scale) * rng.normal());
    bool accept = false;
    if (proposal > 0.0 && std::isfinite(proposal)) {
        const double log_zeta = intensity_log_accept(state.intensity, proposal, statistic,
                                                     state.components(), priors.d);
        if (!std::isfinite(log_zeta)) {
            state.numerical_rejects += 1;
        } else if (log_zeta >= 0.0 || std::log(rng.uniform_pos()) < log_zeta) {
            accept = true;
        }
    } else {
        state.numerical_rejects += 1;
    }
    if (accept) {
        state.intensity = proposal;
        state.accepted += 1;
        state.window_accepted += 1;
    }
    return accept;
}

void adapt_proposal(MixtureState& state, double burnin_progress) {
    if (burnin_progress >= 0.5) return;  // frozen for the rest of the run
    if (state.window_attempted < kAdaptWindow) return;
    const double rate =
        static_cast<double>(state.window_accepted) / static_cast<double>(state.window_attempted);
    if (rate > 0.40) {
        state.prop_scale *= 1.1;
    } else if (rate < 0.20) {
        state.prop_scale *= 0.9;
    }
    state.window_accepted = 0;
    state.window_attempted = 0;
}

void permute_ascending(MixtureState& state, const ChainData& data) {
    const int j_count = state.components();
    std::vector<int> order(static_cast<std::size_t>(j_count));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return state.component_var[a] < state.component_var[b];
    });
    std::vector<int> rank(static_cast<std::size_t>(j_count));
    for (int pos = 0; pos < j_count; ++pos) {
        rank[static_cast<std::size_t>(order[static_cast<std::size_t>(pos)])] = pos;
    }
    Eigen::VectorXd var(j_count), weights(j_count);
    for (int pos = 0; pos < j_count; ++pos) {
        var[pos] = state.component_var[order[static_cast<std::size_t>(pos)]];
        weights[pos] = state.weights[order[static_cast<std::size_t>(pos)]];
    }
    state.component_var = std::move(var);
    state.weights = std::move(weights);
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        auto& label = state.alloc[static_cast<std::size_t>(t)];
        label = data.is_event[static_cast<std::size_t>(t)] ? 0
                                                           : rank[static_cast<std::size_t>(label)];
    }
}

std::vector<Eigen::Index> nonevent_set(const MixtureState& state, const ChainData& data) {
    std::vector<Eigen::Index> out;
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        if (!data.is_event[static_cast<std::size_t>(t)] &&
            state.alloc[static_cast<std::size_t>(t)] == 0) {
            out.push_back(t);
        }
    }
    if (out.empty()) {
        throw ValidationError("mixture: non-event set is empty");
    }
    return out;
}

int count_nonempty(const MixtureState& state, const ChainData& data) {
    const Eigen::VectorXi counts = occupancy(state, data);
    return static_cast<int>((counts.array() > 0).count());
}

double mixture_log_density(const MixtureState& state, const ChainData& data) {
    const double m = static_cast<double>(data.series());
    const double log_det_omega = data.col_var.array().log().sum();
    double out = 0.0;
    for (Eigen::Index t = 0; t < data.rows(); ++t) {
        if (data.is_event[static_cast<std::size_t>(t)]) continue;
        const int j = state.alloc[static_cast<std::size_t>(t)];
        const double var = state.component_var[j];
        out += std::log(std::max(state.weights[j], kWeightFloor));
        out += -0.5 * m * std::log(2.0 * M_PI) - 0.5 * m * std::log(var) - 0.5 * log_det_omega -
               data.qform_scaled[t] / (2.0 * var);
    }
    for (int j = 0; j < state.components(); ++j) {
        out += (state.intensity - 1.0) * std::log(std::max(state.weights[j], kWeightFloor));
    }
    return out;
}

}  // namespace rshock
