#include "rshock/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "rshock/rng.hpp"

namespace rshock {

namespace {

// consecutive weekdays starting 2012-03-01
std::vector<Date> weekday_calendar(int count) {
    std::vector<Date> dates;
    dates.reserve(static_cast<std::size_t>(count));
    Date day = parse_date("2012-03-01");
    while (static_cast<int>(dates.size()) < count) {
        const std::chrono::weekday wd{day};
        if (wd != std::chrono::Saturday && wd != std::chrono::Sunday) {
            dates.push_back(day);
        }
        day += std::chrono::days{1};
    }
    return dates;
}

int draw_regime(const Eigen::VectorXd& weights, Rng& rng) {
    const double u = rng.uniform();
    double cum = 0.0;
    for (Eigen::Index j = 0; j < weights.size(); ++j) {
        cum += weights[j];
        if (u < cum) return static_cast<int>(j);
    }
    return static_cast<int>(weights.size() - 1);
}

}  // namespace

void validate(const SyntheticSpec& spec) {
    if (spec.periods < 3) throw ValidationError("synthetic: need at least 3 periods");
    if (spec.series < 1) throw ValidationError("synthetic: need at least 1 series");
    const Eigen::Index k = spec.regime_var.size();
    if (k < 1) throw ValidationError("synthetic: no regime variances");
    for (Eigen::Index j = 0; j < k; ++j) {
        if (!(spec.regime_var[j] > 0.0)) {
            throw ValidationError("synthetic: regime variances must be positive");
        }
        if (j > 0 && spec.regime_var[j] <= spec.regime_var[j - 1]) {
            throw ValidationError("synthetic: regime variances must be strictly ascending");
        }
    }
    if (spec.regime_weights.size() != k) {
        throw ValidationError("synthetic: regime weights and variances disagree in size");
    }
    if (spec.regime_weights.minCoeff() < 0.0 ||
        std::abs(spec.regime_weights.sum() - 1.0) > 1e-9) {
        throw ValidationError("synthetic: regime weights must form a simplex");
    }
    if (spec.markov && !(spec.markov_stay >= 0.0 && spec.markov_stay <= 1.0)) {
        throw ValidationError("synthetic: stay probability outside [0,1]");
    }
    if (spec.event_indices.empty()) throw ValidationError("synthetic: need at least one event");
    std::set<int> seen;
    for (int e : spec.event_indices) {
        if (e < 1 || e > spec.periods) {
            throw ValidationError("synthetic: event index " + std::to_string(e) +
                                  " outside 1.." + std::to_string(spec.periods));
        }
        if (!seen.insert(e).second) {
            throw ValidationError("synthetic: duplicate event index " + std::to_string(e));
        }
    }
    if (spec.loadings.size() != spec.series) {
        throw ValidationError("synthetic: loadings must have one entry per series");
    }
    if (spec.factors.size() != static_cast<Eigen::Index>(spec.event_indices.size())) {
        throw ValidationError("synthetic: factors must have one entry per event");
    }
    if (spec.col_scale.size() != spec.series || spec.col_scale.minCoeff() <= 0.0) {
        throw ValidationError("synthetic: per-series scales must be positive, one per series");
    }
}

SyntheticData generate(const SyntheticSpec& spec) {
    validate(spec);
    Rng rng(spec.seed);
    const int t_count = spec.periods;
    const Eigen::Index m = spec.series;

    std::vector<int> sorted_events = spec.event_indices;
    std::vector<std::size_t> order(sorted_events.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return spec.event_indices[a] < spec.event_indices[b];
    });
    std::sort(sorted_events.begin(), sorted_events.end());
    Eigen::VectorXd sorted_factors(spec.factors.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        sorted_factors[static_cast<Eigen::Index>(i)] =
            spec.factors[static_cast<Eigen::Index>(order[i])];
    }

    const Eigen::VectorXd col_sd = spec.col_scale.cwiseSqrt();
    std::vector<char> is_event(static_cast<std::size_t>(t_count + 1), 0);
    for (int e : sorted_events) is_event[static_cast<std::size_t>(e)] = 1;

    GroundTruth truth;
    truth.regime.assign(static_cast<std::size_t>(t_count), 0);
    truth.event_indices = sorted_events;
    truth.loadings = spec.loadings;
    truth.factors = sorted_factors;
    truth.col_scale = spec.col_scale;
    truth.regime_var = spec.regime_var;

    // daily changes per the observation model, then cumulated into levels
    Eigen::MatrixXd levels(t_count + 1, m);
    levels.row(0).setZero();
    int regime = 0;
    Eigen::Index next_event = 0;
    for (int day = 0; day < t_count; ++day) {
        Eigen::VectorXd change(m);
        // latent regime evolves on every day
        if (spec.markov) {
            if (day == 0 || rng.uniform() >= spec.markov_stay) {
                regime = draw_regime(spec.regime_weights, rng);
            }
        } else {
            regime = draw_regime(spec.regime_weights, rng);
        }
        const int panel_row = day + 1;
        if (is_event[static_cast<std::size_t>(panel_row)]) {
            const double f = sorted_factors[next_event++];
            for (Eigen::Index i = 0; i < m; ++i) {
                change[i] = spec.loadings[i] * f +
                            col_sd[i] * std::sqrt(spec.regime_var[0]) * rng.normal();
            }
            truth.regime[static_cast<std::size_t>(day)] = 0;
        } else {
            for (Eigen::Index i = 0; i < m; ++i) {
                change[i] = col_sd[i] * std::sqrt(spec.regime_var[regime]) * rng.normal();
            }
            truth.regime[static_cast<std::size_t>(day)] = regime;
        }
        levels.row(panel_row) = levels.row(panel_row - 1) + change.transpose();
    }

    SyntheticData data;
    data.panel.dates = weekday_calendar(t_count + 1);
    data.panel.values = std::move(levels);
    data.panel.labels.reserve(static_cast<std::size_t>(m));
    for (Eigen::Index i = 0; i < m; ++i) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%s_%d",
                      spec.loadings[i] < 0.0 ? "stress" : "series", static_cast<int>(i + 1));
        data.panel.labels.push_back(buf);
    }

    for (std::size_t e = 0; e < sorted_events.size(); ++e) {
        data.events.event_indices.push_back(static_cast<Eigen::Index>(sorted_events[e]));
        data.events.labels.push_back("ruling " + std::to_string(e + 1));
        data.events.remarks.emplace_back();
    }
    data.truth = std::move(truth);
    return data;
}

SyntheticSpec reference_spec(int periods, int series, int events, std::uint64_t seed) {
    SyntheticSpec spec;
    spec.periods = periods;
    spec.series = series;
    spec.seed = seed;
    spec.regime_var = Eigen::Vector3d(1.0, 5.0, 25.0);
    spec.regime_weights = Eigen::Vector3d(0.80, 0.15, 0.05);

    spec.col_scale.resize(series);
    for (int i = 0; i < series; ++i) {
        spec.col_scale[i] =
            series > 1 ? 0.5 + 1.5 * static_cast<double>(i) / (series - 1) : 1.0;
    }
    // loadings 3x the minimum-regime scale; the first block carries the
    // negative sign convention of the stress indicators
    const int negative = std::max(1, series / 5);
    spec.loadings.resize(series);
    for (int i = 0; i < series; ++i) {
        const double magnitude = 3.0 * std::sqrt(spec.regime_var[0] * spec.col_scale[i]);
        spec.loadings[i] = i < negative ? -magnitude : magnitude;
    }

    spec.event_indices.clear();
    const int usable = periods - 60;  // keep events alive across the horizon range
    for (int e = 0; e < events; ++e) {
        spec.event_indices.push_back(std::max(1, usable * (e + 1) / (events + 1)));
    }
    // sized so the planted scale split matches the estimation priors:
    // sum(f*^2) ~ sum(lambda*^2)/tau, the point where the soft factor-scale
    // identification leaves the loadings at their planted magnitude
    static const double kFactorTable[] = {5.25, -2.8, 7.0,  2.1, -4.2, 3.5,
                                          6.3, -1.75, 3.15, 4.9, -5.6, 2.45};
    spec.factors.resize(events);
    for (int e = 0; e < events; ++e) {
        spec.factors[e] = kFactorTable[static_cast<std::size_t>(e) % 12];
    }
    return spec;
}

}  // namespace rshock
