#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "rshock/panel.hpp"

namespace rshock {

// Ground-truth generator configuration. Daily changes follow the
// estimated model exactly: ruling days load a common factor on top of
// minimum-regime noise, other days draw a common variance regime. The
// emitted panel holds cumulated levels, so first differences recover the
// planted structure.
struct SyntheticSpec {
    int periods = 1500;  // number of daily changes
    int series = 20;

    Eigen::VectorXd regime_var;      // ascending, regime 0 minimal
    Eigen::VectorXd regime_weights;  // simplex
    bool markov = false;             // persistent regimes instead of i.i.d. days
    double markov_stay = 0.95;

    std::vector<int> event_indices;  // day index of each ruling, all >= 1
    Eigen::VectorXd loadings;        // M
    Eigen::VectorXd factors;         // one per event
    Eigen::VectorXd col_scale;       // M, per-series variance scale

    std::uint64_t seed = 1;
};

struct GroundTruth {
    std::vector<int> regime;   // per day; ruling days recorded as 0
    std::vector<int> event_indices;
    Eigen::VectorXd loadings;
    Eigen::VectorXd factors;
    Eigen::VectorXd col_scale;
    Eigen::VectorXd regime_var;
};

struct SyntheticData {
    Panel panel;
    EventCalendar events;
    GroundTruth truth;
};

// Deterministic in (spec, seed).
SyntheticData generate(const SyntheticSpec& spec);

// The reference instance: K=3 regimes with variances 1/5/25 on 5%
// contamination weights, 12 events, loadings at 3x the minimum-regime
// scale with the first `target` columns negative.
SyntheticSpec reference_spec(int periods = 1500, int series = 20, int events = 12,
                             std::uint64_t seed = 7);

// Validation helpers used by the CLI.
void validate(const SyntheticSpec& spec);

}  // namespace rshock
