#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rshock/gibbs.hpp"
#include "rshock/rng.hpp"
#include "rshock/stats.hpp"
#include "rshock/synthetic.hpp"

using namespace rshock;

namespace {

// Small planted instance, already differenced at h = 0.
struct Instance {
    ChainData data;
    SignRestriction restriction;
};

Instance small_instance(std::uint64_t seed, int periods = 160, int series = 3, int events = 4) {
    SyntheticSpec spec = reference_spec(periods, series, events, seed);
    const SyntheticData sim = generate(spec);
    const HorizonPanel h0 = difference_horizon(demean(sim.panel), 0);
    const ScaleMatrix scale = compute_scale(h0);
    std::vector<Eigen::Index> rows;
    for (Eigen::Index e : sim.events.event_indices) rows.push_back(e - 1);
    Instance inst{make_chain_data(h0, scale, rows), {}};
    for (Eigen::Index c = 0; c < series; ++c) {
        if (sim.truth.loadings[c] < 0.0) inst.restriction.target_columns.push_back(c);
    }
    inst.restriction.direction = -1;
    return inst;
}

ChainConfig quick_config(std::uint64_t seed, int burnin = 150, int draws = 150, int thin = 3) {
    ChainConfig config;
    config.burnin = burnin;
    config.draws = draws;
    config.thin = thin;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_SUITE("gibbs") {

TEST_CASE("default configuration retains 1000 draws") {
    const ChainConfig config;
    CHECK(config.burnin == 2000);
    CHECK(config.draws == 3000);
    CHECK(config.thin == 3);
    CHECK(config.retained() == 1000);
    CHECK(config.mode == Mode::Mixture);
    CHECK(config.variant == VarianceUpdate::Coherent);
    CHECK(config.mh_statistic == IntensityStatistic::AllocationProbs);
}

TEST_CASE("identical seeds give bit-identical chains") {
    const Instance inst = small_instance(31);
    MixturePriors mpriors;
    mpriors.components = 6;
    FactorPriors fpriors;
    const ChainConfig config = quick_config(9);

    const Draws a = run_chain(inst.data, mpriors, fpriors, inst.restriction, config);
    const Draws b = run_chain(inst.data, mpriors, fpriors, inst.restriction, config);
    REQUIRE(a.retained() == config.retained());
    CHECK((a.loadings - b.loadings).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.factors - b.factors).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.min_var - b.min_var).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.intensity - b.intensity).cwiseAbs().maxCoeff() == 0.0);
    CHECK((a.nonevent_prob - b.nonevent_prob).cwiseAbs().maxCoeff() == 0.0);
    CHECK(a.accept_rate == b.accept_rate);

    ChainConfig other = config;
    other.seed = 10;
    const Draws c = run_chain(inst.data, mpriors, fpriors, inst.restriction, other);
    CHECK((a.loadings - c.loadings).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("chain output shapes and ranges") {
    const Instance inst = small_instance(32);
    MixturePriors mpriors;
    mpriors.components = 5;
    const ChainConfig config = quick_config(11, 120, 120, 3);
    const Draws d = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, config);

    REQUIRE(d.retained() == 40);
    CHECK(d.loadings.cols() == inst.data.series());
    CHECK(d.factors.cols() == inst.data.n_events());
    CHECK(d.min_var.size() == 40);
    CHECK(d.min_var.minCoeff() > 0.0);
    CHECK(d.nonempty_count.minCoeff() >= 1);
    CHECK(d.nonempty_count.maxCoeff() <= 5);
    CHECK(d.intensity.minCoeff() > 0.0);
    CHECK(d.accept_rate >= 0.0);
    CHECK(d.accept_rate <= 1.0);
    CHECK(d.variance_path.size() == 0);

    REQUIRE(d.nonevent_prob.size() == inst.data.rows());
    CHECK(d.nonevent_prob.minCoeff() >= 0.0);
    CHECK(d.nonevent_prob.maxCoeff() <= 1.0);
    for (Eigen::Index e : inst.data.event_rows) {
        CHECK(d.nonevent_prob[e] == 1.0);  // ruling rows live in component 0 by construction
    }

    ChainConfig with_path = config;
    with_path.keep_variance_path = true;
    const Draws p = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, with_path);
    CHECK(p.variance_path.rows() == 40);
    CHECK(p.variance_path.cols() == inst.data.rows());
    CHECK(p.variance_path.minCoeff() > 0.0);
}

TEST_CASE("sign restriction holds at every retained draw") {
    const Instance inst = small_instance(33);
    MixturePriors mpriors;
    mpriors.components = 5;
    const Draws d =
        run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, quick_config(12));
    for (Eigen::Index k = 0; k < d.retained(); ++k) {
        double mean = 0.0;
        for (Eigen::Index c : inst.restriction.target_columns) mean += d.loadings(k, c);
        CHECK(mean <= 0.0);
    }
}

TEST_CASE("naive mode collapses to one component") {
    const Instance inst = small_instance(34);
    MixturePriors mpriors;
    mpriors.components = 8;  // ignored in naive mode
    ChainConfig config = quick_config(13);
    config.mode = Mode::Naive;
    const Draws d = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, config);
    CHECK(d.nonempty_count.minCoeff() == 1);
    CHECK(d.nonempty_count.maxCoeff() == 1);
    CHECK(d.nonevent_prob.minCoeff() == 1.0);  // every day is a quiet day
}

TEST_CASE("naive mode is the single-component mixture") {
    const Instance inst = small_instance(35);
    MixturePriors mpriors;
    mpriors.components = 1;
    ChainConfig config = quick_config(14);
    const Draws mixture = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, config);
    config.mode = Mode::Naive;
    mpriors.components = 7;
    const Draws naive = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, config);
    CHECK((mixture.loadings - naive.loadings).cwiseAbs().maxCoeff() == 0.0);
    CHECK((mixture.min_var - naive.min_var).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("thinning lowers the lag-1 autocorrelation of slow statistics") {
    const Instance inst = small_instance(36, 240, 3, 5);
    MixturePriors mpriors;
    mpriors.components = 6;

    ChainConfig unthinned = quick_config(15, 200, 1200, 1);
    ChainConfig thinned = quick_config(15, 200, 1200, 4);
    const Draws u = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, unthinned);
    const Draws t = run_chain(inst.data, mpriors, FactorPriors{}, inst.restriction, thinned);
    REQUIRE(u.retained() == 1200);
    REQUIRE(t.retained() == 300);
    CHECK(autocorr_lag1(t.intensity) < autocorr_lag1(u.intensity));
}

TEST_CASE("all-ruling data aborts with a chain error") {
    SyntheticSpec spec = reference_spec(8, 2, 8, 41);
    spec.event_indices = {1, 2, 3, 4, 5, 6, 7, 8};
    spec.factors = Eigen::VectorXd::Ones(8);
    const SyntheticData sim = generate(spec);
    const HorizonPanel h0 = difference_horizon(sim.panel, 0);
    std::vector<Eigen::Index> rows;
    for (Eigen::Index e : sim.events.event_indices) rows.push_back(e - 1);
    const ChainData data = make_chain_data(h0, compute_scale(h0), rows);

    SignRestriction restriction;
    restriction.target_columns = {0};
    ChainConfig config = quick_config(16, 1, 3, 1);
    CHECK_THROWS_AS(run_chain(data, MixturePriors{}, FactorPriors{}, restriction, config),
                    ChainError);
}

TEST_CASE("summarize quantile surface") {
    Eigen::MatrixXd draws(100, 2);
    for (int i = 0; i < 100; ++i) {
        draws(i, 0) = i + 1;
        draws(i, 1) = 7.0;
    }
    const Eigen::MatrixXd q = summarize(draws);
    REQUIRE(q.rows() == 5);  // 0.05, 0.16, 0.50, 0.84, 0.95
    CHECK(q(2, 0) == doctest::Approx(50.5));
    for (int r = 1; r < 5; ++r) CHECK(q(r, 0) >= q(r - 1, 0));
    for (int r = 0; r < 5; ++r) CHECK(q(r, 1) == 7.0);

    const Eigen::MatrixXd custom = summarize(draws, {0.5});
    CHECK(custom.rows() == 1);
    CHECK(custom(0, 0) == doctest::Approx(50.5));
}

TEST_CASE("default levels are the published credible bands") {
    const std::vector<double>& levels = default_levels();
    REQUIRE(levels.size() == 5);
    CHECK(levels[0] == 0.05);
    CHECK(levels[1] == 0.16);
    CHECK(levels[2] == 0.50);
    CHECK(levels[3] == 0.84);
    CHECK(levels[4] == 0.95);
}

}  // TEST_SUITE
