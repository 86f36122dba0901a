#include <cmath>
#include <numeric>
#include <vector>

#include "doctest.h"
#include "rshock/chain_data.hpp"
#include "rshock/factor.hpp"
#include "rshock/rng.hpp"
#include "rshock/stats.hpp"

using namespace rshock;

namespace {

ChainData chain_from(const Eigen::MatrixXd& values, const Eigen::VectorXd& col_var,
                     std::vector<Eigen::Index> events) {
    HorizonPanel h;
    h.values = values;
    h.origin.resize(static_cast<std::size_t>(values.rows()));
    std::iota(h.origin.begin(), h.origin.end(), Eigen::Index{1});
    ScaleMatrix scale;
    scale.col_var = col_var;
    return make_chain_data(h, scale, std::move(events));
}

}  // namespace

TEST_SUITE("factor") {

TEST_CASE("loading conditional: unit instance has variance 1/2 and mean y/2") {
    // one ruling day, y = 2, f = 1, min_var = 1, omega = 1, tau = 1:
    // posterior variance 1/(1+1) = 1/2, mean (1/2)*2 = 1
    Eigen::MatrixXd y(2, 1);
    y << 2.0, 0.1;
    const ChainData data = chain_from(y, Eigen::VectorXd::Ones(1), {0});
    FactorState state = init_factor(data);
    state.factors[0] = 1.0;
    FactorPriors priors;

    Rng rng(201);
    const int n = 60000;
    Eigen::VectorXd draws(n);
    for (int k = 0; k < n; ++k) {
        FactorState s = state;
        sample_loadings(s, data, 1.0, priors, rng);
        draws[k] = s.loadings[0];
    }
    CHECK(std::abs(draws.mean() - 1.0) < 4.5 * std::sqrt(0.5 / n));
    CHECK(sample_variance(draws) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("loading conditional reduces to the prior without ruling days") {
    Eigen::MatrixXd y(3, 2);
    y << 0.1, -0.2, 0.3, 0.1, -0.1, 0.2;
    const ChainData data = chain_from(y, Eigen::VectorXd::Ones(2), {});
    FactorState state = init_factor(data);
    FactorPriors priors;
    priors.tau = 2.5;

    Rng rng(202);
    const int n = 60000;
    Eigen::VectorXd draws(n);
    for (int k = 0; k < n; ++k) {
        FactorState s = state;
        sample_loadings(s, data, 1.0, priors, rng);
        draws[k] = s.loadings[1];
    }
    CHECK(std::abs(draws.mean()) < 4.5 * std::sqrt(2.5 / n));
    CHECK(sample_variance(draws) == doctest::Approx(2.5).epsilon(0.05));
}

TEST_CASE("factor conditional: unit instance has variance 1/2 and mean y/2") {
    Eigen::MatrixXd y(2, 1);
    y << 2.0, 0.1;
    const ChainData data = chain_from(y, Eigen::VectorXd::Ones(1), {0});
    FactorState state = init_factor(data);
    state.loadings[0] = 1.0;

    Rng rng(203);
    const int n = 60000;
    Eigen::VectorXd draws(n);
    for (int k = 0; k < n; ++k) {
        FactorState s = state;
        sample_factors(s, data, 1.0, rng);
        draws[k] = s.factors[0];
    }
    CHECK(std::abs(draws.mean() - 1.0) < 4.5 * std::sqrt(0.5 / n));
    CHECK(sample_variance(draws) == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("factor conditional reduces to the standard-normal prior at zero loadings") {
    Eigen::MatrixXd y(2, 1);
    y << 2.0, 0.1;
    const ChainData data = chain_from(y, Eigen::VectorXd::Ones(1), {0});
    FactorState state = init_factor(data);
    state.loadings[0] = 0.0;

    Rng rng(204);
    const int n = 60000;
    Eigen::VectorXd draws(n);
    for (int k = 0; k < n; ++k) {
        FactorState s = state;
        sample_factors(s, data, 1.0, rng);
        draws[k] = s.factors[0];
    }
    CHECK(std::abs(draws.mean()) < 4.5 * std::sqrt(1.0 / n));
    CHECK(sample_variance(draws) == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("factor posterior variance is shared across ruling days") {
    // two events with very different observations still share the variance;
    // means differ: mean_e = V * lambda' Omega^{-1} y_e / min_var
    Eigen::MatrixXd y(3, 2);
    y << 4.0, 2.0, 0.1, -0.1, -2.0, -1.0;
    Eigen::VectorXd col_var(2);
    col_var << 4.0, 1.0;
    const ChainData data = chain_from(y, col_var, {0, 2});
    FactorState state = init_factor(data);
    state.loadings << 2.0, 1.0;
    const double min_var = 0.5;

    const double precision = (2.0 * 2.0 / 4.0 + 1.0 * 1.0 / 1.0) / min_var + 1.0;
    const double post_var = 1.0 / precision;
    const double mean0 = post_var * (2.0 * 4.0 / 4.0 + 1.0 * 2.0 / 1.0) / min_var;
    const double mean1 = post_var * (2.0 * -2.0 / 4.0 + 1.0 * -1.0 / 1.0) / min_var;

    Rng rng(205);
    const int n = 60000;
    Eigen::MatrixXd draws(n, 2);
    for (int k = 0; k < n; ++k) {
        FactorState s = state;
        sample_factors(s, data, min_var, rng);
        draws(k, 0) = s.factors[0];
        draws(k, 1) = s.factors[1];
    }
    CHECK(std::abs(draws.col(0).mean() - mean0) < 4.5 * std::sqrt(post_var / n));
    CHECK(std::abs(draws.col(1).mean() - mean1) < 4.5 * std::sqrt(post_var / n));
    CHECK(sample_variance(draws.col(0)) == doctest::Approx(post_var).epsilon(0.05));
    CHECK(sample_variance(draws.col(1)) == doctest::Approx(post_var).epsilon(0.05));
}

TEST_CASE("sign restriction flips loadings and factors together") {
    FactorState state;
    state.loadings = Eigen::VectorXd(3);
    state.loadings << 0.5, -0.2, 1.5;
    state.factors = Eigen::VectorXd(2);
    state.factors << 2.0, -1.0;

    SignRestriction restriction;
    restriction.target_columns = {0, 2};
    restriction.direction = -1;
    CHECK(sign_functional(state, restriction) == doctest::Approx(1.0));

    const Eigen::MatrixXd products = state.loadings * state.factors.transpose();
    FactorState flipped = state;
    CHECK(enforce_sign(flipped, restriction));
    CHECK(flipped.loadings[0] == -0.5);
    CHECK(flipped.factors[1] == 1.0);
    CHECK((flipped.loadings * flipped.factors.transpose() - products).cwiseAbs().maxCoeff() == 0.0);
    CHECK(sign_functional(flipped, restriction) == doctest::Approx(-1.0));

    // already compliant: nothing happens
    FactorState again = flipped;
    CHECK_FALSE(enforce_sign(again, restriction));
    CHECK((again.loadings - flipped.loadings).cwiseAbs().maxCoeff() == 0.0);

    SignRestriction positive = restriction;
    positive.direction = 1;
    FactorState back = flipped;
    CHECK(enforce_sign(back, positive));
    CHECK(back.loadings[0] == 0.5);
}

TEST_CASE("commonality closed forms") {
    Eigen::VectorXd loadings(3);
    loadings << 1.0, 0.0, -1.0;
    Eigen::VectorXd col_var(3);
    col_var << 1.0, 1.0, 3.0;
    const Eigen::VectorXd c = commonality(loadings, 1.0, col_var);
    CHECK(c[0] == doctest::Approx(0.5));
    CHECK(c[1] == doctest::Approx(0.0));
    CHECK(c[2] == doctest::Approx(0.25));  // 1 / (1 + 3)

    // flip invariance and monotonicity in |loading|
    const Eigen::VectorXd cneg = commonality(-loadings, 1.0, col_var);
    CHECK((c - cneg).cwiseAbs().maxCoeff() == 0.0);

    double prev = 0.0;
    for (double l : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        Eigen::VectorXd one = Eigen::VectorXd::Constant(1, l);
        const double value = commonality(one, 1.0, Eigen::VectorXd::Ones(1))[0];
        CHECK(value > prev);
        prev = value;
    }
    CHECK(prev < 1.0);
}

TEST_CASE("gibbs and random-walk metropolis agree on the joint posterior") {
    // one ruling day, two series, everything else frozen; compare
    // sign-invariant functionals of (lambda, f) across two samplers
    Eigen::MatrixXd y(2, 2);
    y << 2.0, 1.0, 0.05, -0.05;
    const ChainData data = chain_from(y, Eigen::VectorXd::Ones(2), {0});
    const double min_var = 1.0;
    FactorPriors priors;

    const int sweeps = 120000;
    Eigen::VectorXd g_l0f(sweeps), g_absl0(sweeps), g_l0l1(sweeps);
    {
        FactorState state = init_factor(data);
        Rng rng(206);
        for (int k = 0; k < sweeps; ++k) {
            sample_loadings(state, data, min_var, priors, rng);
            sample_factors(state, data, min_var, rng);
            g_l0f[k] = state.loadings[0] * state.factors[0];
            g_absl0[k] = std::abs(state.loadings[0]);
            g_l0l1[k] = state.loadings[0] * state.loadings[1];
        }
    }

    // independent implementation: random-walk metropolis on (lambda0, lambda1, f)
    const auto log_post = [&](double l0, double l1, double f) {
        const double r0 = y(0, 0) - l0 * f;
        const double r1 = y(0, 1) - l1 * f;
        return -0.5 * (r0 * r0 + r1 * r1) / min_var - 0.5 * (l0 * l0 + l1 * l1) / priors.tau -
               0.5 * f * f;
    };
    const long steps = 2400000;
    Eigen::VectorXd m_l0f(steps / 8), m_absl0(steps / 8), m_l0l1(steps / 8);
    {
        Rng rng(207);
        double l0 = 0.5, l1 = 0.5, f = 0.5;
        double lp = log_post(l0, l1, f);
        Eigen::Index kept = 0;
        for (long k = 0; k < steps; ++k) {
            const double p0 = l0 + 0.8 * rng.normal();
            const double p1 = l1 + 0.8 * rng.normal();
            const double pf = f + 0.8 * rng.normal();
            const double cand = log_post(p0, p1, pf);
            if (std::log(rng.uniform_pos()) < cand - lp) {
                l0 = p0;
                l1 = p1;
                f = pf;
                lp = cand;
            }
            if (k % 8 == 7) {
                m_l0f[kept] = l0 * f;
                m_absl0[kept] = std::abs(l0);
                m_l0l1[kept] = l0 * l1;
                ++kept;
            }
        }
        REQUIRE(kept == m_l0f.size());
    }

    const auto close = [](const Eigen::VectorXd& a, const Eigen::VectorXd& b, double tol) {
        const double se = std::sqrt(sample_variance(a) / static_cast<double>(a.size()) +
                                    sample_variance(b) / static_cast<double>(b.size()));
        return std::abs(a.mean() - b.mean()) < std::max(tol, 8.0 * se);
    };
    CHECK(close(g_l0f, m_l0f, 0.035));
    CHECK(close(g_absl0, m_absl0, 0.035));
    CHECK(close(g_l0l1, m_l0l1, 0.035));
}

}  // TEST_SUITE
