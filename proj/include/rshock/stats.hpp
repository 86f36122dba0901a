#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rshock {

// log(sum(exp(x))) with max-subtraction.
double log_sum_exp(const Eigen::VectorXd& x);

// Sample mean and variance (denominator n-1).
double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& x);
double sample_variance(const Eigen::Ref<const Eigen::VectorXd>& x);

// Empirical quantile with linear interpolation between order statistics
// (the rule: position 1 + p*(n-1) on the sorted sample, 1-based).
double quantile(std::vector<double> values, double prob);

// Per-column quantiles of a draws matrix; returns probs.size() x cols.
// Throws ValidationError on an empty draws matrix or a prob outside [0,1].
Eigen::MatrixXd column_quantiles(const Eigen::Ref<const Eigen::MatrixXd>& draws,
                                 const std::vector<double>& probs);

// Lag-1 autocorrelation of a series (0 if degenerate).
double autocorr_lag1(const Eigen::Ref<const Eigen::VectorXd>& x);

}  // namespace rshock
