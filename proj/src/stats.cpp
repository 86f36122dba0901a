#include "rshock/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rshock/common.hpp"

namespace rshock {

double log_sum_exp(const Eigen::VectorXd& x) {
    if (x.size() == 0) throw ValidationError("log_sum_exp: empty input");
    const double m = x.maxCoeff();
    if (!std::isfinite(m)) return m;
    return m + std::log((x.array() - m).exp().sum());
}

double sample_mean(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() == 0) throw ValidationError("sample_mean: empty input");
    return x.mean();
}

double sample_variance(const Eigen::Ref<const Eigen::VectorXd>& x) {
    if (x.size() < 2) throw ValidationError("sample_variance: need at least two values");
    const double m = x.mean();
    return (x.array() - m).square().sum() / static_cast<double>(x.size() - 1);
}

double quantile(std::vector<double> values, double prob) {
    if (values.empty()) throw ValidationError("quantile: empty sample");
    if (!(prob >= 0.0 && prob <= 1.0)) throw ValidationError("quantile: prob outside [0,1]");
    std::sort(values.begin(), values.end());
    const double position = prob * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(position));
    const auto hi = static_cast<std::size_t>(std::ceil(position));
    const double frac = position - std::floor(position);
    return values[lo] + frac * (values[hi] - values[lo]);
}

Eigen::MatrixXd column_quantiles(const Eigen::Ref<const Eigen::MatrixXd>& draws,
                                 const std::vector<double>& probs) {
    if (draws.rows() == 0) throw ValidationError("column_quantiles: no draws");
    Eigen::MatrixXd out(static_cast<Eigen::Index>(probs.size()), draws.cols());
    std::vector<double> column(static_cast<std::size_t>(draws.rows()));
    for (Eigen::Index c = 0; c < draws.cols(); ++c) {
        for (Eigen::Index r = 0; r < draws.rows(); ++r) {
            column[static_cast<std::size_t>(r)] = draws(r, c);
        }
        std::sort(column.begin(), column.end());
        for (std::size_t p = 0; p < probs.size(); ++p) {
            const double prob = probs[p];
            if (!(prob >= 0.0 && prob <= 1.0)) {
                throw ValidationError("column_quantiles: prob outside [0,1]");
            }
            const double position = prob * static_cast<double>(column.size() - 1);
            const auto lo = static_cast<std::size_t>(std::floor(position));
            const auto hi = static_cast<std::size_t>(std::ceil(position));
            const double frac = position - std::floor(position);
            out(static_cast<Eigen::Index>(p), c) = column[lo] + frac * (column[hi] - column[lo]);
        }
    }
    return out;
}

double autocorr_lag1(const Eigen::Ref<const Eigen::VectorXd>& x) {
    const Eigen::Index n = x.size();
    if (n < 2) return 0.0;
    const double m = x.mean();
    const double denom = (x.array() - m).square().sum();
    if (!(denom > 0.0)) return 0.0;
    double num = 0.0;
    for (Eigen::Index t = 1; t < n; ++t) {
        num += (x[t] - m) * (x[t - 1] - m);
    }
    return num / denom;
}

}  // namespace rshock
