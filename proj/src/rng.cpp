#include "rshock/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace rshock {

double Rng::gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
        throw std::invalid_argument("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
        // boost: G(a) = G(a+1) * U^{1/a}
        const double u = uniform_pos();
        return gamma(shape + 1.0, scale) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform_pos();
        if (u < 1.0 - 0.0331 * x * x * x * x) return scale * d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return scale * d * v;
    }
}

Eigen::VectorXd Rng::dirichlet(const Eigen::VectorXd& concentration) {
    Eigen::VectorXd out(concentration.size());
    double total = 0.0;
    for (Eigen::Index j = 0; j < concentration.size(); ++j) {
        out[j] = gamma(concentration[j], 1.0);
        total += out[j];
    }
    if (!(total > 0.0)) {
        // all gammas underflowed; fall back to the largest concentration
        Eigen::Index argmax = 0;
        concentration.maxCoeff(&argmax);
        out.setZero();
        out[argmax] = 1.0;
        return out;
    }
    return out / total;
}

}  // namespace rshock
