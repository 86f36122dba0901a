#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>

namespace rshock {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace detail

// Seed of the independent stream `stream` under a master seed (e.g. one
// stream per horizon chain).
inline std::uint64_t derive_stream_seed(std::uint64_t seed, std::uint64_t stream) {
    return detail::splitmix64(seed) ^
           detail::splitmix64(stream * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL);
}

// Deterministic random stream. The engine (std::mt19937_64) is fully
// specified by the standard and all distributions are implemented here,
// so a (seed, stream) pair yields identical draws on every platform.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    // Independent stream for worker `stream` (e.g. one per horizon).
    static Rng for_stream(std::uint64_t seed, std::uint64_t stream) {
        return Rng(derive_stream_seed(seed, stream));
    }

    // Uniform on [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    // Uniform on (0, 1); safe to take logs of.
    double uniform_pos() {
        double u;
        do {
            u = uniform();
        } while (u <= 0.0);
        return u;
    }

    // Standard normal via the Marsaglia polar method.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double factor = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * factor;
        have_spare_ = true;
        return u * factor;
    }

    double normal(double mean, double variance) {
        return mean + std::sqrt(variance) * normal();
    }

    // Gamma(shape, scale) via Marsaglia-Tsang; boosted for shape < 1.
    double gamma(double shape, double scale = 1.0);

    // theta ~ InverseGamma(shape, rate): 1/theta ~ Gamma(shape, 1/rate).
    double inverse_gamma(double shape, double rate) {
        return rate / gamma(shape, 1.0);
    }

    // Dirichlet draw; `concentration` entries must be positive.
    Eigen::VectorXd dirichlet(const Eigen::VectorXd& concentration);

    std::uint64_t raw() { return engine_(); }

  private:
    static std::uint64_t mix(std::uint64_t x) { return detail::splitmix64(x); }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rshock
