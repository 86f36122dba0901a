#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rshock {

// One self-check comparing a sampler against an independent oracle
// (closed-form moments, direct density evaluation, or quadrature).
struct CheckResult {
    std::string name;
    bool pass = false;
    double worst_z = 0.0;   // |z| for moment checks; scaled statistic otherwise
    std::string detail;
};

struct CheckOptions {
    int draws = 100000;
    std::uint64_t seed = 42;
    bool full_mh = false;       // adds the long stationary-distribution check
    std::string corrupt;        // test fixture: perturb the named check's sampler
};

// Runs the conditional-by-conditional oracle suite. Moment checks pass
// when every |z| <= 4.
std::vector<CheckResult> analytic_check(const CheckOptions& options);

// Stationary-distribution check of the intensity MH kernel on a frozen
// statistic: Kolmogorov-Smirnov distance between the empirical
// distribution and grid quadrature of the target, plus the adapted
// acceptance rate.
struct IntensityKernelCheck {
    double ks_distance = 0.0;
    double accept_rate = 0.0;
};

IntensityKernelCheck check_intensity_kernel(long iterations, std::uint64_t seed);

}  // namespace rshock
