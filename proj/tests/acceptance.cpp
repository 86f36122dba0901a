// End-to-end acceptance gates. Each criterion prints exactly one PASS/FAIL
// line with the measured statistic and its pinned tolerance; the process
// exits with the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>
#include <vector>

#include "rshock/gibbs.hpp"
#include "rshock/oracle.hpp"
#include "rshock/panel.hpp"
#include "rshock/projection.hpp"
#include "rshock/stats.hpp"
#include "rshock/synthetic.hpp"

using namespace rshock;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s  %-24s %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    failures += pass ? 0 : 1;
}

void criterion(const std::string& name, const std::function<std::pair<bool, std::string>()>& fn) {
    try {
        const auto [pass, detail] = fn();
        report(name, pass, detail);
    } catch (const std::exception& err) {
        report(name, false, std::string("exception: ") + err.what());
    }
}

std::string fmt(const char* pattern, ...) {
    va_list args;
    va_start(args, pattern);
    char buffer[512];
    std::vsnprintf(buffer, sizeof buffer, pattern, args);
    va_end(args);
    return buffer;
}

// Shared reference instance and its h = 0 mixture chain, reused by the
// recovery, sharpening, commonality, symmetry and robustness criteria.
struct ReferenceRun {
    SyntheticData sim;
    EstimationSettings settings;
    std::vector<HorizonResult> results;
    double chain_seconds = 0.0;
};

ReferenceRun run_reference() {
    ReferenceRun run;
    run.sim = generate(reference_spec(1500, 20, 12, 7));
    run.settings.restriction.target_columns = match_columns(run.sim.panel.labels, "stress_*");
    run.settings.restriction.direction = -1;
    run.settings.chain.seed = 1;
    run.settings.chain.keep_variance_path = true;
    const auto start = Clock::now();
    run.results = estimate_all(run.sim.panel, run.sim.events, 0, run.settings);
    run.chain_seconds = seconds_since(start);
    return run;
}

Eigen::VectorXd column_sds(const Eigen::MatrixXd& draws) {
    const Eigen::RowVectorXd mean = draws.colwise().mean();
    Eigen::VectorXd sd(draws.cols());
    for (Eigen::Index c = 0; c < draws.cols(); ++c) {
        sd[c] = std::sqrt((draws.col(c).array() - mean[c]).square().sum() /
                          static_cast<double>(draws.rows() - 1));
    }
    return sd;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

int run_cli(const std::string& args, const std::string& log) {
    const std::string command = std::string(RULING_SHOCK_BIN) + " " + args + " >" + log + " 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

int main() {
    const auto suite_start = Clock::now();

    // --- conjugate-conditional oracle suite ---------------------------------
    criterion("oracle-suite", [] {
        const auto start = Clock::now();
        CheckOptions options;
        options.draws = 100000;
        options.seed = 42;
        const auto results = analytic_check(options);
        const double secs = seconds_since(start);
        double worst = 0.0;
        std::string failed;
        for (const auto& r : results) {
            worst = std::max(worst, r.worst_z);
            if (!r.pass) failed += (failed.empty() ? "" : ", ") + r.name;
        }
        const bool pass = failed.empty() && secs < 60.0;
        return std::make_pair(
            pass, fmt("%zu checks, worst |z| %.2f (gate 4), %.1fs (gate 60s)%s%s", results.size(),
                      worst, secs, failed.empty() ? "" : "; failed: ", failed.c_str()));
    });

    // --- stationary distribution of the intensity kernel --------------------
    criterion("intensity-kernel", [] {
        const auto start = Clock::now();
        const IntensityKernelCheck check = check_intensity_kernel(1000000, 42);
        const double secs = seconds_since(start);
        const bool pass = check.ks_distance < 0.02 && check.accept_rate >= 0.20 &&
                          check.accept_rate <= 0.40 && secs < 120.0;
        return std::make_pair(pass,
                              fmt("KS %.4f (gate 0.02), accept %.3f (band 0.20-0.40), %.1fs",
                                  check.ks_distance, check.accept_rate, secs));
    });

    // --- planted-structure recovery on the reference instance ---------------
    ReferenceRun ref = run_reference();
    const HorizonResult& h0 = ref.results.at(0);
    const Eigen::Index series = ref.sim.panel.cols();

    criterion("synthetic-recovery", [&] {
        // (a) quiet-day classification among planted minimum-regime days
        long quiet = 0, correct = 0;
        for (Eigen::Index r = 0; r < h0.draws.nonevent_prob.size(); ++r) {
            const auto day = static_cast<std::size_t>(r);
            const bool ruling =
                std::find(ref.sim.truth.event_indices.begin(), ref.sim.truth.event_indices.end(),
                          static_cast<int>(r + 1)) != ref.sim.truth.event_indices.end();
            if (ruling || ref.sim.truth.regime[day] != 0) continue;
            ++quiet;
            correct += h0.draws.nonevent_prob[r] > 0.5;
        }
        const double accuracy = static_cast<double>(correct) / static_cast<double>(quiet);

        // (b) planted loadings inside 3 posterior SDs
        const Eigen::MatrixXd median = summarize(h0.draws.loadings, {0.5});
        const Eigen::VectorXd sd = column_sds(h0.draws.loadings);
        int inside = 0;
        for (Eigen::Index c = 0; c < series; ++c) {
            inside += std::abs(median(0, c) - ref.sim.truth.loadings[c]) <= 3.0 * sd[c];
        }

        // (c) cluster shrinkage
        const double mean_nonempty = h0.draws.nonempty_count.cast<double>().mean();

        const bool pass = accuracy >= 0.95 && inside >= (series * 9 + 9) / 10 &&
                          mean_nonempty <= 6.0 && ref.chain_seconds < 300.0;
        return std::make_pair(
            pass, fmt("classification %.3f (gate 0.95), loadings in 3sd %d/%d (gate %d), "
                      "mean clusters %.2f (gate 6), chain %.0fs (gate 300s)",
                      accuracy, inside, static_cast<int>(series),
                      static_cast<int>((series * 9 + 9) / 10), mean_nonempty, ref.chain_seconds));
    });

    // --- mixture posterior is sharper than the naive comparator -------------
    criterion("mixture-sharpening", [&] {
        EstimationSettings naive = ref.settings;
        naive.chain.mode = Mode::Naive;
        naive.chain.keep_variance_path = false;
        const auto results = estimate_all(ref.sim.panel, ref.sim.events, 0, naive);
        const auto width = [](const Draws& draws) {
            const Eigen::MatrixXd q = summarize(draws.factors, {0.05, 0.95});
            return (q.row(1) - q.row(0)).mean();
        };
        const double mixture_width = width(h0.draws);
        const double naive_width = width(results.at(0).draws);
        const bool pass = mixture_width < naive_width;
        return std::make_pair(pass, fmt("mean 90%% interval width of f: mixture %.3f vs "
                                        "naive %.3f (gate: strictly smaller)",
                                        mixture_width, naive_width));
    });

    // --- commonality shares sit in the planted band -------------------------
    criterion("commonality-band", [&] {
        const Eigen::VectorXd medians = compute_commonalities(h0.draws, h0.scale);
        int inside = 0;
        for (Eigen::Index c = 0; c < medians.size(); ++c) {
            inside += medians[c] >= 0.80 && medians[c] <= 0.97;
        }
        const bool pass = inside == medians.size();
        return std::make_pair(pass,
                              fmt("per-series medians in [0.80, 0.97]: %d/%d, range %.3f-%.3f "
                                  "(planted 0.9)",
                                  inside, static_cast<int>(medians.size()), medians.minCoeff(),
                                  medians.maxCoeff()));
    });

    // --- exact normalization, sign symmetry, mirrored plant -----------------
    criterion("normalization-symmetry", [&] {
        SignRestriction down = ref.settings.restriction;
        const IrfResult irf = normalize_shock(ref.results, down, 0, 1.0);
        if (irf.dropped_draws != 0) return std::make_pair(false, std::string("draws were dropped"));

        // (a) per-draw pinning of the target-column mean response
        double worst_pin = 0.0;
        for (Eigen::Index k = 0; k < irf.scale_factors.size(); ++k) {
            double mean = 0.0;
            for (Eigen::Index c : down.target_columns) {
                mean += irf.scale_factors[k] * h0.draws.loadings(k, c);
            }
            mean /= static_cast<double>(down.target_columns.size());
            worst_pin = std::max(worst_pin, std::abs(mean - (-1.0)));
        }

        // (b) flipping the reported direction mirrors the quantile surface
        SignRestriction up = down;
        up.direction = 1;
        const IrfResult flipped = normalize_shock(ref.results, up, 0, 1.0);
        double worst_flip = 0.0;
        const Eigen::Index levels = static_cast<Eigen::Index>(irf.levels.size());
        for (Eigen::Index l = 0; l < levels; ++l) {
            for (Eigen::Index c = 0; c < series; ++c) {
                worst_flip = std::max(
                    worst_flip, std::abs(flipped.irf[0](l, c) + irf.irf[0](levels - 1 - l, c)));
            }
        }

        // (c) mirrored plant: negated factors + positive direction reproduce
        // the negated response surface, and the raw factor means negate
        SyntheticSpec mirrored_spec = reference_spec(1500, 20, 12, 7);
        mirrored_spec.factors = -mirrored_spec.factors;
        const SyntheticData mirrored = generate(mirrored_spec);
        EstimationSettings settings = ref.settings;
        settings.chain.keep_variance_path = false;
        const auto mirrored_results = estimate_all(mirrored.panel, mirrored.events, 0, settings);
        const IrfResult mirrored_irf = normalize_shock(mirrored_results, up, 0, 1.0);

        const Eigen::VectorXd sd =
            column_sds(h0.draws.loadings) * std::abs(irf.scale_factors.mean());
        double worst_median = 0.0;
        for (Eigen::Index c = 0; c < series; ++c) {
            const double sum = mirrored_irf.irf[0](2, c) + irf.irf[0](2, c);
            worst_median = std::max(worst_median, std::abs(sum) / std::max(sd[c], 1e-12));
        }

        const Eigen::VectorXd f_orig = h0.draws.factors.colwise().mean();
        const Eigen::VectorXd f_mirror = mirrored_results.at(0).draws.factors.colwise().mean();
        const Eigen::VectorXd f_sd = column_sds(h0.draws.factors);
        double worst_factor = 0.0;
        for (Eigen::Index e = 0; e < f_orig.size(); ++e) {
            worst_factor =
                std::max(worst_factor, std::abs(f_mirror[e] + f_orig[e]) / std::max(f_sd[e], 1e-12));
        }

        const bool pass =
            worst_pin <= 1e-9 && worst_flip <= 1e-9 && worst_median <= 5.0 && worst_factor <= 6.0;
        return std::make_pair(
            pass, fmt("pinning residual %.1e (gate 1e-9), flip residual %.1e (gate 1e-9), "
                      "mirrored medians %.2f sd (gate 5), mirrored factors %.2f sd (gate 6)",
                      worst_pin, worst_flip, worst_median, worst_factor));
    });

    // --- robustness to the component budget ----------------------------------
    criterion("component-robustness", [&] {
        const Eigen::VectorXd base_path = h0.draws.variance_path.colwise().mean();
        const IrfResult base_irf = normalize_shock(ref.results, ref.settings.restriction, 0, 1.0);
        Eigen::VectorXd base_median(series);
        for (Eigen::Index c = 0; c < series; ++c) base_median[c] = base_irf.irf[0](2, c);
        const Eigen::VectorXd scaled_sd =
            column_sds(h0.draws.loadings) * std::abs(base_irf.scale_factors.mean());

        double worst_path = 0.0, worst_irf = 0.0;
        for (int components : {10, 20, 40}) {
            EstimationSettings settings = ref.settings;
            settings.mixture.components = components;
            const auto results = estimate_all(ref.sim.panel, ref.sim.events, 0, settings);
            const Eigen::VectorXd path = results.at(0).draws.variance_path.colwise().mean();
            const double mean_rel = ((path - base_path).cwiseAbs().array() /
                                     base_path.cwiseAbs().array()).mean();
            worst_path = std::max(worst_path, mean_rel);

            const IrfResult irf =
                normalize_shock(results, ref.settings.restriction, 0, 1.0);
            double mean_dev = 0.0;
            for (Eigen::Index c = 0; c < series; ++c) {
                mean_dev += std::abs(irf.irf[0](2, c) - base_median[c]) / scaled_sd[c];
            }
            worst_irf = std::max(worst_irf, mean_dev / static_cast<double>(series));
        }
        const bool pass = worst_path <= 0.10 && worst_irf <= 0.10;
        return std::make_pair(
            pass, fmt("J in {10,20,30,40}: volatility-path deviation %.3f (gate 0.10), "
                      "irf-median deviation %.3f sd (gate 0.10)",
                      worst_path, worst_irf));
    });

    // --- byte-level determinism through the command line --------------------
    criterion("determinism", [] {
        const fs::path dir = fs::temp_directory_path() /
                             ("rshock-accept-" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
        const std::string log = (dir / "run.log").string();

        const std::string sim = (dir / "sim").string();
        if (run_cli("simulate --out " + sim + " --periods 240 --series 4 --events 5 --seed 17",
                    log) != 0) {
            return std::make_pair(false, "simulate failed: " + slurp(log));
        }
        const std::string common =
            "estimate --panel " + sim + "/panel.csv --events " + sim +
            "/events.csv --horizons 4 --components 8 --burnin 200 --draws 210 --thin 3 "
            "--target-columns 'stress_*' --ref-horizon 2 --seed 11 --out ";
        const std::string serial = (dir / "serial").string();
        const std::string parallel = (dir / "parallel").string();
        const std::string replay = (dir / "replay").string();
        if (run_cli(common + serial + " --threads 1", log) != 0) {
            return std::make_pair(false, "serial estimate failed: " + slurp(log));
        }
        if (run_cli(common + parallel + " --threads 4", log) != 0) {
            return std::make_pair(false, "parallel estimate failed: " + slurp(log));
        }
        if (run_cli("estimate --from-manifest " + serial + "/manifest.json --out " + replay,
                    log) != 0) {
            return std::make_pair(false, "manifest replay failed: " + slurp(log));
        }

        int identical = 0, total = 0;
        std::string mismatched;
        for (const char* name :
             {"irf.csv", "commonality.csv", "factor_events.csv", "nonevent_prob.csv"}) {
            const std::string reference = slurp(serial + "/" + name);
            for (const std::string& other : {parallel, replay}) {
                ++total;
                if (slurp(other + "/" + name) == reference && !reference.empty()) {
                    ++identical;
                } else {
                    mismatched += std::string(" ") + name;
                }
            }
        }
        fs::remove_all(dir);
        const bool pass = identical == total;
        return std::make_pair(pass, fmt("%d/%d files byte-identical across threads and "
                                        "manifest replay%s%s",
                                        identical, total, pass ? "" : "; mismatched:",
                                        mismatched.c_str()));
    });

    std::printf("%s: %d criterion(s) failed, %.0fs total\n", failures == 0 ? "OK" : "FAILED",
                failures, seconds_since(suite_start));
    return failures;
}
