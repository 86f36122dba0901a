#pragma once

#include <string>
#include <vector>

#include "rshock/projection.hpp"
#include "rshock/synthetic.hpp"

namespace rshock {

// Everything cmd_estimate needs; serialized to manifest.json so a run
// can be reproduced bit-exactly.
struct EstimateRun {
    std::string panel_path;
    std::string events_path;
    std::string out_dir;
    int horizons = 60;
    std::string mode = "mixture";  // mixture | naive | both
    int components = 30;
    int burnin = 2000;
    int draws = 3000;
    int thin = 3;
    std::uint64_t seed = 1;
    std::string target_columns = "*";
    int ref_horizon = 10;
    double ref_magnitude = 0.0;  // 0 = derive from the panel
    std::string variant = "coherent";            // coherent | verbatim
    std::string mh_statistic = "as_printed";     // as_printed | dirichlet_w
    int direction = -1;
    bool strict_missing = false;
    bool scaled_factors = false;
    int threads = 1;  // never affects results
};

struct RunDiagnostics {
    std::vector<double> accept_rate;       // per horizon
    std::vector<long> numerical_rejects;   // per horizon
    std::vector<int> events_present;       // per horizon
    double resolved_ref_magnitude = 0.0;
    std::vector<std::string> target_labels;
    int dropped_draws = 0;
};

// Long-format writers. All files are UTF-8 CSV with `.`-decimal doubles
// in shortest round-trip form.
void write_irf_csv(const std::string& path, const IrfResult& irf,
                   const std::vector<std::string>& labels);
void write_commonality_csv(const std::string& path, const IrfResult& irf,
                           const std::vector<std::string>& labels);
void write_factor_csv(const std::string& path, const IrfResult& irf,
                      const Panel& panel, const EventCalendar& events);
void write_nonevent_csv(const std::string& path, const std::vector<HorizonResult>& results,
                        const Panel& panel);

void write_manifest(const std::string& path, const EstimateRun& run,
                    const RunDiagnostics& diag);
EstimateRun load_manifest(const std::string& path);

// Synthetic data serialization.
void write_panel_csv(const std::string& path, const Panel& panel);
void write_events_csv(const std::string& path, const Panel& panel, const EventCalendar& events);
void write_truth_json(const std::string& path, const SyntheticSpec& spec, const GroundTruth& truth);
SyntheticSpec load_spec_json(const std::string& path);

}  // namespace rshock
