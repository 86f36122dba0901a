#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rshock/oracle.hpp"
#include "rshock/projection.hpp"
#include "rshock/report.hpp"
#include "rshock/stats.hpp"
#include "rshock/synthetic.hpp"

namespace {

using namespace rshock;

namespace fs = std::filesystem;

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("RULING_SHOCK_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return 1;
}

Mode parse_mode(const std::string& text) {
    return text == "naive" ? Mode::Naive : Mode::Mixture;
}

EstimationSettings build_settings(const EstimateRun& run, const std::string& mode,
                                  const std::vector<Eigen::Index>& targets, int threads) {
    EstimationSettings settings;
    settings.mixture.components = run.components;
    settings.restriction.target_columns = targets;
    settings.restriction.direction = run.direction;
    settings.chain.burnin = run.burnin;
    settings.chain.draws = run.draws;
    settings.chain.thin = run.thin;
    settings.chain.seed = run.seed;
    settings.chain.mode = parse_mode(mode);
    settings.chain.variant =
        run.variant == "verbatim" ? VarianceUpdate::Verbatim : VarianceUpdate::Coherent;
    settings.chain.mh_statistic = run.mh_statistic == "dirichlet_w"
                                      ? IntensityStatistic::DirichletWeights
                                      : IntensityStatistic::AllocationProbs;
    settings.threads = threads;
    return settings;
}

void write_outputs(const std::string& out_dir, const std::string& suffix,
                   const std::vector<HorizonResult>& results, const IrfResult& irf,
                   const Panel& panel, const EventCalendar& events) {
    const auto path = [&](const char* stem) {
        return (fs::path(out_dir) / (stem + suffix + ".csv")).string();
    };
    write_irf_csv(path("irf"), irf, panel.labels);
    write_commonality_csv(path("commonality"), irf, panel.labels);
    write_factor_csv(path("factor_events"), irf, panel, events);
    write_nonevent_csv(path("nonevent_prob"), results, panel);
}

int run_estimate(EstimateRun run, int threads) {
    fs::create_directories(run.out_dir);
    const std::string manifest_path = (fs::path(run.out_dir) / "manifest.json").string();
    write_manifest(manifest_path, run, RunDiagnostics{});  // config echo before results

    IngestOptions ingest;
    ingest.strict_missing = run.strict_missing;
    const Panel panel = load_panel_file(run.panel_path, ingest);
    const EventCalendar events = load_events_file(run.events_path, panel);
    for (std::size_t e = 0; e < events.remarks.size(); ++e) {
        if (!events.remarks[e].empty()) {
            std::fprintf(stderr, "note: event %zu: %s\n", e + 1, events.remarks[e].c_str());
        }
    }

    const std::vector<Eigen::Index> targets = match_columns(panel.labels, run.target_columns);
    const double ref_magnitude =
        run.ref_magnitude > 0.0 ? run.ref_magnitude : default_ref_magnitude(panel, targets);

    RunDiagnostics diag;
    diag.resolved_ref_magnitude = ref_magnitude;
    for (Eigen::Index c : targets) {
        diag.target_labels.push_back(panel.labels[static_cast<std::size_t>(c)]);
    }

    const bool both = run.mode == "both";
    const std::vector<std::string> passes =
        both ? std::vector<std::string>{"mixture", "naive"} : std::vector<std::string>{run.mode};
    for (const auto& pass : passes) {
        const EstimationSettings settings = build_settings(run, pass, targets, threads);
        const std::vector<HorizonResult> results =
            estimate_all(panel, events, run.horizons, settings);
        const IrfResult irf =
            normalize_shock(results, settings.restriction, run.ref_horizon, ref_magnitude,
                            run.scaled_factors);
        const double retained = static_cast<double>(results.front().draws.retained());
        if (irf.dropped_draws > 0.01 * retained) {
            std::fprintf(stderr, "warning: %s pass dropped %d of %d draws (zero target mean)\n",
                         pass.c_str(), irf.dropped_draws, static_cast<int>(retained));
        }
        const std::string suffix = both && pass == "naive" ? "_naive" : "";
        write_outputs(run.out_dir, suffix, results, irf, panel, events);
        if (pass == passes.front()) {
            for (const auto& result : results) {
                diag.accept_rate.push_back(result.draws.accept_rate);
                diag.numerical_rejects.push_back(result.draws.numerical_rejects);
                diag.events_present.push_back(static_cast<int>(result.event_ids.size()));
            }
            diag.dropped_draws = irf.dropped_draws;
        }
        std::printf("%s: %d horizons, %d events, %d retained draws per horizon\n", pass.c_str(),
                    run.horizons + 1, static_cast<int>(events.size()),
                    static_cast<int>(retained));
    }

    write_manifest(manifest_path, run, diag);
    std::printf("wrote %s\n", run.out_dir.c_str());
    return 0;
}

int run_simulate(const SyntheticSpec& spec, const std::string& out_dir,
                 const std::string& sweep, const EstimateRun& sweep_run, int threads) {
    fs::create_directories(out_dir);
    const SyntheticData data = generate(spec);
    write_panel_csv((fs::path(out_dir) / "panel.csv").string(), data.panel);
    write_events_csv((fs::path(out_dir) / "events.csv").string(), data.panel, data.events);
    write_truth_json((fs::path(out_dir) / "truth.json").string(), spec, data.truth);
    std::printf("wrote synthetic panel: %d days, %d series, %d events\n",
                static_cast<int>(data.panel.rows()), static_cast<int>(data.panel.cols()),
                static_cast<int>(data.events.size()));
    if (sweep.empty()) return 0;

    // one chain per component cap at the sweep horizon
    std::vector<int> caps;
    for (const auto& token : CLI::detail::split(sweep, ',')) {
        caps.push_back(std::stoi(token));
    }
    const std::vector<Eigen::Index> targets =
        match_columns(data.panel.labels, sweep_run.target_columns);
    std::ofstream table((fs::path(out_dir) / "sweep.csv").string(), std::ios::binary);
    table << "components,mean_nonempty,median_min_var,accept_rate\n";
    for (int cap : caps) {
        EstimateRun run = sweep_run;
        run.components = cap;
        const EstimationSettings settings = build_settings(run, "mixture", targets, threads);
        const std::vector<HorizonResult> results =
            estimate_all(data.panel, data.events, sweep_run.horizons, settings);
        const Draws& draws = results.front().draws;
        const double mean_nonempty =
            draws.nonempty_count.cast<double>().mean();
        std::vector<double> var_draws(draws.min_var.data(),
                                      draws.min_var.data() + draws.min_var.size());
        table << cap << ',' << format_double(mean_nonempty) << ','
              << format_double(quantile(var_draws, 0.5)) << ','
              << format_double(draws.accept_rate) << '\n';
        std::printf("J=%d: mean non-empty clusters %.2f\n", cap, mean_nonempty);
    }
    std::printf("wrote %s\n", (fs::path(out_dir) / "sweep.csv").string().c_str());
    return 0;
}

int run_check(const CheckOptions& options) {
    const std::vector<CheckResult> results = analytic_check(options);
    bool all_pass = true;
    for (const auto& result : results) {
        std::printf("%s  %-20s %s\n", result.pass ? "PASS" : "FAIL", result.name.c_str(),
                    result.detail.c_str());
        all_pass = all_pass && result.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ruling-shock estimator: mixture-identified event factors and local projections"};
    app.set_version_flag("--version", rshock::kVersion);
    app.require_subcommand(1);

    // estimate
    auto* est = app.add_subcommand("estimate", "estimate IRFs from a panel and event calendar");
    EstimateRun run;
    std::string from_manifest;
    int threads_flag = 0;
    bool out_given = false;
    est->add_option("--panel", run.panel_path, "panel CSV (date,<label>,...)");
    est->add_option("--events", run.events_path, "event CSV (date,label)");
    est->add_option("--horizons", run.horizons, "maximum horizon H")->capture_default_str();
    est->add_option("--mode", run.mode, "mixture|naive|both")->capture_default_str()
        ->check(CLI::IsMember({"mixture", "naive", "both"}));
    est->add_option("--components", run.components, "maximum mixture components J")->capture_default_str();
    est->add_option("--burnin", run.burnin, "burn-in iterations")->capture_default_str();
    est->add_option("--draws", run.draws, "post burn-in iterations")->capture_default_str();
    est->add_option("--thin", run.thin, "keep every thin-th draw")->capture_default_str();
    est->add_option("--seed", run.seed, "chain seed")->capture_default_str();
    est->add_option("--target-columns", run.target_columns,
                    "glob over series labels for the sign/scale target")->capture_default_str();
    est->add_option("--ref-horizon", run.ref_horizon, "normalization horizon")->capture_default_str();
    est->add_option("--ref-magnitude", run.ref_magnitude,
                    "normalization magnitude (0: std of target average)")->capture_default_str();
    est->add_option("--out", run.out_dir, "output directory")->capture_default_str()
        ->each([&](const std::string&) { out_given = true; });
    est->add_option("--variant", run.variant, "variance update: coherent|verbatim")->capture_default_str()
        ->check(CLI::IsMember({"coherent", "verbatim"}));
    est->add_option("--mh-statistic", run.mh_statistic,
                    "intensity MH statistic: as_printed|dirichlet_w")->capture_default_str()
        ->check(CLI::IsMember({"as_printed", "dirichlet_w"}));
    est->add_option("--direction", run.direction, "sign restriction direction (-1 or 1)")->capture_default_str()
        ->check(CLI::IsMember({-1, 1}));
    est->add_flag("--strict-missing", run.strict_missing, "refuse missing panel cells");
    est->add_flag("--scaled-factors", run.scaled_factors,
                  "report event factors in shock units");
    est->add_option("--threads", threads_flag,
                    "worker cap (default: RULING_SHOCK_THREADS or 1)");
    est->add_option("--from-manifest", from_manifest, "re-run the configuration of a manifest");

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a ground-truth synthetic panel");
    std::string spec_path, sim_out = ".", sweep;
    int periods = 1500, series = 20, events = 12;
    std::uint64_t sim_seed = 7;
    bool markov = false;
    double markov_stay = 0.95;
    EstimateRun sweep_run;
    sweep_run.horizons = 0;
    sweep_run.target_columns = "*";
    sim->add_option("--spec", spec_path, "synthetic spec JSON");
    sim->add_option("--out", sim_out, "output directory")->capture_default_str();
    sim->add_option("--periods", periods, "daily changes to generate")->capture_default_str();
    sim->add_option("--series", series, "number of series")->capture_default_str();
    sim->add_option("--events", events, "number of ruling days")->capture_default_str();
    sim->add_option("--seed", sim_seed, "generator seed")->capture_default_str();
    sim->add_flag("--markov", markov, "persistent regimes instead of i.i.d. days");
    sim->add_option("--markov-stay", markov_stay, "regime stay probability")->capture_default_str();
    sim->add_option("--components-sweep", sweep,
                    "comma-separated J values; estimates each and tabulates non-empty counts");
    sim->add_option("--burnin", sweep_run.burnin, "sweep chain burn-in")->capture_default_str();
    sim->add_option("--draws", sweep_run.draws, "sweep chain draws")->capture_default_str();
    sim->add_option("--thin", sweep_run.thin, "sweep chain thinning")->capture_default_str();
    sim->add_option("--sweep-horizon", sweep_run.horizons, "horizon for the sweep")->capture_default_str();
    sim->add_option("--target-columns", sweep_run.target_columns, "sweep sign target")->capture_default_str();
    sim->add_option("--threads", threads_flag, "worker cap");

    // check
    auto* chk = app.add_subcommand("check", "run the sampler-vs-oracle self-test suite");
    CheckOptions check_options;
    chk->add_option("--draws", check_options.draws, "Monte Carlo draws per check")->capture_default_str();
    chk->add_option("--seed", check_options.seed, "oracle suite seed")->capture_default_str();
    chk->add_flag("--full", check_options.full_mh, "long stationary-distribution MH check");
    chk->add_option("--corrupt", check_options.corrupt,
                    "test fixture: perturb the named check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& err) {
        return app.exit(err);
    } catch (const CLI::CallForVersion& err) {
        return app.exit(err);
    } catch (const CLI::ParseError& err) {
        app.exit(err);
        return 2;
    }

    try {
        if (est->parsed()) {
            if (!from_manifest.empty()) {
                const std::string out_override = run.out_dir;
                run = load_manifest(from_manifest);
                if (out_given) run.out_dir = out_override;
            } else if (run.panel_path.empty() || run.events_path.empty()) {
                std::fprintf(stderr, "error: --panel and --events are required\n");
                return 2;
            }
            return run_estimate(run, resolve_threads(threads_flag));
        }
        if (sim->parsed()) {
            SyntheticSpec spec;
            if (!spec_path.empty()) {
                spec = load_spec_json(spec_path);
            } else {
                spec = reference_spec(periods, series, events, sim_seed);
                spec.markov = markov;
                spec.markov_stay = markov_stay;
            }
            return run_simulate(spec, sim_out, sweep, sweep_run, resolve_threads(threads_flag));
        }
        return run_check(check_options);
    } catch (const ChainError& err) {
        std::fprintf(stderr, "chain error: %s\n", err.what());
        return 3;
    } catch (const std::exception& err) {
        std::fprintf(stderr, "error: %s\n", err.what());
        return 2;
    }
}
