#include "rshock/report.hpp"

#include <chrono>
#include <ctime>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rshock/common.hpp"

namespace rshock {

namespace {

using Json = nlohmann::ordered_json;

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);  // binary: byte-stable newlines
    if (!out) throw ValidationError("cannot write '" + path + "'");
    return out;
}

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

Json vector_json(const Eigen::VectorXd& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
    return out;
}

Eigen::VectorXd vector_from(const Json& j) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(j.size()));
    Eigen::Index i = 0;
    for (const auto& x : j) out[i++] = x.get<double>();
    return out;
}

}  // namespace

void write_irf_csv(const std::string& path, const IrfResult& irf,
                   const std::vector<std::string>& labels) {
    auto out = open_out(path);
    out << "variable,horizon,level,value\n";
    for (std::size_t j = 0; j < labels.size(); ++j) {
        for (std::size_t hi = 0; hi < irf.horizons.size(); ++hi) {
            const Eigen::MatrixXd& q = irf.irf[hi];
            for (std::size_t li = 0; li < irf.levels.size(); ++li) {
                out << labels[j] << ',' << irf.horizons[hi] << ','
                    << format_double(irf.levels[li]) << ','
                    << format_double(q(static_cast<Eigen::Index>(li),
                                       static_cast<Eigen::Index>(j)))
                    << '\n';
            }
        }
    }
}

void write_commonality_csv(const std::string& path, const IrfResult& irf,
                           const std::vector<std::string>& labels) {
    auto out = open_out(path);
    out << "variable,horizon,value\n";
    for (std::size_t j = 0; j < labels.size(); ++j) {
        for (std::size_t hi = 0; hi < irf.horizons.size(); ++hi) {
            out << labels[j] << ',' << irf.horizons[hi] << ','
                << format_double(irf.commonality[hi][static_cast<Eigen::Index>(j)]) << '\n';
        }
    }
}

void write_factor_csv(const std::string& path, const IrfResult& irf,
                      const Panel& panel, const EventCalendar& events) {
    auto out = open_out(path);
    out << "event,date,horizon,level,value\n";
    for (std::size_t hi = 0; hi < irf.horizons.size(); ++hi) {
        const Eigen::MatrixXd& q = irf.factor_quantiles[hi];
        const auto& ids = irf.factor_event_ids[hi];
        for (std::size_t e = 0; e < ids.size(); ++e) {
            const Eigen::Index id = ids[e];
            const Date date =
                panel.dates[static_cast<std::size_t>(events.event_indices[static_cast<std::size_t>(id)])];
            for (std::size_t li = 0; li < irf.levels.size(); ++li) {
                out << (id + 1) << ',' << format_date(date) << ',' << irf.horizons[hi] << ','
                    << format_double(irf.levels[li]) << ','
                    << format_double(q(static_cast<Eigen::Index>(li),
                                       static_cast<Eigen::Index>(e)))
                    << '\n';
            }
        }
    }
}

void write_nonevent_csv(const std::string& path, const std::vector<HorizonResult>& results,
                        const Panel& panel) {
    auto out = open_out(path);
    out << "date,horizon,probability\n";
    for (const auto& result : results) {
        for (Eigen::Index r = 0; r < result.draws.nonevent_prob.size(); ++r) {
            const Date date = panel.dates[static_cast<std::size_t>(result.origin[static_cast<std::size_t>(r)])];
            out << format_date(date) << ',' << result.horizon << ','
                << format_double(result.draws.nonevent_prob[r]) << '\n';
        }
    }
}

void write_manifest(const std::string& path, const EstimateRun& run,
                    const RunDiagnostics& diag) {
    Json j;
    j["version"] = kVersion;
    j["created"] = timestamp_utc();
    Json r;
    r["panel"] = run.panel_path;
    r["events"] = run.events_path;
    r["out"] = run.out_dir;
    r["horizons"] = run.horizons;
    r["mode"] = run.mode;
    r["components"] = run.components;
    r["burnin"] = run.burnin;
    r["draws"] = run.draws;
    r["thin"] = run.thin;
    r["seed"] = run.seed;
    r["target_columns"] = run.target_columns;
    r["ref_horizon"] = run.ref_horizon;
    r["ref_magnitude"] = run.ref_magnitude;
    r["variant"] = run.variant;
    r["mh_statistic"] = run.mh_statistic;
    r["direction"] = run.direction;
    r["strict_missing"] = run.strict_missing;
    r["scaled_factors"] = run.scaled_factors;
    r["threads"] = run.threads;
    j["run"] = std::move(r);
    Json d;
    d["resolved_ref_magnitude"] = diag.resolved_ref_magnitude;
    d["target_labels"] = diag.target_labels;
    d["dropped_draws"] = diag.dropped_draws;
    d["accept_rate"] = diag.accept_rate;
    d["numerical_rejects"] = diag.numerical_rejects;
    d["events_present"] = diag.events_present;
    j["diagnostics"] = std::move(d);

    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

EstimateRun load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open manifest '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& err) {
        throw ParseError("manifest: " + std::string(err.what()));
    }
    if (!j.contains("run")) throw ParseError("manifest: missing 'run' section");
    const Json& r = j["run"];
    EstimateRun run;
    try {
        run.panel_path = r.at("panel").get<std::string>();
        run.events_path = r.at("events").get<std::string>();
        run.out_dir = r.at("out").get<std::string>();
        run.horizons = r.at("horizons").get<int>();
        run.mode = r.at("mode").get<std::string>();
        run.components = r.at("components").get<int>();
        run.burnin = r.at("burnin").get<int>();
        run.draws = r.at("draws").get<int>();
        run.thin = r.at("thin").get<int>();
        run.seed = r.at("seed").get<std::uint64_t>();
        run.target_columns = r.at("target_columns").get<std::string>();
        run.ref_horizon = r.at("ref_horizon").get<int>();
        run.ref_magnitude = r.at("ref_magnitude").get<double>();
        run.variant = r.at("variant").get<std::string>();
        run.mh_statistic = r.at("mh_statistic").get<std::string>();
        run.direction = r.at("direction").get<int>();
        run.strict_missing = r.at("strict_missing").get<bool>();
        run.scaled_factors = r.at("scaled_factors").get<bool>();
        run.threads = r.at("threads").get<int>();
    } catch (const std::exception& err) {
        throw ParseError("manifest: " + std::string(err.what()));
    }
    return run;
}

void write_panel_csv(const std::string& path, const Panel& panel) {
    auto out = open_out(path);
    out << "date";
    for (const auto& label : panel.labels) out << ',' << label;
    out << '\n';
    for (Eigen::Index r = 0; r < panel.rows(); ++r) {
        out << format_date(panel.dates[static_cast<std::size_t>(r)]);
        for (Eigen::Index c = 0; c < panel.cols(); ++c) {
            out << ',' << format_double(panel.values(r, c));
        }
        out << '\n';
    }
}

void write_events_csv(const std::string& path, const Panel& panel, const EventCalendar& events) {
    auto out = open_out(path);
    out << "date,label\n";
    for (Eigen::Index e = 0; e < events.size(); ++e) {
        const Date date =
            panel.dates[static_cast<std::size_t>(events.event_indices[static_cast<std::size_t>(e)])];
        out << format_date(date) << ',' << events.labels[static_cast<std::size_t>(e)] << '\n';
    }
}

void write_truth_json(const std::string& path, const SyntheticSpec& spec,
                      const GroundTruth& truth) {
    Json j;
    j["regime"] = truth.regime;
    j["event_indices"] = truth.event_indices;
    j["loadings"] = vector_json(truth.loadings);
    j["factors"] = vector_json(truth.factors);
    j["col_scale"] = vector_json(truth.col_scale);
    j["regime_var"] = vector_json(truth.regime_var);
    Json s;
    s["periods"] = spec.periods;
    s["series"] = spec.series;
    s["regime_var"] = vector_json(spec.regime_var);
    s["regime_weights"] = vector_json(spec.regime_weights);
    s["markov"] = spec.markov;
    s["markov_stay"] = spec.markov_stay;
    s["event_indices"] = spec.event_indices;
    s["loadings"] = vector_json(spec.loadings);
    s["factors"] = vector_json(spec.factors);
    s["col_scale"] = vector_json(spec.col_scale);
    s["seed"] = spec.seed;
    j["spec"] = std::move(s);
    auto out = open_out(path);
    out << j.dump(2) << '\n';
}

SyntheticSpec load_spec_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open spec '" + path + "'");
    Json j;
    try {
        j = Json::parse(in);
    } catch (const std::exception& err) {
        throw ParseError("spec: " + std::string(err.what()));
    }
    const int periods = j.value("periods", 1500);
    const int series = j.value("series", 20);
    int events = j.value("events", 12);
    if (j.contains("event_indices")) events = static_cast<int>(j["event_indices"].size());
    const std::uint64_t seed = j.value("seed", std::uint64_t{7});

    SyntheticSpec spec = reference_spec(periods, series, events, seed);
    if (j.contains("regime_var")) spec.regime_var = vector_from(j["regime_var"]);
    if (j.contains("regime_weights")) spec.regime_weights = vector_from(j["regime_weights"]);
    if (j.contains("markov")) spec.markov = j["markov"].get<bool>();
    if (j.contains("markov_stay")) spec.markov_stay = j["markov_stay"].get<double>();
    if (j.contains("event_indices")) {
        spec.event_indices = j["event_indices"].get<std::vector<int>>();
    }
    if (j.contains("loadings")) spec.loadings = vector_from(j["loadings"]);
    if (j.contains("factors")) spec.factors = vector_from(j["factors"]);
    if (j.contains("col_scale")) spec.col_scale = vector_from(j["col_scale"]);
    validate(spec);
    return spec;
}

}  // namespace rshock
