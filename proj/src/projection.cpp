#include "rshock/projection.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "rshock/common.hpp"
#include "rshock/stats.hpp"

namespace rshock {

namespace {

HorizonResult estimate_one(const Panel& panel, const EventCalendar& events, int h,
                           const EstimationSettings& settings) {
    const HorizonPanel hpanel = difference_horizon(panel, h);
    HorizonResult result;
    result.horizon = h;
    result.scale = compute_scale(hpanel);
    result.origin = hpanel.origin;

    // chain row r covers base days r+1 .. r+1+h, so the event day e sits
    // at row e-1; events too close to the sample end drop out here
    std::vector<Eigen::Index> event_rows;
    for (Eigen::Index id = 0; id < events.size(); ++id) {
        const Eigen::Index row = events.event_indices[static_cast<std::size_t>(id)] - 1;
        if (row >= 0 && row < hpanel.rows()) {
            event_rows.push_back(row);
            result.event_ids.push_back(id);
        }
    }
    const ChainData data = make_chain_data(hpanel, result.scale, std::move(event_rows));

    ChainConfig config = settings.chain;
    config.seed = derive_stream_seed(settings.chain.seed, static_cast<std::uint64_t>(h));
    result.draws = run_chain(data, settings.mixture, settings.factor, settings.restriction,
                             config);
    return result;
}

bool glob_match(const char* pattern, const char* text) {
    for (; *pattern != '\0'; ++pattern) {
        if (*pattern == '*') {
            while (*(pattern + 1) == '*') ++pattern;
            for (const char* t = text;; ++t) {
                if (glob_match(pattern + 1, t)) return true;
                if (*t == '\0') return false;
            }
        }
        if (*text == '\0' || (*pattern != '?' && *pattern != *text)) return false;
        ++text;
    }
    return *text == '\0';
}

}  // namespace

std::vector<HorizonResult> estimate_all(const Panel& panel, const EventCalendar& events,
                                        int max_horizon, const EstimationSettings& settings) {
    if (max_horizon < 0) throw ValidationError("estimate: negative horizon");
    if (max_horizon > panel.rows() - 2) {
        throw ValidationError("estimate: horizon " + std::to_string(max_horizon) +
                              " exceeds the sample");
    }
    if (events.size() < 1) throw ValidationError("estimate: no events");
    const Panel base = panel.demeaned ? panel : demean(panel);

    const int n = max_horizon + 1;
    std::vector<HorizonResult> results(static_cast<std::size_t>(n));
    const int workers = std::max(1, std::min(settings.threads, n));

    if (workers == 1) {
        for (int h = 0; h < n; ++h) {
            try {
                results[static_cast<std::size_t>(h)] = estimate_one(base, events, h, settings);
            } catch (const ChainError& err) {
                throw ChainError("horizon " + std::to_string(h) + ": " + err.what());
            }
        }
        return results;
    }

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(n));
    auto work = [&]() {
        for (;;) {
            const int h = next.fetch_add(1);
            if (h >= n) return;
            try {
                results[static_cast<std::size_t>(h)] = estimate_one(base, events, h, settings);
            } catch (const ChainError& err) {
                failures[static_cast<std::size_t>(h)] = std::make_exception_ptr(
                    ChainError("horizon " + std::to_string(h) + ": " + err.what()));
            } catch (...) {
                failures[static_cast<std::size_t>(h)] = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& thread : pool) thread.join();
    for (const auto& failure : failures) {
        if (failure) std::rethrow_exception(failure);
    }
    return results;
}

Eigen::MatrixXd commonality_draws(const Draws& draws, const ScaleMatrix& scale) {
    Eigen::MatrixXd out(draws.retained(), draws.loadings.cols());
    for (Eigen::Index k = 0; k < draws.retained(); ++k) {
        out.row(k) =
            commonality(draws.loadings.row(k).transpose(), draws.min_var[k], scale.col_var)
                .transpose();
    }
    return out;
}

Eigen::VectorXd compute_commonalities(const Draws& draws, const ScaleMatrix& scale) {
    const Eigen::MatrixXd shares = commonality_draws(draws, scale);
    return column_quantiles(shares, {0.5}).row(0).transpose();
}

double default_ref_magnitude(const Panel& panel, const std::vector<Eigen::Index>& target_columns) {
    if (target_columns.empty()) throw ValidationError("normalize: no target columns");
    Eigen::VectorXd avg = Eigen::VectorXd::Zero(panel.rows());
    for (Eigen::Index c : target_columns) {
        if (c < 0 || c >= panel.cols()) {
            throw ValidationError("normalize: target column out of range");
        }
        avg += panel.values.col(c);
    }
    avg /= static_cast<double>(target_columns.size());
    return std::sqrt(sample_variance(avg));
}

IrfResult normalize_shock(const std::vector<HorizonResult>& results,
                          const SignRestriction& restriction, int ref_horizon,
                          double ref_magnitude, bool scaled_factors,
                          const std::vector<double>& levels) {
    if (results.empty()) throw ValidationError("normalize: no horizon results");
    if (!(ref_magnitude > 0.0)) throw ValidationError("normalize: ref magnitude must be positive");
    const HorizonResult* ref = nullptr;
    for (const auto& result : results) {
        if (result.horizon == ref_horizon) ref = &result;
    }
    if (ref == nullptr) {
        throw ValidationError("normalize: reference horizon " + std::to_string(ref_horizon) +
                              " was not estimated");
    }
    const Eigen::Index retained = ref->draws.retained();
    for (const auto& result : results) {
        if (result.draws.retained() != retained) {
            throw ValidationError("normalize: horizons disagree on retained draw count");
        }
    }
    if (restriction.target_columns.empty()) {
        throw ValidationError("normalize: no target columns");
    }

    IrfResult out;
    out.levels = levels;
    out.ref_horizon = ref_horizon;
    out.ref_magnitude = ref_magnitude;
    out.scaled_factors = scaled_factors;

    // per-draw scale pinning the target-column mean loading at the
    // reference horizon to direction * ref_magnitude
    out.scale_factors = Eigen::VectorXd::Constant(retained,
                                                  std::numeric_limits<double>::quiet_NaN());
    std::vector<Eigen::Index> kept;
    for (Eigen::Index k = 0; k < retained; ++k) {
        double target_mean = 0.0;
        for (Eigen::Index c : restriction.target_columns) {
            target_mean += ref->draws.loadings(k, c);
        }
        target_mean /= static_cast<double>(restriction.target_columns.size());
        if (std::abs(target_mean) < 1e-12) continue;
        out.scale_factors[k] = restriction.direction * ref_magnitude / target_mean;
        kept.push_back(k);
    }
    out.dropped_draws = static_cast<int>(retained - static_cast<Eigen::Index>(kept.size()));
    if (kept.empty()) throw ChainError("normalize: every draw has a zero target mean");

    for (const auto& result : results) {
        out.horizons.push_back(result.horizon);
        Eigen::MatrixXd scaled(static_cast<Eigen::Index>(kept.size()),
                               result.draws.loadings.cols());
        for (std::size_t row = 0; row < kept.size(); ++row) {
            const Eigen::Index k = kept[row];
            scaled.row(static_cast<Eigen::Index>(row)) =
                result.draws.loadings.row(k) * out.scale_factors[k];
        }
        out.irf.push_back(column_quantiles(scaled, levels));
        out.commonality.push_back(compute_commonalities(result.draws, result.scale));
        out.factor_event_ids.push_back(result.event_ids);
    }
    out.factor_quantiles =
        factor_at_events(results, levels, scaled_factors ? &out.scale_factors : nullptr);
    return out;
}

std::vector<Eigen::MatrixXd> factor_at_events(const std::vector<HorizonResult>& results,
                                              const std::vector<double>& levels,
                                              const Eigen::VectorXd* scale_factors) {
    std::vector<Eigen::MatrixXd> out;
    out.reserve(results.size());
    for (const auto& result : results) {
        const Eigen::MatrixXd& factors = result.draws.factors;
        if (factors.cols() == 0) {
            out.emplace_back(static_cast<Eigen::Index>(levels.size()), 0);
            continue;
        }
        if (scale_factors == nullptr) {
            out.push_back(column_quantiles(factors, levels));
            continue;
        }
        if (scale_factors->size() != factors.rows()) {
            throw ValidationError("factor quantiles: scale vector length mismatch");
        }
        std::vector<Eigen::Index> kept;
        for (Eigen::Index k = 0; k < factors.rows(); ++k) {
            if (std::isfinite((*scale_factors)[k])) kept.push_back(k);
        }
        Eigen::MatrixXd scaled(static_cast<Eigen::Index>(kept.size()), factors.cols());
        for (std::size_t row = 0; row < kept.size(); ++row) {
            const Eigen::Index k = kept[row];
            // factor in shock units: y = (kappa*lambda) * (f/kappa)
            scaled.row(static_cast<Eigen::Index>(row)) = factors.row(k) / (*scale_factors)[k];
        }
        out.push_back(column_quantiles(scaled, levels));
    }
    return out;
}

std::vector<Eigen::Index> match_columns(const std::vector<std::string>& labels,
                                        const std::string& pattern) {
    std::vector<Eigen::Index> out;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (glob_match(pattern.c_str(), labels[i].c_str())) {
            out.push_back(static_cast<Eigen::Index>(i));
        }
    }
    if (out.empty()) {
        throw ValidationError("no series label matches pattern '" + pattern + "'");
    }
    return out;
}

}  // namespace rshock
