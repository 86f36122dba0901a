#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

#include "rshock/common.hpp"

namespace rshock {

// Daily panel of M series on a shared trading-day calendar. Immutable
// after construction; safe to share across threads for reading.
struct Panel {
    std::vector<Date> dates;           // strictly increasing
    Eigen::MatrixXd values;            // T x M, no missing cells
    std::vector<std::string> labels;   // M
    bool demeaned = false;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

struct IngestOptions {
    // Forward-fill gaps, then drop leading rows that are still incomplete.
    // Strict mode refuses any missing cell instead.
    bool strict_missing = false;
};

// Reads a `date,<label>,...` CSV. Rows are sorted by date; missing cells
// are resolved per `options`.
Panel load_panel(std::istream& in, const IngestOptions& options = {});
Panel load_panel_file(const std::string& path, const IngestOptions& options = {});

// Subtracts each column's mean. Idempotent.
Panel demean(const Panel& panel);

// Ruling-day calendar resolved against a panel: row indices plus labels.
struct EventCalendar {
    std::vector<Eigen::Index> event_indices;  // sorted, distinct rows of the panel
    std::vector<std::string> labels;          // one per event
    std::vector<std::string> remarks;         // e.g. non-trading-day remappings

    Eigen::Index size() const { return static_cast<Eigen::Index>(event_indices.size()); }
};

// Reads a `date,label` CSV and maps every event onto a panel row. An event
// on a non-trading day maps to the next trading day; duplicate resolved
// dates collapse into a single event with merged labels.
EventCalendar load_events(std::istream& in, const Panel& panel);
EventCalendar load_events_file(const std::string& path, const Panel& panel);

// Overlapping h-step changes y[t+h] - y[t-1], one row per feasible base
// day t = 1..T-1-h (0-based).
struct HorizonPanel {
    int horizon = 0;
    Eigen::MatrixXd values;              // (T-1-h) x M
    std::vector<Eigen::Index> origin;    // base-panel row of each entry's day t

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

HorizonPanel difference_horizon(const Panel& panel, int h);

// Diagonal of the known scaling matrix: per-column empirical variances
// (denominator n-1) of the panel it was computed from.
struct ScaleMatrix {
    Eigen::VectorXd col_var;
};

ScaleMatrix compute_scale(const HorizonPanel& hpanel);

}  // namespace rshock
