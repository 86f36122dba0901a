#include "rshock/panel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <limits>
#include <sstream>

namespace rshock {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    for (;;) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

// Reads lines, tolerating trailing \r and skipping blank lines.
bool next_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) return true;
    }
    return false;
}

double parse_cell(const std::string& cell, int row, const std::string& label, bool& missing) {
    const std::string t = trim(cell);
    if (t.empty()) {
        missing = true;
        return std::numeric_limits<double>::quiet_NaN();
    }
    missing = false;
    char* end = nullptr;
    const double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size() || !std::isfinite(v)) {
        throw ParseError("row " + std::to_string(row) + ", column '" + label +
                         "': unreadable value '" + t + "'");
    }
    return v;
}

}  // namespace

Panel load_panel(std::istream& in, const IngestOptions& options) {
    std::string line;
    if (!next_line(in, line)) throw ParseError("panel: empty input");
    auto header = split_csv(line);
    if (header.size() < 2 || trim(header[0]) != "date") {
        throw ParseError("panel: header must be date,<label>,...");
    }
    std::vector<std::string> labels;
    for (std::size_t c = 1; c < header.size(); ++c) {
        const std::string label = trim(header[c]);
        if (label.empty()) throw ParseError("panel: empty series label in header");
        if (std::find(labels.begin(), labels.end(), label) != labels.end()) {
            throw ValidationError("panel: duplicate series label '" + label + "'");
        }
        labels.push_back(label);
    }
    const std::size_t m = labels.size();

    struct Row {
        Date date;
        std::vector<double> cells;
        std::vector<char> missing;
    };
    std::vector<Row> rows;
    int lineno = 1;
    while (next_line(in, line)) {
        ++lineno;
        auto fields = split_csv(line);
        if (fields.size() != m + 1) {
            throw ParseError("panel: row " + std::to_string(lineno) + " has " +
                             std::to_string(fields.size()) + " fields, expected " +
                             std::to_string(m + 1));
        }
        Row row;
        try {
            row.date = parse_date(trim(fields[0]));
        } catch (const ParseError& err) {
            throw ParseError("panel: row " + std::to_string(lineno) + ": " + err.what());
        }
        row.cells.resize(m);
        row.missing.resize(m);
        for (std::size_t c = 0; c < m; ++c) {
            bool miss = false;
            row.cells[c] = parse_cell(fields[c + 1], lineno, labels[c], miss);
            row.missing[c] = miss ? 1 : 0;
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ValidationError("panel: no data rows");

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) { return a.date < b.date; });
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].date == rows[r - 1].date) {
            throw ValidationError("panel: duplicate date " + format_date(rows[r].date));
        }
    }

    for (std::size_t c = 0; c < m; ++c) {
        int observed = 0;
        for (const auto& row : rows) observed += row.missing[c] ? 0 : 1;
        if (observed < 2) {
            throw ValidationError("panel: column '" + labels[c] +
                                  "' has fewer than 2 observations");
        }
    }

    if (options.strict_missing) {
        for (std::size_t r = 0; r < rows.size(); ++r) {
            for (std::size_t c = 0; c < m; ++c) {
                if (rows[r].missing[c]) {
                    throw ValidationError("panel: missing value at " + format_date(rows[r].date) +
                                          ", column '" + labels[c] + "' (strict mode)");
                }
            }
        }
    } else {
        // forward-fill, then drop leading rows that remain incomplete
        for (std::size_t c = 0; c < m; ++c) {
            bool seen = false;
            double last = 0.0;
            for (auto& row : rows) {
                if (!row.missing[c]) {
                    seen = true;
                    last = row.cells[c];
                } else if (seen) {
                    row.cells[c] = last;
                    row.missing[c] = 0;
                }
            }
        }
        std::size_t first_full = 0;
        while (first_full < rows.size() &&
               std::any_of(rows[first_full].missing.begin(), rows[first_full].missing.end(),
                           [](char f) { return f != 0; })) {
            ++first_full;
        }
        rows.erase(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(first_full));
        if (rows.empty()) throw ValidationError("panel: no complete rows after forward-fill");
    }

    Panel panel;
    panel.labels = std::move(labels);
    panel.dates.reserve(rows.size());
    panel.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(m));
    for (std::size_t r = 0; r < rows.size(); ++r) {
        panel.dates.push_back(rows[r].date);
        for (std::size_t c = 0; c < m; ++c) {
            panel.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r].cells[c];
        }
    }
    return panel;
}

Panel load_panel_file(const std::string& path, const IngestOptions& options) {
    std::ifstream in(path);
    if (!in) throw ValidationError("panel: cannot open '" + path + "'");
    return load_panel(in, options);
}

Panel demean(const Panel& panel) {
    Panel out = panel;
    const Eigen::RowVectorXd means = panel.values.colwise().mean();
    out.values = panel.values.rowwise() - means;
    out.demeaned = true;
    return out;
}

EventCalendar load_events(std::istream& in, const Panel& panel) {
    std::string line;
    if (!next_line(in, line)) throw ValidationError("events: empty input");
    auto header = split_csv(line);
    if (header.empty() || trim(header[0]) != "date") {
        throw ParseError("events: header must be date,label");
    }

    struct Entry {
        Eigen::Index index;
        std::string label;
        std::string remark;
    };
    std::vector<Entry> entries;
    int lineno = 1;
    while (next_line(in, line)) {
        ++lineno;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw ParseError("events: row " + std::to_string(lineno) + " has no label field");
        }
        Date date;
        try {
            date = parse_date(trim(line.substr(0, comma)));
        } catch (const ParseError& err) {
            throw ParseError("events: row " + std::to_string(lineno) + ": " + err.what());
        }
        const std::string label = trim(line.substr(comma + 1));

        // next trading day on or after the event date
        const auto it = std::lower_bound(panel.dates.begin(), panel.dates.end(), date);
        if (it == panel.dates.end()) {
            throw ValidationError("events: '" + label + "' on " + format_date(date) +
                                  " falls after the last panel date");
        }
        Entry entry;
        entry.index = static_cast<Eigen::Index>(it - panel.dates.begin());
        entry.label = label;
        if (*it != date) {
            entry.remark = format_date(date) + " is not a trading day; mapped to " +
                           format_date(*it);
        }
        entries.push_back(std::move(entry));
    }
    if (entries.empty()) throw ValidationError("events: no events listed");

    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& a, const Entry& b) { return a.index < b.index; });

    EventCalendar calendar;
    for (auto& entry : entries) {
        if (!calendar.event_indices.empty() && calendar.event_indices.back() == entry.index) {
            // same resolved trading day: one event, merged labels
            if (!entry.label.empty()) {
                auto& merged = calendar.labels.back();
                if (!merged.empty()) merged += "; ";
                merged += entry.label;
            }
            if (!entry.remark.empty()) {
                auto& remark = calendar.remarks.back();
                if (!remark.empty()) remark += "; ";
                remark += entry.remark;
            }
            continue;
        }
        calendar.event_indices.push_back(entry.index);
        calendar.labels.push_back(std::move(entry.label));
        calendar.remarks.push_back(std::move(entry.remark));
    }
    return calendar;
}

EventCalendar load_events_file(const std::string& path, const Panel& panel) {
    std::ifstream in(path);
    if (!in) throw ValidationError("events: cannot open '" + path + "'");
    return load_events(in, panel);
}

HorizonPanel difference_horizon(const Panel& panel, int h) {
    const Eigen::Index t = panel.rows();
    if (h < 0) throw ValidationError("difference_horizon: negative horizon");
    if (h >= t - 1) {
        throw ValidationError("difference_horizon: horizon " + std::to_string(h) +
                              " needs more than " + std::to_string(t) + " rows");
    }
    HorizonPanel out;
    out.horizon = h;
    const Eigen::Index rows = t - 1 - h;
    out.values.resize(rows, panel.cols());
    out.origin.reserve(static_cast<std::size_t>(rows));
    for (Eigen::Index r = 0; r < rows; ++r) {
        out.values.row(r) = panel.values.row(r + 1 + h) - panel.values.row(r);
        out.origin.push_back(r + 1);
    }
    return out;
}

ScaleMatrix compute_scale(const HorizonPanel& hpanel) {
    if (hpanel.rows() < 2) throw ValidationError("scale: need at least 2 rows");
    ScaleMatrix scale;
    scale.col_var.resize(hpanel.cols());
    for (Eigen::Index c = 0; c < hpanel.cols(); ++c) {
        const auto col = hpanel.values.col(c);
        const double mean = col.mean();
        const double var = (col.array() - mean).square().sum() /
                           static_cast<double>(hpanel.rows() - 1);
        if (!(var > 0.0)) {
            throw ValidationError("scale: column " + std::to_string(c + 1) +
                                  " has zero variance");
        }
        scale.col_var[c] = var;
    }
    return scale;
}

}  // namespace rshock
