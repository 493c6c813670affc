#pragma once

// Analytic summary of a document, Monte Carlo side-by-side rows, and the JSON
// shapes the command-line tool prints.

#include <barrier_walk/absorption.hpp>
#include <barrier_walk/arrivals.hpp>
#include <barrier_walk/document.hpp>
#include <barrier_walk/graph.hpp>
#include <barrier_walk/monte_carlo.hpp>
#include <barrier_walk/time.hpp>

#include <json.hpp>

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace barrier_walk {

struct Analysis {
    ArrivalProfile arrivals;
    AbsorptionReport absorption;
    TimeReport time;
    std::vector<std::pair<Position, double>> states; // requested x values
    std::vector<std::pair<Position, std::optional<double>>> state_times; // nullopt: infinite
};

inline Analysis analyze(const GraphDocument& doc, const std::vector<Position>& states = {}) {
    ArrivalProfile arrivals(doc.graph, doc.start);
    auto absorption = absorption_report(arrivals);
    auto time = time_report(doc.graph);
    Analysis out{std::move(arrivals), std::move(absorption), std::move(time), {}, {}};
    for (const auto& state : states) {
        out.states.emplace_back(state, out.arrivals.occupancy(state));
        if (out.time.finite()) {
            out.state_times.emplace_back(state, out.time.infinite_reason(state).empty()
                                                    ? std::optional<double>(out.time.time_at(state))
                                                    : std::nullopt);
        }
    }
    return out;
}

/// Expected time from the document's start, when finite.
inline std::optional<double> start_time(const Analysis& analysis) {
    if (!analysis.time.infinite_reason(analysis.arrivals.start()).empty()) {
        return std::nullopt;
    }
    return analysis.time.time_at(analysis.arrivals.start());
}

inline nlohmann::json analysis_json(const Analysis& a) {
    using nlohmann::json;
    json out;
    out["y"] = a.arrivals.y();
    json x = json::object();
    for (const auto& [state, value] : a.states) {
        x[describe(state)] = value;
    }
    out["x"] = std::move(x);
    json ends = json::array();
    for (const auto& [end, prob] : a.absorption.per_end) {
        ends.push_back({{"owner", end.owner}, {"label", end.label}, {"prob", prob}});
    }
    out["absorption"] = {{"barriers", a.absorption.per_barrier},
                         {"ends", std::move(ends)},
                         {"total_mfb", a.absorption.total_mfb},
                         {"total_ends", a.absorption.total_ends()}};
    if (const auto start = start_time(a)) {
        json m = json::object();
        for (const auto& [state, value] : a.state_times) {
            m[describe(state)] = value ? json(*value) : json("infinite");
        }
        out["time"] = {{"n", a.time.n()}, {"start", *start}, {"m", std::move(m)}};
    } else {
        out["time"] = "infinite";
        out["reason"] = a.time.infinite_reason(a.arrivals.start());
    }
    return out;
}

inline nlohmann::json estimate_json(const SimEstimate& e) {
    return {{"mean", e.mean}, {"stderr", e.std_error}, {"count", e.count}};
}

inline nlohmann::json simulation_json(const SimReport& r, const std::vector<Position>& states) {
    using nlohmann::json;
    json out;
    json y = json::array();
    for (const auto& e : r.y) {
        y.push_back(estimate_json(e));
    }
    out["y"] = std::move(y);
    json x = json::object();
    for (std::size_t i = 0; i < states.size(); ++i) {
        x[describe(states[i])] = estimate_json(r.x[i]);
    }
    out["x"] = std::move(x);
    json barriers = json::array();
    for (const auto& e : r.absorbed_barrier) {
        barriers.push_back(estimate_json(e));
    }
    json ends = json::array();
    for (const auto& [end, e] : r.absorbed_end) {
        auto row = estimate_json(e);
        row["owner"] = end.owner;
        row["label"] = end.label;
        ends.push_back(std::move(row));
    }
    out["absorption"] = {{"barriers", std::move(barriers)}, {"ends", std::move(ends)}};
    out["time"] = r.time ? estimate_json(*r.time) : json(nullptr);
    out["time_reliable"] = r.time_reliable;
    out["censored_fraction"] = r.censored_fraction;
    out["resample_events"] = r.resample_events;
    out["trajectories"] = r.trajectories;
    return out;
}

struct ComparisonRow {
    std::string quantity;
    double analytic = 0.0;
    double estimate = 0.0;
    double std_error = 0.0;
    double z = 0.0;
};

/// z-score of an analytic value against an estimate. A zero standard error
/// with matching values (deterministic outcomes) scores 0.
inline double z_score(double analytic, const SimEstimate& e) {
    const double diff = e.mean - analytic;
    if (e.std_error > 0.0) {
        return diff / e.std_error;
    }
    if (std::abs(diff) <= 1e-9 * (1.0 + std::abs(analytic))) {
        return 0.0;
    }
    return diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
}

inline ComparisonRow make_row(std::string quantity, double analytic, const SimEstimate& e) {
    return {std::move(quantity), analytic, e.mean, e.std_error, z_score(analytic, e)};
}

/// Every quantity both sides can produce: y, tracked x, absorption per sink,
/// and the start time when it is finite and the simulation did not truncate.
inline std::vector<ComparisonRow> comparison_rows(const Analysis& a, const SimReport& r,
                                                  const std::vector<Position>& states) {
    std::vector<ComparisonRow> rows;
    for (std::size_t i = 0; i < r.y.size(); ++i) {
        rows.push_back(make_row("y[" + std::to_string(i) + "]", a.arrivals.y()[i], r.y[i]));
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        rows.push_back(make_row("x[" + describe(states[i]) + "]", a.arrivals.occupancy(states[i]), r.x[i]));
    }
    for (std::size_t i = 0; i < r.absorbed_barrier.size(); ++i) {
        rows.push_back(
            make_row("absorb barrier " + std::to_string(i), a.absorption.per_barrier[i], r.absorbed_barrier[i]));
    }
    for (const auto& [end, e] : r.absorbed_end) {
        rows.push_back(make_row("absorb end [" + std::to_string(end.owner) + "," + std::to_string(end.label) + ")",
                                a.absorption.per_end.at(end), e));
    }
    if (const auto t = start_time(a); t && r.time && r.time_reliable) {
        rows.push_back(make_row("time", *t, *r.time));
    }
    return rows;
}

inline bool rows_agree(const std::vector<ComparisonRow>& rows, double limit = 5.0) {
    for (const auto& row : rows) {
        if (!(std::abs(row.z) <= limit)) {
            return false;
        }
    }
    return true;
}

inline nlohmann::json rows_json(const std::vector<ComparisonRow>& rows) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& row : rows) {
        out.push_back({{"quantity", row.quantity},
                       {"analytic", row.analytic},
                       {"estimate", row.estimate},
                       {"stderr", row.std_error},
                       {"z", std::isfinite(row.z) ? nlohmann::json(row.z) : nlohmann::json(row.z > 0 ? "inf" : "-inf")}});
    }
    return out;
}

} // namespace barrier_walk
