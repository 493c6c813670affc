#pragma once

// Expected number of steps before absorption. An absorption draw ends the
// walk without a step; every other transition, stays included, is one step.

#include <barrier_walk/arrivals.hpp>
#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>
#include <barrier_walk/kernels.hpp>

#include <optional>
#include <string>
#include <vector>

namespace barrier_walk {

class TimeReport {
public:
    bool finite() const noexcept { return finite_; }
    const std::string& reason() const noexcept { return reason_; }
    const std::optional<EndId>& offending() const noexcept { return offending_; }

    const std::vector<double>& n() const {
        require_finite();
        return n_;
    }
    double n(BarrierId id) const { return n().at(static_cast<std::size_t>(id)); }

    /// m_k on interval [from,to], k in 0..n+1 (the ends are the barrier times).
    double m_interval(BarrierId from, BarrierId to, long long k) const {
        require_finite();
        const auto& edge = graph_.interval(from, to);
        const long long size = edge.n();
        if (k < 0 || k > size + 1) {
            throw Error(ErrorCode::InvalidStart, "interval state " + std::to_string(k) + " outside 0..n+1");
        }
        const double rho = edge.rho();
        return geom_ratio(size + 1 - k, size + 1, rho) * n(edge.from) + hit_upper(k, size, rho) * n(edge.to) +
               exit_time(k, size, rho, edge.q);
    }

    /// m_k on a half-line with p < q: n_owner + k / (q - p).
    double m_halfline(BarrierId owner, int label, long long k) const {
        require_finite();
        const auto& line = graph_.halfline(owner, label);
        if (line.p >= line.q) {
            throw Error(ErrorCode::InfiniteTime, "half-line [" + std::to_string(owner) + "," +
                                                     std::to_string(label) + ") has rho >= 1");
        }
        if (k < 0) {
            throw Error(ErrorCode::InvalidStart, "half-line state must be >= 0");
        }
        return n(owner) + static_cast<double>(k) / (line.q - line.p);
    }

    /// Why the time from `position` is infinite, or empty when it is finite.
    /// A state on a half-line with p >= q is infinite even when no barrier
    /// enters that half-line.
    std::string infinite_reason(const Position& position) const {
        if (!finite_) {
            return reason_;
        }
        const auto canonical = canonical_position(graph_, position);
        if (const auto* on = std::get_if<OnHalfLine>(&canonical)) {
            const auto& line = graph_.halfline(on->owner, on->label);
            if (line.p >= line.q) {
                return "state " + describe(canonical) + " lies on a half-line with rho = " +
                       std::to_string(line.rho()) + " >= 1";
            }
        }
        return {};
    }

    double time_at(const Position& position) const {
        const auto canonical = canonical_position(graph_, position);
        if (const auto* at = std::get_if<AtBarrier>(&canonical)) {
            return n(at->id);
        }
        if (const auto* on = std::get_if<OnInterval>(&canonical)) {
            return m_interval(on->from, on->to, on->position);
        }
        const auto& on = std::get<OnHalfLine>(canonical);
        return m_halfline(on.owner, on.label, on.position);
    }

    const WalkGraph& graph() const noexcept { return graph_; }

private:
    friend TimeReport time_report(const WalkGraph& graph);

    void require_finite() const {
        if (!finite_) {
            throw Error(ErrorCode::InfiniteTime, reason_);
        }
    }

    WalkGraph graph_;
    bool finite_ = true;
    std::string reason_;
    std::optional<EndId> offending_;
    std::vector<double> n_;
};

/// Assembles v n = Lambda from the barrier recursion
///   n_i = stay n_i + (1 - s_i) + sum p* m_1 (or m_n) + sum_{half-lines} p* m_1
/// and solves it. Infinite when any entered half-line has p >= q.
inline TimeReport time_report(const WalkGraph& graph) {
    require_valid(graph);
    TimeReport report;
    report.graph_ = graph;

    for (const auto& line : graph.halflines) {
        if (line.p >= line.q && graph.halfline_move_prob(line.owner, line.label) > 0.0) {
            report.finite_ = false;
            report.offending_ = EndId{line.owner, line.label};
            report.reason_ = "half-line [" + std::to_string(line.owner) + "," + std::to_string(line.label) +
                             ") is entered with positive probability and has rho = " +
                             std::to_string(line.rho()) + " >= 1";
            return report;
        }
    }

    const std::size_t size = graph.barrier_count();
    DenseSystem v(size);
    for (const auto& barrier : graph.barriers) {
        const auto i = static_cast<std::size_t>(barrier.id);
        v.at(i, i) += barrier.stay - 1.0;
        v.rhs[i] = -(1.0 - barrier.absorb);
    }
    for (const auto& edge : graph.intervals) {
        const auto a = static_cast<std::size_t>(edge.from);
        const auto b = static_cast<std::size_t>(edge.to);
        const long long n = edge.n();
        const double rho = edge.rho();
        const double up = graph.move_prob(edge.from, edge.to);
        const double down = graph.move_prob(edge.to, edge.from);
        v.at(a, b) += power_ratio(n, n + 1, rho) * up;
        v.at(b, a) += geom_ratio(1, n + 1, rho) * down;
        v.at(a, a) += geom_ratio(n, n + 1, rho) * up;
        v.at(b, b) += hit_upper(n, n, rho) * down;
        v.rhs[a] -= up * weighted_ratio(n, rho) / edge.q;
        v.rhs[b] -= down * cumulative_ratio(n, rho) / edge.q;
    }
    for (const auto& line : graph.halflines) {
        const double move = graph.halfline_move_prob(line.owner, line.label);
        if (move == 0.0) {
            continue;
        }
        const auto i = static_cast<std::size_t>(line.owner);
        v.at(i, i) += move;
        v.rhs[i] -= move / (line.q - line.p);
    }

    report.n_ = linear_solve(v);
    clamp_nonnegative(report.n_, "barrier time vector");
    return report;
}

} // namespace barrier_walk
