#pragma once

// Expected number of arrivals (occupancy counts, time 0 included) at every
// state of a walk graph, for a given start.
//
// Barrier values y solve u y = Q, where column j of u collects what a unit of
// occupancy at barrier j sends back to itself or on to its neighbours: an
// excursion from barrier j onto an interval either returns or crosses, and an
// excursion onto an outward-drift half-line returns with probability q/p.
// Edge states are then closed-form in y.

#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>
#include <barrier_walk/kernels.hpp>

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace barrier_walk {

namespace arrival_detail {

// rho^e g_a g_b / g_c, reflecting when rho^c would overflow.
inline double scaled_product_ratio(long long e, long long a, long long b, long long c, double rho) {
    if (kernel_detail::overflow_risk(std::max({a, b, c}), rho)) {
        const double inv = 1.0 / rho;
        return std::pow(rho, static_cast<double>(e + a + b - c - 1)) * geom_sum(a, inv) *
               geom_sum(b, inv) / geom_sum(c, inv);
    }
    return std::pow(rho, static_cast<double>(e)) * geom_sum(a, rho) * geom_sum(b, rho) / geom_sum(c, rho);
}

} // namespace arrival_detail

struct ArrivalSystem {
    DenseSystem system; // u y = Q
    Position start;     // canonical form
};

inline ArrivalSystem assemble(const WalkGraph& graph, const StartPosition& start) {
    const auto canonical = canonical_position(graph, start);
    const std::size_t size = graph.barrier_count();
    ArrivalSystem out{DenseSystem(size), canonical};
    auto& u = out.system;

    for (const auto& barrier : graph.barriers) {
        const auto i = static_cast<std::size_t>(barrier.id);
        u.at(i, i) += barrier.stay - 1.0;
    }
    for (const auto& edge : graph.intervals) {
        const auto a = static_cast<std::size_t>(edge.from);
        const auto b = static_cast<std::size_t>(edge.to);
        const long long n = edge.n();
        const double rho = edge.rho();
        const double up = graph.move_prob(edge.from, edge.to);
        const double down = graph.move_prob(edge.to, edge.from);
        u.at(b, a) += power_ratio(n, n + 1, rho) * up;
        u.at(a, b) += geom_ratio(1, n + 1, rho) * down;
        u.at(a, a) += geom_ratio(n, n + 1, rho) * up;
        u.at(b, b) += hit_upper(n, n, rho) * down;
    }
    for (const auto& line : graph.halflines) {
        const auto i = static_cast<std::size_t>(line.owner);
        const double move = graph.halfline_move_prob(line.owner, line.label);
        u.at(i, i) += line.escaping() ? move * line.q / line.p : move;
    }

    std::visit(
        [&graph, &u](const auto& pos) {
            using T = std::decay_t<decltype(pos)>;
            if constexpr (std::is_same_v<T, AtBarrier>) {
                u.rhs[static_cast<std::size_t>(pos.id)] = -1.0;
            } else if constexpr (std::is_same_v<T, OnInterval>) {
                const auto& edge = graph.interval(pos.from, pos.to);
                const long long n = edge.n();
                const double rho = edge.rho();
                u.rhs[static_cast<std::size_t>(pos.from)] = -geom_ratio(n + 1 - pos.position, n + 1, rho);
                u.rhs[static_cast<std::size_t>(pos.to)] = -hit_upper(pos.position, n, rho);
            } else {
                const auto& line = graph.halfline(pos.owner, pos.label);
                u.rhs[static_cast<std::size_t>(pos.owner)] =
                    line.escaping() ? -std::pow(line.q / line.p, pos.position) : -1.0;
            }
        },
        canonical);
    return out;
}

/// Tiny negatives (>= -1e-12) are float noise and clamp to zero; anything
/// more negative means the assembly is inconsistent.
inline void clamp_nonnegative(std::vector<double>& values, const char* what) {
    for (auto& v : values) {
        if (v < 0.0) {
            if (v < -1e-12) {
                throw Error(ErrorCode::InternalConsistency,
                            std::string(what) + " has negative entry " + std::to_string(v));
            }
            v = 0.0;
        }
    }
}

inline std::vector<double> solve_y(const ArrivalSystem& system) {
    auto y = linear_solve(system.system);
    clamp_nonnegative(y, "arrival vector");
    return y;
}

/// x_k on one interval edge, k in 1..n.
struct IntervalOccupancy {
    long long n = 1;
    double p = 0.5;
    double q = 0.5;
    double from_coef = 0.0; // (p*_{[from,to]} / p) y_from
    double to_coef = 0.0;   // (p*_{[to,from]} / q) y_to
    std::optional<long long> start;

    double operator()(long long k) const {
        if (k < 1 || k > n) {
            throw Error(ErrorCode::InvalidStart, "interval state " + std::to_string(k) + " outside 1..n");
        }
        const double rho = p / q;
        double x = geom_ratio(k, n + 1, rho) * to_coef + hit_upper(n + 1 - k, n, rho) * from_coef;
        if (start) {
            const long long i0 = *start;
            if (k <= i0) {
                x += arrival_detail::scaled_product_ratio(0, k, n + 1 - i0, n + 1, rho) / q;
            } else {
                x += arrival_detail::scaled_product_ratio(k - i0, i0, n + 1 - k, n + 1, rho) / q;
            }
        }
        return x;
    }
};

/// x_k on one half-line, k >= 1.
struct HalfLineOccupancy {
    double p = 0.5;
    double q = 0.5;
    double coef = 0.0; // (p*_{[owner,label)} / p) y_owner
    std::optional<long long> start;

    double operator()(long long k) const {
        if (k < 1) {
            throw Error(ErrorCode::InvalidStart, "half-line state must be >= 1");
        }
        const double rho = p / q;
        const bool escaping = p > q;
        double x = escaping ? coef : coef * std::pow(rho, static_cast<double>(k));
        if (start && *start > 0) {
            const long long i0 = *start;
            const long long j = std::min(k, i0);
            if (escaping) {
                // rho^{-i0} g_j(rho) = rho^{j-1-i0} g_j(1/rho)
                x += std::pow(rho, static_cast<double>(j - 1 - i0)) * geom_sum(j, 1.0 / rho) / q;
            } else if (k <= i0) {
                x += geom_sum(k, rho) / q;
            } else {
                x += std::pow(rho, static_cast<double>(k - i0)) * geom_sum(i0, rho) / q;
            }
        }
        return x;
    }
};

class ArrivalProfile {
public:
    ArrivalProfile(WalkGraph graph, StartPosition start)
        : graph_(std::move(graph)), start_(std::move(start)) {
        require_valid(graph_);
        auto system = assemble(graph_, start_);
        canonical_start_ = system.start;
        y_ = solve_y(system);
    }

    const WalkGraph& graph() const noexcept { return graph_; }
    const StartPosition& start() const noexcept { return start_; }
    const std::vector<double>& y() const noexcept { return y_; }
    double y(BarrierId id) const { return y_.at(static_cast<std::size_t>(id)); }

    IntervalOccupancy interval_evaluator(BarrierId from, BarrierId to) const {
        const auto& edge = graph_.interval(from, to);
        IntervalOccupancy eval;
        eval.n = edge.n();
        eval.p = edge.p;
        eval.q = edge.q;
        eval.from_coef = graph_.move_prob(edge.from, edge.to) / edge.p * y(edge.from);
        eval.to_coef = graph_.move_prob(edge.to, edge.from) / edge.q * y(edge.to);
        if (const auto* on = std::get_if<OnInterval>(&canonical_start_)) {
            if (on->from == edge.from && on->to == edge.to) {
                eval.start = on->position;
            }
        }
        return eval;
    }

    HalfLineOccupancy halfline_evaluator(BarrierId owner, int label) const {
        const auto& line = graph_.halfline(owner, label);
        HalfLineOccupancy eval;
        eval.p = line.p;
        eval.q = line.q;
        eval.coef = graph_.halfline_move_prob(owner, label) / line.p * y(owner);
        if (const auto* on = std::get_if<OnHalfLine>(&canonical_start_)) {
            if (on->owner == owner && on->label == label) {
                eval.start = on->position;
            }
        }
        return eval;
    }

    double x_interval(BarrierId from, BarrierId to, long long k) const {
        return interval_evaluator(from, to)(k);
    }

    double x_halfline(BarrierId owner, int label, long long k) const {
        return halfline_evaluator(owner, label)(k);
    }

    /// Expected arrivals at any state, barriers included.
    double occupancy(const Position& position) const {
        const auto canonical = canonical_position(graph_, position);
        if (const auto* at = std::get_if<AtBarrier>(&canonical)) {
            return y(at->id);
        }
        if (const auto* on = std::get_if<OnInterval>(&canonical)) {
            return x_interval(on->from, on->to, on->position);
        }
        const auto& on = std::get<OnHalfLine>(canonical);
        return x_halfline(on.owner, on.label, on.position);
    }

private:
    WalkGraph graph_;
    StartPosition start_;
    Position canonical_start_;
    std::vector<double> y_;
};

inline ArrivalProfile arrival_profile(const WalkGraph& graph, const StartPosition& start) {
    return ArrivalProfile(graph, start);
}

/// Probability of ever occupying `to` when starting at `from`: x_{from,to} / x_{to,to}.
inline double visit_probability(const WalkGraph& graph, const Position& from, const Position& to) {
    const auto source = canonical_position(graph, from);
    const auto target = canonical_position(graph, to);
    if (source == target) {
        return 1.0;
    }
    const double reach = ArrivalProfile(graph, source).occupancy(target);
    const double self = ArrivalProfile(graph, target).occupancy(target);
    double f = reach / self;
    if (f > 1.0 && f < 1.0 + 1e-9) {
        f = 1.0;
    }
    if (f < 0.0 || f > 1.0) {
        throw Error(ErrorCode::InternalConsistency, "visit probability " + std::to_string(f) + " outside [0,1]");
    }
    return f;
}

} // namespace barrier_walk
