#pragma once

// Graph model: multiple-function barriers joined by finite interval edges,
// plus half-lines hanging off individual barriers.

#include <barrier_walk/error.hpp>

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <type_traits>
#include <utility>
#include <variant>
#include <vector>

namespace barrier_walk {

using BarrierId = int;

inline constexpr double kProbabilityTolerance = 1e-12;

/// Chain of `interior_states` states between barriers `from` < `to`.
/// States are numbered 1..n from `from` toward `to`; p steps toward `to`.
struct IntervalEdge {
    BarrierId from = 0;
    BarrierId to = 0;
    int interior_states = 1;
    double p = 0.5;
    double q = 0.5;

    double r() const noexcept { return 1.0 - p - q; }
    double rho() const noexcept { return p / q; }
    int n() const noexcept { return interior_states; }

    bool operator==(const IntervalEdge&) const = default;
};

/// Infinite chain 1, 2, ... attached to `owner`; p steps away from the owner.
struct HalfLine {
    BarrierId owner = 0;
    int label = 1;
    double p = 0.5;
    double q = 0.5;

    double r() const noexcept { return 1.0 - p - q; }
    double rho() const noexcept { return p / q; }
    /// Outward drift: the end of the half-line can absorb.
    bool escaping() const noexcept { return p > q; }

    bool operator==(const HalfLine&) const = default;
};

struct Barrier {
    BarrierId id = 0;
    double stay = 0.0;
    double absorb = 0.0;
    std::map<BarrierId, double> interval_moves;
    std::map<int, double> halfline_moves;

    double outgoing() const noexcept {
        double total = 0.0;
        for (const auto& [_, prob] : interval_moves) {
            total += prob;
        }
        for (const auto& [_, prob] : halfline_moves) {
            total += prob;
        }
        return total;
    }

    bool operator==(const Barrier&) const = default;
};

struct AtBarrier {
    BarrierId id = 0;
    bool operator==(const AtBarrier&) const = default;
};

/// Position 0 is barrier `from`, position n+1 is barrier `to`.
struct OnInterval {
    BarrierId from = 0;
    BarrierId to = 1;
    int position = 0;
    bool operator==(const OnInterval&) const = default;
};

/// Position 0 is the owner barrier.
struct OnHalfLine {
    BarrierId owner = 0;
    int label = 1;
    int position = 0;
    bool operator==(const OnHalfLine&) const = default;
};

/// Any state of the walk. Used both as a start position and as a query point.
using Position = std::variant<AtBarrier, OnInterval, OnHalfLine>;
using StartPosition = Position;

struct EndId {
    BarrierId owner = 0;
    int label = 1;
    auto operator<=>(const EndId&) const = default;
};

struct WalkGraph {
    std::vector<Barrier> barriers;
    std::vector<IntervalEdge> intervals;
    std::vector<HalfLine> halflines;

    std::size_t barrier_count() const noexcept { return barriers.size(); }

    bool has_barrier(BarrierId id) const noexcept {
        return id >= 0 && static_cast<std::size_t>(id) < barriers.size();
    }

    /// Interval between a and b in either orientation.
    const IntervalEdge* find_interval(BarrierId a, BarrierId b) const noexcept {
        if (a > b) {
            std::swap(a, b);
        }
        for (const auto& edge : intervals) {
            if (edge.from == a && edge.to == b) {
                return &edge;
            }
        }
        return nullptr;
    }

    const HalfLine* find_halfline(BarrierId owner, int label) const noexcept {
        for (const auto& line : halflines) {
            if (line.owner == owner && line.label == label) {
                return &line;
            }
        }
        return nullptr;
    }

    const IntervalEdge& interval(BarrierId a, BarrierId b) const {
        if (const auto* edge = find_interval(a, b)) {
            return *edge;
        }
        throw Error(ErrorCode::UnknownEdge,
                    "no interval edge [" + std::to_string(a) + "," + std::to_string(b) + "]");
    }

    const HalfLine& halfline(BarrierId owner, int label) const {
        if (const auto* line = find_halfline(owner, label)) {
            return *line;
        }
        throw Error(ErrorCode::UnknownEdge,
                    "no half-line [" + std::to_string(owner) + "," + std::to_string(label) + ")");
    }

    /// p*_{[from,to]}: probability that barrier `from` steps onto the edge toward `to`.
    double move_prob(BarrierId from, BarrierId to) const {
        const auto& moves = barriers.at(static_cast<std::size_t>(from)).interval_moves;
        auto it = moves.find(to);
        return it == moves.end() ? 0.0 : it->second;
    }

    /// p*_{[owner,label)}.
    double halfline_move_prob(BarrierId owner, int label) const {
        const auto& moves = barriers.at(static_cast<std::size_t>(owner)).halfline_moves;
        auto it = moves.find(label);
        return it == moves.end() ? 0.0 : it->second;
    }

    bool operator==(const WalkGraph&) const = default;
};

struct Violation {
    ErrorCode code;
    std::string element;
    std::string message;
};

struct ValidationOutcome {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

namespace detail {

inline std::string barrier_name(BarrierId id) { return "barrier " + std::to_string(id); }

inline std::string interval_name(BarrierId from, BarrierId to) {
    return "interval [" + std::to_string(from) + "," + std::to_string(to) + "]";
}

inline std::string halfline_name(BarrierId owner, int label) {
    return "half-line [" + std::to_string(owner) + "," + std::to_string(label) + ")";
}

inline bool valid_step_pair(double p, double q) {
    return std::isfinite(p) && std::isfinite(q) && p > 0.0 && q > 0.0 &&
           p + q <= 1.0 + kProbabilityTolerance;
}

} // namespace detail

inline ValidationOutcome validate(const WalkGraph& graph) {
    ValidationOutcome out;
    auto report = [&out](ErrorCode code, std::string element, std::string message) {
        out.violations.push_back({code, std::move(element), std::move(message)});
    };

    if (graph.barriers.empty()) {
        report(ErrorCode::Structure, "graph", "at least one barrier is required");
    }

    for (std::size_t i = 0; i < graph.barriers.size(); ++i) {
        const auto& barrier = graph.barriers[i];
        const auto name = detail::barrier_name(barrier.id);
        if (barrier.id != static_cast<BarrierId>(i)) {
            report(ErrorCode::Structure, name,
                   "barrier ids must be dense 0..N; expected id " + std::to_string(i));
        }

        bool negative = barrier.stay < 0.0 || barrier.absorb < 0.0 || !std::isfinite(barrier.stay) ||
                        !std::isfinite(barrier.absorb);
        for (const auto& [_, prob] : barrier.interval_moves) {
            negative = negative || prob < 0.0 || !std::isfinite(prob);
        }
        for (const auto& [_, prob] : barrier.halfline_moves) {
            negative = negative || prob < 0.0 || !std::isfinite(prob);
        }
        const double total = barrier.stay + barrier.absorb + barrier.outgoing();
        if (negative) {
            report(ErrorCode::BarrierSum, name, "probabilities must be finite and nonnegative");
        } else if (std::abs(total - 1.0) > kProbabilityTolerance) {
            report(ErrorCode::BarrierSum, name,
                   "stay + absorb + moves sums to " + std::to_string(total) + ", expected 1");
        }

        for (const auto& [target, _] : barrier.interval_moves) {
            if (target == barrier.id) {
                report(ErrorCode::Structure, name, "interval move onto itself");
            } else if (graph.find_interval(barrier.id, target) == nullptr) {
                report(ErrorCode::DanglingReference, name,
                       "move toward barrier " + std::to_string(target) + " has no interval edge");
            }
        }
        for (const auto& [label, _] : barrier.halfline_moves) {
            if (graph.find_halfline(barrier.id, label) == nullptr) {
                report(ErrorCode::DanglingReference, name,
                       "move onto " + detail::halfline_name(barrier.id, label) + " which does not exist");
            }
        }
    }

    std::set<std::pair<BarrierId, BarrierId>> seen_pairs;
    for (const auto& edge : graph.intervals) {
        const auto name = detail::interval_name(edge.from, edge.to);
        if (!graph.has_barrier(edge.from) || !graph.has_barrier(edge.to)) {
            report(ErrorCode::DanglingReference, name, "endpoint barrier does not exist");
        }
        if (edge.from >= edge.to) {
            report(ErrorCode::Structure, name, "requires from < to");
        }
        if (!seen_pairs.emplace(edge.from, edge.to).second) {
            report(ErrorCode::Structure, name, "duplicate interval edge");
        }
        if (edge.interior_states < 1) {
            report(ErrorCode::Structure, name, "interior_states must be >= 1");
        }
        if (!detail::valid_step_pair(edge.p, edge.q)) {
            report(ErrorCode::EdgeParam, name, "requires p > 0, q > 0, p + q <= 1");
        }
    }

    std::set<std::pair<BarrierId, int>> seen_lines;
    for (const auto& line : graph.halflines) {
        const auto name = detail::halfline_name(line.owner, line.label);
        if (!graph.has_barrier(line.owner)) {
            report(ErrorCode::DanglingReference, name, "owner barrier does not exist");
        }
        if (line.label < 1) {
            report(ErrorCode::Structure, name, "label must be positive");
        }
        if (!seen_lines.emplace(line.owner, line.label).second) {
            report(ErrorCode::Structure, name, "duplicate half-line");
        }
        if (!detail::valid_step_pair(line.p, line.q)) {
            report(ErrorCode::EdgeParam, name, "requires p > 0, q > 0, p + q <= 1");
        }
    }
    return out;
}

/// Throws the first violation, if any.
inline void require_valid(const WalkGraph& graph) {
    auto outcome = validate(graph);
    if (!outcome.ok()) {
        const auto& v = outcome.violations.front();
        throw Error(v.code, v.element + ": " + v.message);
    }
}

/// Throws InvalidStart unless the position names an existing state.
inline void check_position(const WalkGraph& graph, const Position& position) {
    std::visit(
        [&graph](const auto& pos) {
            using T = std::decay_t<decltype(pos)>;
            if constexpr (std::is_same_v<T, AtBarrier>) {
                if (!graph.has_barrier(pos.id)) {
                    throw Error(ErrorCode::InvalidStart, detail::barrier_name(pos.id) + " does not exist");
                }
            } else if constexpr (std::is_same_v<T, OnInterval>) {
                const auto* edge = pos.from < pos.to ? graph.find_interval(pos.from, pos.to) : nullptr;
                if (edge == nullptr) {
                    throw Error(ErrorCode::InvalidStart,
                                detail::interval_name(pos.from, pos.to) + " does not exist");
                }
                if (pos.position < 0 || pos.position > edge->n() + 1) {
                    throw Error(ErrorCode::InvalidStart, "position " + std::to_string(pos.position) +
                                                             " outside 0..n+1 on " +
                                                             detail::interval_name(pos.from, pos.to));
                }
            } else {
                if (graph.find_halfline(pos.owner, pos.label) == nullptr) {
                    throw Error(ErrorCode::InvalidStart,
                                detail::halfline_name(pos.owner, pos.label) + " does not exist");
                }
                if (pos.position < 0) {
                    throw Error(ErrorCode::InvalidStart, "negative half-line position");
                }
            }
        },
        position);
}

/// Collapses barrier-valued positions (interval ends, half-line position 0) to AtBarrier.
inline Position canonical_position(const WalkGraph& graph, const Position& position) {
    check_position(graph, position);
    if (const auto* on = std::get_if<OnInterval>(&position)) {
        const auto& edge = graph.interval(on->from, on->to);
        if (on->position == 0) {
            return AtBarrier{on->from};
        }
        if (on->position == edge.n() + 1) {
            return AtBarrier{on->to};
        }
    } else if (const auto* on = std::get_if<OnHalfLine>(&position)) {
        if (on->position == 0) {
            return AtBarrier{on->owner};
        }
    }
    return position;
}

/// Rewrites a barrier start onto an incident edge: OnInterval(c, d, 0) or
/// OnInterval(b, c, n+1) for the first incident interval edge, otherwise
/// OnHalfLine(c, k, 0) for the lowest label.
inline StartPosition normalize_start(const WalkGraph& graph, const StartPosition& start) {
    check_position(graph, start);
    const auto* at = std::get_if<AtBarrier>(&start);
    if (at == nullptr) {
        return start;
    }
    for (const auto& edge : graph.intervals) {
        if (edge.from == at->id) {
            return OnInterval{edge.from, edge.to, 0};
        }
        if (edge.to == at->id) {
            return OnInterval{edge.from, edge.to, edge.n() + 1};
        }
    }
    std::optional<int> label;
    for (const auto& line : graph.halflines) {
        if (line.owner == at->id && (!label || line.label < *label)) {
            label = line.label;
        }
    }
    if (label) {
        return OnHalfLine{at->id, *label, 0};
    }
    throw Error(ErrorCode::IsolatedBarrier,
                detail::barrier_name(at->id) + " has no incident edges to host a start");
}

/// Half-lines with p/q > 1, whose ends can absorb.
inline std::vector<EndId> escaping_ends(const WalkGraph& graph) {
    std::vector<EndId> ends;
    for (const auto& line : graph.halflines) {
        if (line.escaping()) {
            ends.push_back({line.owner, line.label});
        }
    }
    return ends;
}

inline std::string describe(const Position& position) {
    return std::visit(
        [](const auto& pos) -> std::string {
            using T = std::decay_t<decltype(pos)>;
            if constexpr (std::is_same_v<T, AtBarrier>) {
                return "barrier:" + std::to_string(pos.id);
            } else if constexpr (std::is_same_v<T, OnInterval>) {
                return "interval:" + std::to_string(pos.from) + ":" + std::to_string(pos.to) + ":" +
                       std::to_string(pos.position);
            } else {
                return "half:" + std::to_string(pos.owner) + ":" + std::to_string(pos.label) + ":" +
                       std::to_string(pos.position);
            }
        },
        position);
}

} // namespace barrier_walk
