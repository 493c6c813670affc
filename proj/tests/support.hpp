#pragma once

// Shared test machinery: an explicit absorbing-chain oracle built with Eigen,
// random graph generators, and balance-equation residuals.

#include <barrier_walk/barrier_walk.hpp>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace bw_test {

using namespace barrier_walk;

// ------------------------------------------------------------------ oracle

/// Transient-state enumeration of a walk graph. Half-lines are cut at
/// `depth`: an outward-drift line loses the walker there (escape), an inward
/// or driftless one reflects. Only meaningful for depths where rho^{-depth}
/// (outward) or rho^{depth} (inward) is negligible.
class ChainOracle {
public:
    ChainOracle(const WalkGraph& graph, int depth = 300) : graph_(graph), depth_(depth) {
        for (const auto& b : graph.barriers) {
            index_[key(AtBarrier{b.id})] = count_++;
        }
        for (const auto& e : graph.intervals) {
            for (int k = 1; k <= e.n(); ++k) {
                index_[key(OnInterval{e.from, e.to, k})] = count_++;
            }
        }
        for (const auto& h : graph.halflines) {
            for (int k = 1; k <= depth; ++k) {
                index_[key(OnHalfLine{h.owner, h.label, k})] = count_++;
            }
        }
        build();
    }

    int size() const { return count_; }

    int index(const Position& position) const {
        return index_.at(key(canonical_position(graph_, position)));
    }

    /// Expected occupancy of every state when starting at `start`.
    Eigen::VectorXd occupancy(const Position& start) const {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(count_);
        e[index(start)] = 1.0;
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(transposed_);
        return lu.solve(e);
    }

    /// Expected steps to absorption from every state.
    Eigen::VectorXd times() const {
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(system_);
        return lu.solve(step_cost_);
    }

    double occupancy(const Position& start, const Position& target) const {
        return occupancy(start)[index(target)];
    }

    /// Escape probability through the cut of an outward half-line.
    double escape(const Eigen::VectorXd& occ, int owner, int label) const {
        const auto& line = graph_.halfline(owner, label);
        return occ[index(OnHalfLine{owner, label, depth_})] * line.p;
    }

private:
    static std::string key(const Position& position) { return describe(position); }

    void build() {
        std::vector<Eigen::Triplet<double>> entries;
        step_cost_ = Eigen::VectorXd::Zero(count_);
        auto add = [&entries](int from, int to, double prob) {
            if (prob != 0.0) {
                entries.emplace_back(from, to, prob);
            }
        };
        for (const auto& b : graph_.barriers) {
            const int i = index_.at(key(AtBarrier{b.id}));
            step_cost_[i] = 1.0 - b.absorb;
            add(i, i, b.stay);
            for (const auto& [target, prob] : b.interval_moves) {
                const auto& e = graph_.interval(b.id, target);
                add(i, index_.at(key(OnInterval{e.from, e.to, e.from == b.id ? 1 : e.n()})), prob);
            }
            for (const auto& [label, prob] : b.halfline_moves) {
                add(i, index_.at(key(OnHalfLine{b.id, label, 1})), prob);
            }
        }
        for (const auto& e : graph_.intervals) {
            for (int k = 1; k <= e.n(); ++k) {
                const int i = index_.at(key(OnInterval{e.from, e.to, k}));
                step_cost_[i] = 1.0;
                add(i, i, e.r());
                add(i, index_.at(key(canonical_position(graph_, OnInterval{e.from, e.to, k + 1}))), e.p);
                add(i, index_.at(key(canonical_position(graph_, OnInterval{e.from, e.to, k - 1}))), e.q);
            }
        }
        for (const auto& h : graph_.halflines) {
            for (int k = 1; k <= depth_; ++k) {
                const int i = index_.at(key(OnHalfLine{h.owner, h.label, k}));
                step_cost_[i] = 1.0;
                add(i, i, h.r());
                add(i, index_.at(key(canonical_position(graph_, OnHalfLine{h.owner, h.label, k - 1}))), h.q);
                if (k < depth_) {
                    add(i, index_.at(key(OnHalfLine{h.owner, h.label, k + 1})), h.p);
                } else if (!h.escaping()) {
                    add(i, i, h.p);
                }
            }
        }
        Eigen::SparseMatrix<double> q(count_, count_);
        q.setFromTriplets(entries.begin(), entries.end());
        Eigen::SparseMatrix<double> id(count_, count_);
        id.setIdentity();
        system_ = id - q;
        transposed_ = Eigen::SparseMatrix<double>(system_.transpose());
        system_.makeCompressed();
        transposed_.makeCompressed();
    }

    WalkGraph graph_;
    int depth_;
    int count_ = 0;
    std::map<std::string, int> index_;
    Eigen::SparseMatrix<double> system_;
    Eigen::SparseMatrix<double> transposed_;
    Eigen::VectorXd step_cost_;
};

// -------------------------------------------------------------- generators

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

/// p, q with p + q <= 1 and a chosen drift class: -1 inward (rho < 1),
/// 0 driftless, +1 outward (rho > 1).
inline std::pair<double, double> step_pair(Rng& rng, int drift) {
    const double total = uniform(rng, 0.4, 1.0);
    double share = 0.5;
    if (drift < 0) {
        share = uniform(rng, 0.15, 0.42);
    } else if (drift > 0) {
        share = uniform(rng, 0.58, 0.85);
    }
    return {total * share, total * (1.0 - share)};
}

/// Normalizes weights so they sum to exactly 1 in floating point as far as
/// possible (the last entry takes the remainder).
inline std::vector<double> distribution(Rng& rng, std::size_t count, double lo = 0.05, double hi = 0.95) {
    std::vector<double> w(count);
    double total = 0.0;
    for (auto& v : w) {
        v = uniform(rng, lo, hi);
        total += v;
    }
    double used = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) {
        w[i] /= total;
        used += w[i];
    }
    w.back() = 1.0 - used;
    return w;
}

struct GraphShape {
    int max_barriers = 4;
    int max_interior = 5;
    int max_halflines = 2;
    bool allow_outward = true;
    bool allow_driftless = true;
    double min_absorb = 0.05;
};

/// Connected random graph: a random tree of intervals plus a few extra
/// intervals, and a few half-lines. Every barrier absorbs with probability at
/// least `min_absorb`.
inline WalkGraph random_graph(Rng& rng, const GraphShape& shape = {}) {
    const int count = uniform_int(rng, 1, shape.max_barriers);
    WalkGraph graph;
    std::vector<std::pair<int, int>> pairs;
    for (int b = 1; b < count; ++b) {
        pairs.emplace_back(uniform_int(rng, 0, b - 1), b);
    }
    for (int extra = 0; extra < count - 2; ++extra) {
        int a = uniform_int(rng, 0, count - 1);
        int b = uniform_int(rng, 0, count - 1);
        if (a == b) {
            continue;
        }
        if (a > b) {
            std::swap(a, b);
        }
        if (std::find(pairs.begin(), pairs.end(), std::make_pair(a, b)) == pairs.end()) {
            pairs.emplace_back(a, b);
        }
    }
    for (const auto& [a, b] : pairs) {
        const auto [p, q] = step_pair(rng, uniform_int(rng, -1, 1));
        graph.intervals.push_back({a, b, uniform_int(rng, 1, shape.max_interior), p, q});
    }
    const int lines = uniform_int(rng, count == 1 ? 1 : 0, shape.max_halflines);
    for (int h = 0; h < lines; ++h) {
        int drift = uniform_int(rng, -1, 1);
        if (drift > 0 && !shape.allow_outward) {
            drift = -1;
        }
        if (drift == 0 && !shape.allow_driftless) {
            drift = -1;
        }
        const auto [p, q] = step_pair(rng, drift);
        const int owner = uniform_int(rng, 0, count - 1);
        int label = 1;
        while (graph.find_halfline(owner, label) != nullptr) {
            ++label;
        }
        graph.halflines.push_back({owner, label, p, q});
    }

    for (int b = 0; b < count; ++b) {
        std::vector<int> neighbours;
        std::vector<int> labels;
        for (const auto& e : graph.intervals) {
            if (e.from == b) {
                neighbours.push_back(e.to);
            } else if (e.to == b) {
                neighbours.push_back(e.from);
            }
        }
        for (const auto& h : graph.halflines) {
            if (h.owner == b) {
                labels.push_back(h.label);
            }
        }
        const auto w = distribution(rng, 2 + neighbours.size() + labels.size());
        const double absorb = shape.min_absorb + (1.0 - shape.min_absorb) * w[1] * 0.6;
        const double scale = (1.0 - absorb) / (1.0 - w[1]);
        Barrier barrier{b, 0.0, absorb, {}, {}};
        double used = absorb;
        std::size_t slot = 2;
        for (int n : neighbours) {
            barrier.interval_moves[n] = w[slot++] * scale;
            used += barrier.interval_moves[n];
        }
        for (int l : labels) {
            barrier.halfline_moves[l] = w[slot++] * scale;
            used += barrier.halfline_moves[l];
        }
        barrier.stay = std::max(0.0, 1.0 - used);
        graph.barriers.push_back(std::move(barrier));
    }
    return graph;
}

/// Uniformly chosen state of the graph (half-line states up to `max_depth`).
inline Position random_state(Rng& rng, const WalkGraph& graph, int max_depth = 6) {
    const int kinds = 1 + (graph.intervals.empty() ? 0 : 1) + (graph.halflines.empty() ? 0 : 1);
    int pick = uniform_int(rng, 0, kinds - 1);
    if (pick == 0) {
        return AtBarrier{uniform_int(rng, 0, static_cast<int>(graph.barrier_count()) - 1)};
    }
    if (pick == 1 && !graph.intervals.empty()) {
        const auto& e = graph.intervals[static_cast<std::size_t>(
            uniform_int(rng, 0, static_cast<int>(graph.intervals.size()) - 1))];
        return OnInterval{e.from, e.to, uniform_int(rng, 1, e.n())};
    }
    const auto& h = graph.halflines[static_cast<std::size_t>(
        uniform_int(rng, 0, static_cast<int>(graph.halflines.size()) - 1))];
    return OnHalfLine{h.owner, h.label, uniform_int(rng, 1, max_depth)};
}

/// Every state of the graph, half-lines up to `depth`.
inline std::vector<Position> all_states(const WalkGraph& graph, int depth) {
    std::vector<Position> states;
    for (const auto& b : graph.barriers) {
        states.push_back(AtBarrier{b.id});
    }
    for (const auto& e : graph.intervals) {
        for (int k = 1; k <= e.n(); ++k) {
            states.push_back(OnInterval{e.from, e.to, k});
        }
    }
    for (const auto& h : graph.halflines) {
        for (int k = 1; k <= depth; ++k) {
            states.push_back(OnHalfLine{h.owner, h.label, k});
        }
    }
    return states;
}

// --------------------------------------------------------------- residuals

/// Largest violation of the occupancy balance equations over every interval
/// state, the first `depth` states of every half-line, and every barrier.
inline double arrival_residual(const ArrivalProfile& profile, int depth = 12) {
    const auto& graph = profile.graph();
    const auto start = canonical_position(graph, profile.start());
    auto source = [&start](const Position& state) { return state == start ? 1.0 : 0.0; };
    double worst = 0.0;

    for (const auto& e : graph.intervals) {
        auto x = [&](int k) { return profile.x_interval(e.from, e.to, k); };
        for (int k = 1; k <= e.n(); ++k) {
            const double below = k == 1 ? graph.move_prob(e.from, e.to) * profile.y(e.from) : e.p * x(k - 1);
            const double above = k == e.n() ? graph.move_prob(e.to, e.from) * profile.y(e.to) : e.q * x(k + 1);
            const double res = x(k) - (below + above + e.r() * x(k) + source(OnInterval{e.from, e.to, k}));
            worst = std::max(worst, std::abs(res) / (1.0 + std::abs(x(k))));
        }
    }
    for (const auto& h : graph.halflines) {
        auto x = [&](int k) { return profile.x_halfline(h.owner, h.label, k); };
        for (int k = 1; k <= depth; ++k) {
            const double below =
                k == 1 ? graph.halfline_move_prob(h.owner, h.label) * profile.y(h.owner) : h.p * x(k - 1);
            const double res = x(k) - (below + h.q * x(k + 1) + h.r() * x(k) + source(OnHalfLine{h.owner, h.label, k}));
            worst = std::max(worst, std::abs(res) / (1.0 + std::abs(x(k))));
        }
    }
    for (const auto& b : graph.barriers) {
        double inflow = b.stay * profile.y(b.id) + source(AtBarrier{b.id});
        for (const auto& e : graph.intervals) {
            if (e.from == b.id) {
                inflow += e.q * profile.x_interval(e.from, e.to, 1);
            } else if (e.to == b.id) {
                inflow += e.p * profile.x_interval(e.from, e.to, e.n());
            }
        }
        for (const auto& h : graph.halflines) {
            if (h.owner == b.id) {
                inflow += h.q * profile.x_halfline(h.owner, h.label, 1);
            }
        }
        worst = std::max(worst, std::abs(profile.y(b.id) - inflow) / (1.0 + profile.y(b.id)));
    }
    return worst;
}

/// Largest violation of the expected-time recursions (finite reports only).
inline double time_residual(const TimeReport& report, int depth = 12) {
    const auto& graph = report.graph();
    double worst = 0.0;
    auto track = [&worst](double res, double scale) { worst = std::max(worst, std::abs(res) / (1.0 + scale)); };
    for (const auto& e : graph.intervals) {
        auto m = [&](int k) { return report.m_interval(e.from, e.to, k); };
        for (int k = 1; k <= e.n(); ++k) {
            track((1.0 - e.r()) * m(k) - e.p * m(k + 1) - e.q * m(k - 1) - 1.0, m(k));
        }
    }
    for (const auto& h : graph.halflines) {
        if (h.p >= h.q) {
            continue;
        }
        auto m = [&](int k) { return report.m_halfline(h.owner, h.label, k); };
        for (int k = 1; k <= depth; ++k) {
            track((1.0 - h.r()) * m(k) - h.p * m(k + 1) - h.q * m(k - 1) - 1.0, m(k));
        }
    }
    for (const auto& b : graph.barriers) {
        double rhs = b.stay * report.n(b.id) + (1.0 - b.absorb);
        for (const auto& [target, prob] : b.interval_moves) {
            const auto& e = graph.interval(b.id, target);
            rhs += prob * report.m_interval(e.from, e.to, e.from == b.id ? 1 : e.n());
        }
        for (const auto& [label, prob] : b.halfline_moves) {
            rhs += prob * report.m_halfline(b.id, label, 1);
        }
        track(report.n(b.id) - rhs, report.n(b.id));
    }
    return worst;
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

} // namespace bw_test
