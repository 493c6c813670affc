#pragma once

// Trajectory simulator used as the stochastic cross-check for every analytic
// quantity.
//
// Conventions match the analytic side: occupancy is counted once per time
// index (index 0 included, stays included); an absorption draw ends the walk
// without a step. On a half-line with p >= q the walk is truncated at depth K:
// on reaching K it returns to K-1 with probability min(1, q/p), otherwise it is
// absorbed at the end. That is exact for occupancy below K and for absorption
// outcomes; the elapsed time past K is lost, so the time estimate is flagged
// unreliable as soon as one such event happens.
//
// Trajectory t draws from an engine seeded by (seed, t) only, and all
// accumulators are integers, so the report does not depend on the thread count.

#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace barrier_walk {

struct SimConfig {
    std::uint64_t trajectories = 100'000;
    std::uint64_t step_cap = 1'000'000;
    long long truncation_depth = 64;
    std::uint64_t seed = 0;
    std::vector<Position> tracked_states;
    unsigned threads = 0; // 0: hardware concurrency, capped by BARRIER_WALK_THREADS
};

struct SimEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t count = 0;
};

struct SimReport {
    std::vector<SimEstimate> y;                  // occupancy per barrier
    std::vector<SimEstimate> x;                  // per tracked state
    std::vector<SimEstimate> visited;            // P(tracked state is ever occupied)
    std::vector<SimEstimate> absorbed_barrier;   // per barrier sink
    std::map<EndId, SimEstimate> absorbed_end;   // per half-line with p > q
    std::optional<SimEstimate> time;             // over uncensored trajectories
    bool time_reliable = false;
    double censored_fraction = 0.0;
    std::uint64_t censored = 0;
    std::uint64_t resample_events = 0;
    std::uint64_t trajectories = 0;
};

/// Thread count used when SimConfig::threads is 0.
inline unsigned default_thread_count() {
    unsigned count = std::max(1u, std::thread::hardware_concurrency());
    if (const char* cap = std::getenv("BARRIER_WALK_THREADS")) {
        char* end = nullptr;
        const long value = std::strtol(cap, &end, 10);
        if (end != cap && value > 0) {
            count = std::min(count, static_cast<unsigned>(value));
        }
    }
    return count;
}

namespace sim_detail {

using Wide = unsigned __int128;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

/// SplitMix64 sequence. Cheap to key per trajectory, unlike a Mersenne
/// twister whose seeding dominates short walks.
class Stream {
public:
    using result_type = std::uint64_t;

    explicit Stream(std::uint64_t key) noexcept : state_(key) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept {
        state_ += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

private:
    std::uint64_t state_;
};

inline double unit(Stream& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

enum class Kind : std::uint8_t { Barrier, Interval, Half };

struct Location {
    Kind kind = Kind::Barrier;
    int index = 0;      // barrier id, interval index or half-line index
    long long pos = 0;  // state on the edge
};

enum class Action : std::uint8_t { Absorb, Stay, Interval, Half };

struct Outcome {
    double upto = 0.0; // cumulative probability
    Action action = Action::Stay;
    int edge = 0;
    long long entry = 1;
};

struct Totals {
    std::vector<std::uint64_t> y_sum;
    std::vector<Wide> y_sq;
    std::vector<std::uint64_t> x_sum;
    std::vector<Wide> x_sq;
    std::vector<std::uint64_t> x_hits;
    std::vector<std::uint64_t> barrier_hits;
    std::vector<std::uint64_t> end_hits;
    std::uint64_t time_sum = 0;
    Wide time_sq = 0;
    std::uint64_t finished = 0;
    std::uint64_t censored = 0;
    std::uint64_t resampled = 0;

    Totals(std::size_t barriers, std::size_t tracked, std::size_t halflines)
        : y_sum(barriers, 0), y_sq(barriers, 0), x_sum(tracked, 0), x_sq(tracked, 0), x_hits(tracked, 0),
          barrier_hits(barriers, 0), end_hits(halflines, 0) {}

    void merge(const Totals& other) {
        for (std::size_t i = 0; i < y_sum.size(); ++i) {
            y_sum[i] += other.y_sum[i];
            y_sq[i] += other.y_sq[i];
            barrier_hits[i] += other.barrier_hits[i];
        }
        for (std::size_t i = 0; i < x_sum.size(); ++i) {
            x_sum[i] += other.x_sum[i];
            x_sq[i] += other.x_sq[i];
            x_hits[i] += other.x_hits[i];
        }
        for (std::size_t i = 0; i < end_hits.size(); ++i) {
            end_hits[i] += other.end_hits[i];
        }
        time_sum += other.time_sum;
        time_sq += other.time_sq;
        finished += other.finished;
        censored += other.censored;
        resampled += other.resampled;
    }
};

inline SimEstimate estimate(std::uint64_t sum, Wide sum_sq, std::uint64_t count) {
    SimEstimate out;
    out.count = count;
    if (count == 0) {
        return out;
    }
    const long double n = static_cast<long double>(count);
    const long double mean = static_cast<long double>(sum) / n;
    out.mean = static_cast<double>(mean);
    if (count > 1) {
        long double var = (static_cast<long double>(sum_sq) / n - mean * mean) * n / (n - 1.0L);
        var = std::max(var, 0.0L);
        out.std_error = static_cast<double>(std::sqrt(var / n));
    }
    return out;
}

class Walker {
public:
    Walker(const WalkGraph& graph, const Position& start, const SimConfig& config)
        : graph_(graph), depth_(config.truncation_depth), step_cap_(config.step_cap) {
        for (const auto& barrier : graph.barriers) {
            std::vector<Outcome> table;
            double acc = 0.0;
            auto push = [&](double prob, Action action, int edge, long long entry) {
                if (prob <= 0.0) {
                    return;
                }
                acc += prob;
                table.push_back({acc, action, edge, entry});
            };
            push(barrier.absorb, Action::Absorb, 0, 0);
            push(barrier.stay, Action::Stay, 0, 0);
            for (const auto& [target, prob] : barrier.interval_moves) {
                for (std::size_t e = 0; e < graph.intervals.size(); ++e) {
                    const auto& edge = graph.intervals[e];
                    if ((edge.from == barrier.id && edge.to == target) ||
                        (edge.to == barrier.id && edge.from == target)) {
                        push(prob, Action::Interval, static_cast<int>(e),
                             edge.from == barrier.id ? 1 : edge.n());
                    }
                }
            }
            for (const auto& [label, prob] : barrier.halfline_moves) {
                for (std::size_t h = 0; h < graph.halflines.size(); ++h) {
                    if (graph.halflines[h].owner == barrier.id && graph.halflines[h].label == label) {
                        push(prob, Action::Half, static_cast<int>(h), 1);
                    }
                }
            }
            if (!table.empty()) {
                table.back().upto = 2.0; // absorbs the rounding slack of the distribution
            }
            tables_.push_back(std::move(table));
        }

        interval_track_.resize(graph.intervals.size());
        for (std::size_t e = 0; e < graph.intervals.size(); ++e) {
            interval_track_[e].assign(static_cast<std::size_t>(graph.intervals[e].n()) + 2, -1);
        }
        half_track_.resize(graph.halflines.size());
        for (auto& track : half_track_) {
            track.assign(static_cast<std::size_t>(std::max<long long>(depth_, 1)), -1);
        }
        barrier_track_.assign(graph.barrier_count(), -1);

        for (std::size_t t = 0; t < config.tracked_states.size(); ++t) {
            const auto loc = locate(canonical_position(graph, config.tracked_states[t]));
            tracked_aliases_.push_back(static_cast<int>(t));
            int* slot = nullptr;
            if (loc.kind == Kind::Barrier) {
                slot = &barrier_track_[static_cast<std::size_t>(loc.index)];
            } else if (loc.kind == Kind::Interval) {
                slot = &interval_track_[static_cast<std::size_t>(loc.index)][static_cast<std::size_t>(loc.pos)];
            } else {
                if (loc.pos >= depth_) {
                    throw Error(ErrorCode::Config, "tracked state " + describe(config.tracked_states[t]) +
                                                       " is not below the truncation depth " +
                                                       std::to_string(depth_));
                }
                slot = &half_track_[static_cast<std::size_t>(loc.index)][static_cast<std::size_t>(loc.pos)];
            }
            if (*slot < 0) {
                *slot = static_cast<int>(t);
            } else {
                tracked_aliases_.back() = *slot;
            }
        }

        start_ = locate(canonical_position(graph, start));
        if (start_.kind == Kind::Half && start_.pos >= depth_) {
            throw Error(ErrorCode::Config, "start position is not below the truncation depth");
        }
    }

    std::size_t tracked_count() const noexcept { return tracked_aliases_.size(); }
    const std::vector<int>& aliases() const noexcept { return tracked_aliases_; }

    void run(std::uint64_t seed, std::uint64_t first, std::uint64_t last, Totals& totals) const {
        std::vector<std::uint64_t> y_count(graph_.barrier_count());
        std::vector<std::uint64_t> x_count(tracked_aliases_.size());
        for (std::uint64_t t = first; t < last; ++t) {
            Stream rng(splitmix64(seed ^ splitmix64(t)));
            std::fill(y_count.begin(), y_count.end(), 0);
            std::fill(x_count.begin(), x_count.end(), 0);
            bool resampled = false;
            std::uint64_t steps = 0;
            enum class End { Barrier, Escape, Censored } how = End::Censored;
            int where = 0;

            Location loc = start_;
            while (true) {
                // occupancy at this time index
                if (loc.kind == Kind::Barrier) {
                    ++y_count[static_cast<std::size_t>(loc.index)];
                    const int slot = barrier_track_[static_cast<std::size_t>(loc.index)];
                    if (slot >= 0) {
                        ++x_count[static_cast<std::size_t>(slot)];
                    }
                } else if (loc.kind == Kind::Interval) {
                    const int slot = interval_track_[static_cast<std::size_t>(loc.index)]
                                                    [static_cast<std::size_t>(loc.pos)];
                    if (slot >= 0) {
                        ++x_count[static_cast<std::size_t>(slot)];
                    }
                } else if (loc.pos < depth_) {
                    const int slot =
                        half_track_[static_cast<std::size_t>(loc.index)][static_cast<std::size_t>(loc.pos)];
                    if (slot >= 0) {
                        ++x_count[static_cast<std::size_t>(slot)];
                    }
                }

                const double u = unit(rng);
                if (loc.kind == Kind::Barrier) {
                    const auto& table = tables_[static_cast<std::size_t>(loc.index)];
                    const Outcome* pick = nullptr;
                    for (const auto& outcome : table) {
                        if (u < outcome.upto) {
                            pick = &outcome;
                            break;
                        }
                    }
                    if (pick == nullptr || pick->action == Action::Absorb) {
                        // A barrier with an empty table cannot occur on a valid graph.
                        how = End::Barrier;
                        where = loc.index;
                        break;
                    }
                    if (steps == step_cap_) {
                        break;
                    }
                    ++steps;
                    if (pick->action == Action::Interval) {
                        loc = {Kind::Interval, pick->edge, pick->entry};
                    } else if (pick->action == Action::Half) {
                        loc = {Kind::Half, pick->edge, 1};
                    }
                } else {
                    if (steps == step_cap_) {
                        break;
                    }
                    ++steps;
                    double p = 0.0;
                    double q = 0.0;
                    if (loc.kind == Kind::Interval) {
                        const auto& edge = graph_.intervals[static_cast<std::size_t>(loc.index)];
                        p = edge.p;
                        q = edge.q;
                    } else {
                        const auto& line = graph_.halflines[static_cast<std::size_t>(loc.index)];
                        p = line.p;
                        q = line.q;
                    }
                    if (u < p) {
                        ++loc.pos;
                    } else if (u < p + q) {
                        --loc.pos;
                    }
                }

                if (loc.kind == Kind::Interval) {
                    const auto& edge = graph_.intervals[static_cast<std::size_t>(loc.index)];
                    if (loc.pos == 0) {
                        loc = {Kind::Barrier, edge.from, 0};
                    } else if (loc.pos == edge.n() + 1) {
                        loc = {Kind::Barrier, edge.to, 0};
                    }
                } else if (loc.kind == Kind::Half) {
                    const auto& line = graph_.halflines[static_cast<std::size_t>(loc.index)];
                    if (loc.pos >= depth_ && line.p >= line.q) {
                        resampled = true;
                        if (unit(rng) < line.q / line.p) {
                            loc.pos = depth_ - 1;
                        } else {
                            how = End::Escape;
                            where = loc.index;
                            break;
                        }
                    }
                    if (loc.pos == 0) {
                        loc = {Kind::Barrier, line.owner, 0};
                    }
                }
            }

            for (std::size_t i = 0; i < y_count.size(); ++i) {
                totals.y_sum[i] += y_count[i];
                totals.y_sq[i] += static_cast<Wide>(y_count[i]) * y_count[i];
            }
            for (std::size_t i = 0; i < x_count.size(); ++i) {
                totals.x_sum[i] += x_count[i];
                totals.x_sq[i] += static_cast<Wide>(x_count[i]) * x_count[i];
                totals.x_hits[i] += x_count[i] > 0 ? 1 : 0;
            }
            if (resampled) {
                ++totals.resampled;
            }
            if (how == End::Censored) {
                ++totals.censored;
                continue;
            }
            if (how == End::Barrier) {
                ++totals.barrier_hits[static_cast<std::size_t>(where)];
            } else {
                ++totals.end_hits[static_cast<std::size_t>(where)];
            }
            ++totals.finished;
            totals.time_sum += steps;
            totals.time_sq += static_cast<Wide>(steps) * steps;
        }
    }

private:
    Location locate(const Position& canonical) const {
        if (const auto* at = std::get_if<AtBarrier>(&canonical)) {
            return {Kind::Barrier, at->id, 0};
        }
        if (const auto* on = std::get_if<OnInterval>(&canonical)) {
            for (std::size_t e = 0; e < graph_.intervals.size(); ++e) {
                if (graph_.intervals[e].from == on->from && graph_.intervals[e].to == on->to) {
                    return {Kind::Interval, static_cast<int>(e), on->position};
                }
            }
        }
        const auto& on = std::get<OnHalfLine>(canonical);
        for (std::size_t h = 0; h < graph_.halflines.size(); ++h) {
            if (graph_.halflines[h].owner == on.owner && graph_.halflines[h].label == on.label) {
                return {Kind::Half, static_cast<int>(h), on.position};
            }
        }
        throw Error(ErrorCode::UnknownEdge, "cannot locate " + describe(canonical));
    }

    const WalkGraph& graph_;
    long long depth_;
    std::uint64_t step_cap_;
    Location start_;
    std::vector<std::vector<Outcome>> tables_;
    std::vector<std::vector<int>> interval_track_;
    std::vector<std::vector<int>> half_track_;
    std::vector<int> barrier_track_;
    std::vector<int> tracked_aliases_; // tracked index -> slot that actually counts it
};

} // namespace sim_detail

inline SimReport simulate(const WalkGraph& graph, const StartPosition& start, const SimConfig& config) {
    require_valid(graph);
    if (config.trajectories == 0 || config.step_cap == 0 || config.truncation_depth < 1) {
        throw Error(ErrorCode::Config, "trajectories, step_cap and truncation depth must be positive");
    }
    const sim_detail::Walker walker(graph, start, config);

    unsigned threads = config.threads == 0 ? default_thread_count() : config.threads;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, config.trajectories));
    std::vector<sim_detail::Totals> partial(
        threads, sim_detail::Totals(graph.barrier_count(), walker.tracked_count(), graph.halflines.size()));
    const std::uint64_t chunk = (config.trajectories + threads - 1) / threads;
    if (threads == 1) {
        walker.run(config.seed, 0, config.trajectories, partial[0]);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(threads);
        for (unsigned w = 0; w < threads; ++w) {
            const std::uint64_t first = std::min(config.trajectories, w * chunk);
            const std::uint64_t last = std::min(config.trajectories, first + chunk);
            pool.emplace_back([&walker, &partial, &config, w, first, last] {
                walker.run(config.seed, first, last, partial[w]);
            });
        }
        for (auto& t : pool) {
            t.join();
        }
    }
    auto totals = partial.front();
    for (std::size_t w = 1; w < partial.size(); ++w) {
        totals.merge(partial[w]);
    }

    const std::uint64_t total = config.trajectories;
    SimReport report;
    report.trajectories = total;
    for (std::size_t i = 0; i < graph.barrier_count(); ++i) {
        report.y.push_back(sim_detail::estimate(totals.y_sum[i], totals.y_sq[i], total));
        report.absorbed_barrier.push_back(
            sim_detail::estimate(totals.barrier_hits[i], totals.barrier_hits[i], total));
    }
    for (std::size_t t = 0; t < walker.tracked_count(); ++t) {
        const auto slot = static_cast<std::size_t>(walker.aliases()[t]);
        report.x.push_back(sim_detail::estimate(totals.x_sum[slot], totals.x_sq[slot], total));
        report.visited.push_back(sim_detail::estimate(totals.x_hits[slot], totals.x_hits[slot], total));
    }
    for (std::size_t h = 0; h < graph.halflines.size(); ++h) {
        const auto& line = graph.halflines[h];
        if (line.escaping()) {
            report.absorbed_end[{line.owner, line.label}] =
                sim_detail::estimate(totals.end_hits[h], totals.end_hits[h], total);
        }
    }
    report.censored = totals.censored;
    report.resample_events = totals.resampled;
    report.censored_fraction = static_cast<double>(totals.censored) / static_cast<double>(total);
    if (totals.finished > 0) {
        report.time = sim_detail::estimate(totals.time_sum, totals.time_sq, totals.finished);
    }
    report.time_reliable = totals.censored == 0 && totals.resampled == 0;
    return report;
}

} // namespace barrier_walk
