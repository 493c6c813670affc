#pragma once

// Explicit solutions for four graph families: finite star, infinite star,
// oriented cycle, and the integer line with two barriers. Each family has a
// spec struct, a constructor for the equivalent WalkGraph, and a report that
// evaluates the family's own formulas without going through the general
// linear system. They exist to be compared against the general solvers.

#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>
#include <barrier_walk/kernels.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace barrier_walk {

// ---------------------------------------------------------------- finite star

struct FiniteRay {
    int interior_states = 1;
    double p = 0.5;         // step toward the tip
    double q = 0.5;         // step toward the center
    double from_center = 0; // p*_{[0,i]}
    double to_center = 0;   // p*_{[i,0]}
    double stay = 0;        // p*_{[i,i]}
    double absorb = 1;      // s_i
};

/// Center barrier 0 joined to tip barriers 1..N. The walk starts at state
/// `start` (counted from the center) on the first ray.
struct FiniteStarSpec {
    double center_stay = 0;
    double center_absorb = 0;
    std::vector<FiniteRay> rays;
    int start = 0;
};

inline WalkGraph finite_star_graph(const FiniteStarSpec& spec) {
    WalkGraph graph;
    Barrier center{0, spec.center_stay, spec.center_absorb, {}, {}};
    for (std::size_t i = 0; i < spec.rays.size(); ++i) {
        const auto& ray = spec.rays[i];
        const int tip = static_cast<int>(i) + 1;
        if (ray.from_center > 0.0) {
            center.interval_moves[tip] = ray.from_center;
        }
        Barrier b{tip, ray.stay, ray.absorb, {}, {}};
        if (ray.to_center > 0.0) {
            b.interval_moves[0] = ray.to_center;
        }
        graph.intervals.push_back({0, tip, ray.interior_states, ray.p, ray.q});
        graph.barriers.push_back(std::move(b));
    }
    graph.barriers.insert(graph.barriers.begin(), std::move(center));
    return graph;
}

inline StartPosition finite_star_start(const FiniteStarSpec& spec) {
    if (spec.rays.empty()) {
        return AtBarrier{0};
    }
    return OnInterval{0, 1, spec.start};
}

/// y_i = zeta_i y_0 (+ alpha_1 on the start ray), closed by sum_i s_i y_i = 1.
inline std::vector<double> finite_star_arrivals(const FiniteStarSpec& spec) {
    if (spec.rays.empty()) {
        throw Error(ErrorCode::Structure, "finite star needs at least one ray");
    }
    std::vector<double> zeta(spec.rays.size() + 1, 1.0);
    double weighted = spec.center_absorb;
    for (std::size_t i = 0; i < spec.rays.size(); ++i) {
        const auto& ray = spec.rays[i];
        const long long n = ray.interior_states;
        const double rho = ray.p / ray.q;
        zeta[i + 1] = power_ratio(n, n + 1, rho) * ray.from_center /
                      (ray.absorb + ray.to_center * geom_ratio(1, n + 1, rho));
        weighted += ray.absorb * zeta[i + 1];
    }
    const auto& first = spec.rays.front();
    const long long n1 = first.interior_states;
    const double rho1 = first.p / first.q;
    const double alpha =
        hit_upper(spec.start, n1, rho1) / (first.absorb + first.to_center * geom_ratio(1, n1 + 1, rho1));

    std::vector<double> y(zeta.size());
    y[0] = (1.0 - first.absorb * alpha) / weighted;
    for (std::size_t i = 1; i < y.size(); ++i) {
        y[i] = zeta[i] * y[0];
    }
    y[1] += alpha;
    return y;
}

/// n_0 = [(1 - s_0) - sum W_i p*_{[0,i]}] / [1 - p*_{[0,0]} - sum R_i p*_{[0,i]}]
/// for a walk started at the center with absorbing tips.
inline double finite_star_absorbing_tips_time(const FiniteStarSpec& spec) {
    double numer = 1.0 - spec.center_absorb;
    double denom = 1.0 - spec.center_stay;
    for (const auto& ray : spec.rays) {
        if (ray.absorb != 1.0) {
            throw Error(ErrorCode::Unsupported, "absorbing-tip time needs s_i = 1 on every ray");
        }
        const long long n = ray.interior_states;
        const double rho = ray.p / ray.q;
        const double r_i = geom_ratio(n, n + 1, rho);
        const double w_i = -weighted_ratio(n, rho) / ray.q;
        numer -= w_i * ray.from_center;
        denom -= r_i * ray.from_center;
    }
    return numer / denom;
}

/// Walk on [-A, B] started at 0 with absorbing ends: a two-ray star with
/// n_1 = B - 1 and n_2 = A - 1. A side with no interior states is accepted
/// by the time formula but has no WalkGraph counterpart.
inline FiniteStarSpec interval_star_spec(int A, int B, double p_right, double q_right, double p_left,
                                         double q_left, double move_right, double move_left,
                                         double center_stay = 0.0, double center_absorb = 0.0) {
    if (A < 1 || B < 1) {
        throw Error(ErrorCode::Structure, "A and B must be positive");
    }
    FiniteStarSpec spec;
    spec.center_stay = center_stay;
    spec.center_absorb = center_absorb;
    spec.rays.push_back({B - 1, p_right, q_right, move_right, 0.0, 0.0, 1.0});
    spec.rays.push_back({A - 1, q_left, p_left, move_left, 0.0, 0.0, 1.0});
    return spec;
}

// -------------------------------------------------------------- infinite star

struct InfiniteRay {
    double p = 0.5;         // step away from the center
    double q = 0.5;         // step toward the center
    double from_center = 0; // p*_i
};

/// Single barrier 0 with half-lines labelled 1..N. The walk starts at
/// `start` on the half-line with label `start_ray` (start 0 is the center).
struct InfiniteStarSpec {
    double center_stay = 0;
    double center_absorb = 0;
    std::vector<InfiniteRay> rays;
    int start_ray = 1;
    int start = 0;
};

inline WalkGraph infinite_star_graph(const InfiniteStarSpec& spec) {
    WalkGraph graph;
    Barrier center{0, spec.center_stay, spec.center_absorb, {}, {}};
    for (std::size_t i = 0; i < spec.rays.size(); ++i) {
        const int label = static_cast<int>(i) + 1;
        if (spec.rays[i].from_center > 0.0) {
            center.halfline_moves[label] = spec.rays[i].from_center;
        }
        graph.halflines.push_back({0, label, spec.rays[i].p, spec.rays[i].q});
    }
    graph.barriers.push_back(std::move(center));
    return graph;
}

inline StartPosition infinite_star_start(const InfiniteStarSpec& spec) {
    if (spec.start == 0) {
        return AtBarrier{0};
    }
    return OnHalfLine{0, spec.start_ray, spec.start};
}

class InfiniteStarReport {
public:
    explicit InfiniteStarReport(InfiniteStarSpec spec) : spec_(std::move(spec)) {
        if (spec_.start_ray < 1 || static_cast<std::size_t>(spec_.start_ray) > spec_.rays.size()) {
            if (spec_.start != 0) {
                throw Error(ErrorCode::InvalidStart, "start ray does not exist");
            }
        }
        leak_ = spec_.center_absorb;
        for (const auto& ray : spec_.rays) {
            if (ray.p > ray.q) {
                leak_ += (1.0 - ray.q / ray.p) * ray.from_center;
            }
        }
        y0_ = start_return() / leak_;
    }

    /// Expected arrivals at the center.
    double y0() const noexcept { return y0_; }

    /// Expected arrivals at state k >= 1 of the half-line labelled `label`.
    double x(int label, long long k) const {
        const auto& ray = ray_at(label);
        const double rho = ray.p / ray.q;
        const double generic = rho > 1.0 ? ray.from_center / ray.p * y0_
                                         : ray.from_center * std::pow(rho, static_cast<double>(k)) / ray.p * y0_;
        if (label != spec_.start_ray || spec_.start == 0) {
            return generic;
        }
        const long long i0 = spec_.start;
        const long long j = std::min(k, i0);
        if (rho > 1.0) {
            return std::pow(rho, static_cast<double>(j - 1 - i0)) * geom_sum(j, 1.0 / rho) / ray.q + generic;
        }
        if (rho < 1.0) {
            if (k <= i0) {
                return generic + geom_sum(k, rho) / ray.q;
            }
            return generic + std::pow(rho, static_cast<double>(k - i0)) * geom_sum(i0, rho) / ray.q;
        }
        return static_cast<double>(j) / ray.p + generic;
    }

    /// Probability of reaching state j on a driftless ray from the center:
    /// p*_m / (j D + p*_m) with D the total leak rate.
    double visit_from_center(int label, long long j) const {
        const auto& ray = ray_at(label);
        if (ray.p != ray.q) {
            throw Error(ErrorCode::Unsupported, "visit formula covers driftless rays only");
        }
        return ray.from_center / (static_cast<double>(j) * leak_ + ray.from_center);
    }

    double absorbed_center() const noexcept { return spec_.center_absorb * y0_; }

    /// Absorption at the end of ray `label` (0 unless the ray drifts outward).
    double absorbed_end(int label) const {
        const auto& ray = ray_at(label);
        if (!(ray.p > ray.q)) {
            return 0.0;
        }
        double prob = (1.0 - ray.q / ray.p) * ray.from_center * y0_;
        if (label == spec_.start_ray) {
            prob += 1.0 - start_return();
        }
        return prob;
    }

    /// n_0 when every entered ray drifts inward, otherwise nullopt.
    std::optional<double> time_center() const {
        double sum = 0.0;
        for (const auto& ray : spec_.rays) {
            if (ray.from_center > 0.0 && !(ray.p < ray.q)) {
                return std::nullopt;
            }
            sum += ray.from_center / (ray.q - ray.p);
        }
        const double s0 = spec_.center_absorb;
        return (1.0 - s0) / s0 + sum / s0;
    }

    /// m_k = n_0 + k / (q - p) on ray `label`.
    std::optional<double> time(int label, long long k) const {
        const auto n0 = time_center();
        if (!n0) {
            return std::nullopt;
        }
        const auto& ray = ray_at(label);
        return *n0 + static_cast<double>(k) / (ray.q - ray.p);
    }

    const InfiniteStarSpec& spec() const noexcept { return spec_; }

private:
    const InfiniteRay& ray_at(int label) const {
        if (label < 1 || static_cast<std::size_t>(label) > spec_.rays.size()) {
            throw Error(ErrorCode::UnknownEdge, "no ray " + std::to_string(label));
        }
        return spec_.rays[static_cast<std::size_t>(label - 1)];
    }

    double start_return() const {
        if (spec_.start == 0) {
            return 1.0;
        }
        const auto& ray = ray_at(spec_.start_ray);
        return ray.p > ray.q ? std::pow(ray.q / ray.p, spec_.start) : 1.0;
    }

    InfiniteStarSpec spec_;
    double leak_ = 0.0;
    double y0_ = 0.0;
};

inline InfiniteStarReport infinite_star_report(const InfiniteStarSpec& spec) { return InfiniteStarReport(spec); }

/// Walk on all integers with one barrier at 0: right of 0 it steps +1 with
/// right_p and -1 with right_q; left of 0 it steps +1 with left_p and -1 with
/// left_q. Ray 1 carries the positive integers, ray 2 the negative ones.
inline InfiniteStarSpec integer_line_spec(double center_stay, double center_absorb, double right_p, double right_q,
                                          double move_right, double left_p, double left_q, double move_left,
                                          int start = 0) {
    InfiniteStarSpec spec;
    spec.center_stay = center_stay;
    spec.center_absorb = center_absorb;
    spec.rays.push_back({right_p, right_q, move_right});
    spec.rays.push_back({left_q, left_p, move_left});
    spec.start_ray = start < 0 ? 2 : 1;
    spec.start = start < 0 ? -start : start;
    return spec;
}

/// State of the integer line for integer k.
inline Position integer_line_position(long long k) {
    if (k == 0) {
        return AtBarrier{0};
    }
    return OnHalfLine{0, k > 0 ? 1 : 2, static_cast<int>(k > 0 ? k : -k)};
}

// --------------------------------------------------------------------- cycle

struct CycleBarrier {
    double stay = 0;    // p*_{[i,i]}
    double forward = 0; // p*_{[i,i+1]}
    double absorb = 0;  // s_i
};

/// Arc i runs from barrier i to barrier i+1 (mod N+1); p steps forward.
struct CycleArc {
    int interior_states = 1;
    double p = 0.5;
    double q = 0.5;
};

struct CycleSpec {
    std::vector<CycleBarrier> barriers;
    std::vector<CycleArc> arcs;
};

/// WalkGraph of a cycle with at least three barriers. The closing arc N -> 0
/// becomes interval [0,N] traversed backwards. A one-barrier cycle collapses
/// to a single barrier whose loop excursions count as stays (arrival counts
/// agree; times do not).
inline WalkGraph cycle_graph(const CycleSpec& spec) {
    const std::size_t count = spec.barriers.size();
    if (count == 0 || spec.arcs.size() != count) {
        throw Error(ErrorCode::Structure, "cycle needs one arc per barrier");
    }
    WalkGraph graph;
    if (count == 1) {
        const auto& b = spec.barriers.front();
        graph.barriers.push_back({0, b.stay + b.forward, b.absorb, {}, {}});
        return graph;
    }
    if (count == 2) {
        throw Error(ErrorCode::Unsupported, "a two-barrier cycle would need two parallel interval edges");
    }
    const int last = static_cast<int>(count) - 1;
    for (int i = 0; i < static_cast<int>(count); ++i) {
        const auto& b = spec.barriers[static_cast<std::size_t>(i)];
        Barrier barrier{i, b.stay, b.absorb, {}, {}};
        if (b.forward > 0.0) {
            barrier.interval_moves[i == last ? 0 : i + 1] = b.forward;
        }
        graph.barriers.push_back(std::move(barrier));
        const auto& arc = spec.arcs[static_cast<std::size_t>(i)];
        if (i == last) {
            graph.intervals.push_back({0, last, arc.interior_states, arc.q, arc.p});
        } else {
            graph.intervals.push_back({i, i + 1, arc.interior_states, arc.p, arc.q});
        }
    }
    return graph;
}

/// State k (1..n, counted from barrier `arc`) on the given arc.
inline Position cycle_position(const CycleSpec& spec, int arc, int k) {
    const int last = static_cast<int>(spec.barriers.size()) - 1;
    if (arc == last) {
        return OnInterval{0, last, spec.arcs[static_cast<std::size_t>(arc)].interior_states + 1 - k};
    }
    return OnInterval{arc, arc + 1, k};
}

class CycleReport {
public:
    explicit CycleReport(CycleSpec spec) : spec_(std::move(spec)) {
        const std::size_t count = spec_.barriers.size();
        if (count == 0 || spec_.arcs.size() != count) {
            throw Error(ErrorCode::Structure, "cycle needs one arc per barrier");
        }
        for (const auto& b : spec_.barriers) {
            if (!(b.forward > 0.0)) {
                throw Error(ErrorCode::Unsupported, "cycle formulas need p*_{[i,i+1]} > 0 everywhere");
            }
        }

        // y_k = prod_{i<=k} M_i y_0, M_i = p*_{[i-1,i]} / (alpha_i s_i + p*_{[i,i+1]}),
        // alpha_i = g_{n+1}(rho_i) / rho_i^n for arc i.
        std::vector<double> product(count, 1.0);
        double norm = spec_.barriers[0].absorb;
        for (std::size_t i = 1; i < count; ++i) {
            const auto& arc = spec_.arcs[i];
            const long long n = arc.interior_states;
            const double inv_alpha = power_ratio(n, n + 1, arc.p / arc.q);
            const double m = spec_.barriers[i - 1].forward * inv_alpha /
                             (spec_.barriers[i].absorb + spec_.barriers[i].forward * inv_alpha);
            product[i] = product[i - 1] * m;
            norm += spec_.barriers[i].absorb * product[i];
        }
        y_.resize(count);
        for (std::size_t k = 0; k < count; ++k) {
            y_[k] = product[k] / norm;
        }

        // v_{i,i+1} = p*/n, v_ii = -s_i - p*/n, Lambda_i = -(1 - s_i) - n p*/(2 p_i);
        // n_{i+1} = lambda_i n_i + mu_i closed around the cycle.
        lambda_.resize(count);
        mu_.resize(count);
        for (std::size_t i = 0; i < count; ++i) {
            const auto& b = spec_.barriers[i];
            const auto& arc = spec_.arcs[i];
            const double n = arc.interior_states;
            const double v_next = b.forward / n;
            const double v_self = -b.absorb - b.forward / n;
            const double big_lambda = -(1.0 - b.absorb) - n / (2.0 * arc.p) * b.forward;
            lambda_[i] = -v_self / v_next;
            mu_[i] = big_lambda / v_next;
        }
        const std::size_t last = count - 1;
        double numer = 0.0;
        for (std::size_t i = 0; i + 1 <= last; ++i) {
            double prod = 1.0;
            for (std::size_t j = i + 1; j <= last; ++j) {
                prod *= lambda_[j];
            }
            numer += mu_[i] * prod;
        }
        double all = 1.0;
        for (double l : lambda_) {
            all *= l;
        }
        n_.assign(count, 0.0);
        n_[0] = numer / (1.0 - all);
        for (std::size_t k = 0; k + 1 < count; ++k) {
            // n_{k+1} = n_0 prod_{i<=k} lambda_i + sum_{i<k} mu_i prod_{i<j<=k} lambda_j
            double prod = 1.0;
            for (std::size_t i = 0; i <= k; ++i) {
                prod *= lambda_[i];
            }
            double sum = 0.0;
            for (std::size_t i = 0; i < k; ++i) {
                double tail = 1.0;
                for (std::size_t j = i + 1; j <= k; ++j) {
                    tail *= lambda_[j];
                }
                sum += mu_[i] * tail;
            }
            n_[k + 1] = n_[0] * prod + sum;
        }
    }

    const std::vector<double>& y() const noexcept { return y_; }

    /// Probability of returning to barrier 0: 1 - 1/y_0.
    double return_probability() const noexcept { return 1.0 - 1.0 / y_[0]; }

    /// Expected arrivals at state k (1..n) of arc `arc`.
    double x(int arc, long long k) const {
        const auto& a = spec_.arcs.at(static_cast<std::size_t>(arc));
        const auto& b = spec_.barriers.at(static_cast<std::size_t>(arc));
        const long long n = a.interior_states;
        return hit_upper(n + 1 - k, n, a.p / a.q) * b.forward / a.p * y_[static_cast<std::size_t>(arc)];
    }

    const std::vector<double>& n() const noexcept { return n_; }

    const CycleSpec& spec() const noexcept { return spec_; }

private:
    CycleSpec spec_;
    std::vector<double> y_;
    std::vector<double> lambda_;
    std::vector<double> mu_;
    std::vector<double> n_;
};

inline CycleReport cycle_report(const CycleSpec& spec) { return CycleReport(spec); }

// ------------------------------------------------------------ two-barrier line

/// Walk on the integers with p/q/r steps everywhere except at barriers 0 and
/// N, which move right with p_0 (p_N), left with q_0 (q_N), stay with r_0
/// (r_N) and absorb with s_0 (s_N). Starts at integer i0.
struct TwoMfbLineSpec {
    double p = 0.5;
    double q = 0.5;
    double p0 = 0.25, q0 = 0.25, r0 = 0.25, s0 = 0.25;
    double pN = 0.25, qN = 0.25, rN = 0.25, sN = 0.25;
    int N = 2;
    int i0 = 1;
};

inline void check_two_mfb_line(const TwoMfbLineSpec& spec) {
    if (spec.N < 2) {
        throw Error(ErrorCode::Structure, "N >= 2 is required so the interval has an interior state");
    }
    if (!(spec.p0 > 0 && spec.q0 > 0 && spec.s0 > 0 && spec.pN > 0 && spec.qN > 0 && spec.sN > 0)) {
        throw Error(ErrorCode::BarrierSum, "p_0 q_0 s_0 > 0 and p_N q_N s_N > 0 are required");
    }
}

/// Barrier 0 at integer 0, barrier 1 at integer N; half-line [1,1) carries
/// N+1, N+2, ... and half-line [0,1) carries -1, -2, ... with p and q swapped.
inline WalkGraph two_mfb_line_graph(const TwoMfbLineSpec& spec) {
    check_two_mfb_line(spec);
    WalkGraph graph;
    graph.barriers.push_back({0, spec.r0, spec.s0, {{1, spec.p0}}, {{1, spec.q0}}});
    graph.barriers.push_back({1, spec.rN, spec.sN, {{0, spec.qN}}, {{1, spec.pN}}});
    graph.intervals.push_back({0, 1, spec.N - 1, spec.p, spec.q});
    graph.halflines.push_back({0, 1, spec.q, spec.p});
    graph.halflines.push_back({1, 1, spec.p, spec.q});
    return graph;
}

/// State of the two-barrier line for integer k.
inline Position two_mfb_line_position(const TwoMfbLineSpec& spec, long long k) {
    if (k == 0) {
        return AtBarrier{0};
    }
    if (k == spec.N) {
        return AtBarrier{1};
    }
    if (k < 0) {
        return OnHalfLine{0, 1, static_cast<int>(-k)};
    }
    if (k > spec.N) {
        return OnHalfLine{1, 1, static_cast<int>(k - spec.N)};
    }
    return OnInterval{0, 1, static_cast<int>(k)};
}

class TwoMfbLineReport {
public:
    explicit TwoMfbLineReport(TwoMfbLineSpec spec) : spec_(spec) {
        check_two_mfb_line(spec_);
        const auto& s = spec_;
        if (s.i0 <= 0 || s.i0 == s.N) {
            throw Error(ErrorCode::Unsupported, "closed forms cover starts with 0 < i0 < N or i0 > N");
        }
        const double N = s.N;
        const double i0 = s.i0;
        if (driftless()) {
            const double d = s.p0 * s.sN + s.s0 * (s.qN + N * s.sN);
            if (s.i0 < s.N) {
                y0_ = (s.qN + (N - i0) * s.sN) / d;
                y1_ = (s.p0 + s.s0 * i0) / d;
            } else {
                y0_ = s.qN / d;
                y1_ = (s.p0 + N * s.s0) / d;
            }
            return;
        }
        const double rho = s.p / s.q;
        const double left = s.s0 * (1.0 - std::pow(rho, N)) + s.p0 * (std::pow(rho, N - 1.0) - std::pow(rho, N));
        const double right = s.sN + s.pN * (1.0 - 1.0 / rho);
        const double d = left * right + s.s0 * s.qN * (1.0 - rho);
        if (s.i0 < s.N) {
            y0_ = ((1.0 - std::pow(rho, N - i0)) * right + s.qN * (1.0 - rho)) / d;
            y1_ = (s.s0 * (std::pow(rho, N - i0) - std::pow(rho, N)) +
                   s.p0 * (std::pow(rho, N - 1.0) - std::pow(rho, N))) /
                  d;
        } else {
            y0_ = s.qN * (1.0 - rho) * std::pow(rho, -i0) / d;
            y1_ = left * std::pow(rho, -i0) / d;
        }
    }

    double y0() const noexcept { return y0_; }
    double y1() const noexcept { return y1_; }

    /// Expected arrivals at integer k (start strictly inside (0, N)).
    double x(long long k) const {
        const auto& s = spec_;
        if (s.i0 > s.N) {
            throw Error(ErrorCode::Unsupported, "state values are given for 0 < i0 < N only");
        }
        if (k == 0) {
            return y0_;
        }
        if (k == s.N) {
            return y1_;
        }
        const double N = s.N;
        const double i0 = s.i0;
        const double kk = static_cast<double>(k);
        if (driftless()) {
            if (k < 0) {
                return s.q0 / s.p * y0_;
            }
            if (k > s.N) {
                return s.pN / s.p * y1_;
            }
            const double base = (N - kk) * s.p0 * y0_ + kk * s.qN * y1_;
            if (k <= s.i0) {
                return (base + kk * (N - i0)) / (s.p * N);
            }
            return (base + (N - kk) * i0) / (s.p * N);
        }
        const double rho = s.p / s.q;
        if (k < 0) {
            return rho < 1.0 ? s.q0 / s.p * y0_ : s.q0 * std::pow(rho, kk) / s.p * y0_;
        }
        if (k > s.N) {
            return rho > 1.0 ? s.pN / s.p * y1_ : s.pN * std::pow(rho, kk - N) / s.p * y1_;
        }
        const double rk = std::pow(rho, kk);
        const double rN = std::pow(rho, N);
        const double base = (1.0 - rk) * (s.qN / s.q) * y1_ + (rk - rN) * (s.p0 / s.p) * y0_;
        if (k <= s.i0) {
            return (base + (rk - 1.0) * (1.0 - std::pow(rho, N - i0)) / (s.p - s.q)) / (1.0 - rN);
        }
        return (base + (rk - rN) * (1.0 - std::pow(rho, -i0)) / (s.p - s.q)) / (1.0 - rN);
    }

    double absorbed_left_barrier() const noexcept { return spec_.s0 * y0_; }
    double absorbed_right_barrier() const noexcept { return spec_.sN * y1_; }

    /// Escape to +infinity (rho > 1).
    double absorbed_right_end() const {
        if (driftless() || spec_.p < spec_.q) {
            return 0.0;
        }
        double prob = spec_.pN * (1.0 - spec_.q / spec_.p) * y1_;
        if (spec_.i0 > spec_.N) {
            prob += 1.0 - std::pow(spec_.q / spec_.p, spec_.i0 - spec_.N);
        }
        return prob;
    }

    /// Escape to -infinity (rho < 1).
    double absorbed_left_end() const {
        if (driftless() || spec_.p > spec_.q) {
            return 0.0;
        }
        return spec_.q0 * (1.0 - spec_.p / spec_.q) * y0_;
    }

    /// Probability of reaching integer j > N from integer i in (0, N).
    double visit_probability(long long i, long long j) const {
        const auto& s = spec_;
        if (!(i > 0 && i < s.N && j > s.N)) {
            throw Error(ErrorCode::Unsupported, "visit formula needs 0 < i < N < j");
        }
        const double N = s.N;
        const double ii = static_cast<double>(i);
        const double jj = static_cast<double>(j - s.N);
        if (driftless()) {
            const double d = s.p0 * s.sN + s.s0 * (s.qN + N * s.sN);
            return s.pN * (s.p0 + s.s0 * ii) / (s.pN * (s.p0 + N * s.s0) + jj * d);
        }
        const double rho = s.p / s.q;
        const double left = s.s0 * (1.0 - std::pow(rho, N)) + s.p0 * (std::pow(rho, N - 1.0) - std::pow(rho, N));
        const double numer = s.pN * (rho - 1.0) *
                             (s.s0 * (std::pow(rho, N - ii) - std::pow(rho, N)) +
                              s.p0 * (std::pow(rho, N - 1.0) - std::pow(rho, N)));
        const double tail = 1.0 - std::pow(rho, -jj);
        const double denom = (s.sN * rho * tail + s.pN * (rho - 1.0) * (2.0 - std::pow(rho, -jj))) * left +
                             s.s0 * s.qN * (1.0 - rho) * rho * tail;
        return numer / denom;
    }

    /// Expected time is never finite: one of the two half-lines drifts outward
    /// or both are driftless.
    static constexpr bool time_finite() noexcept { return false; }

    bool driftless() const noexcept { return spec_.p == spec_.q; }
    const TwoMfbLineSpec& spec() const noexcept { return spec_; }

private:
    TwoMfbLineSpec spec_;
    double y0_ = 0.0;
    double y1_ = 0.0;
};

inline TwoMfbLineReport two_mfb_line_report(const TwoMfbLineSpec& spec) { return TwoMfbLineReport(spec); }

} // namespace barrier_walk
