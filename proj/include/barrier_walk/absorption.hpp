#pragma once

#include <barrier_walk/arrivals.hpp>
#include <barrier_walk/error.hpp>
#include <barrier_walk/graph.hpp>
#include <barrier_walk/kernels.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

namespace barrier_walk {

struct AbsorptionReport {
    std::vector<double> per_barrier;   // s_i y_i
    std::map<EndId, double> per_end;   // every half-line with p > q
    double total_mfb = 0.0;            // sum of per_barrier
    double total_mfb_closed = 0.0;     // start mass minus escape flux

    double total_ends() const {
        double sum = 0.0;
        for (const auto& [_, prob] : per_end) {
            sum += prob;
        }
        return sum;
    }
};

inline AbsorptionReport absorption_report(const ArrivalProfile& profile) {
    const auto& graph = profile.graph();
    const auto start = canonical_position(graph, profile.start());
    AbsorptionReport report;

    report.per_barrier.reserve(graph.barrier_count());
    for (const auto& barrier : graph.barriers) {
        const double mass = barrier.absorb * profile.y(barrier.id);
        report.per_barrier.push_back(mass);
        report.total_mfb += mass;
    }

    // The walk starts with unit mass, except that an outward-drift start
    // half-line lets 1 - rho^{-i0} escape before ever reaching its owner.
    double start_mass = 1.0;
    const auto* start_line = std::get_if<OnHalfLine>(&start);
    double escape_flux = 0.0;
    for (const auto& line : graph.halflines) {
        if (!line.escaping()) {
            continue;
        }
        const double leak = (1.0 - line.q / line.p) * graph.halfline_move_prob(line.owner, line.label);
        double prob = leak * profile.y(line.owner);
        escape_flux += prob;
        if (start_line != nullptr && start_line->owner == line.owner && start_line->label == line.label) {
            const double returns = std::pow(line.q / line.p, start_line->position);
            prob += 1.0 - returns;
            start_mass = returns;
        }
        report.per_end[{line.owner, line.label}] = prob;
    }
    report.total_mfb_closed = start_mass - escape_flux;

    const double gap = std::abs(report.total_mfb - report.total_mfb_closed);
    if (gap > 1e-9) {
        throw Error(ErrorCode::InternalConsistency,
                    "barrier absorption " + std::to_string(report.total_mfb) + " disagrees with flux balance " +
                        std::to_string(report.total_mfb_closed));
    }
    return report;
}

inline AbsorptionReport absorption_report(const WalkGraph& graph, const StartPosition& start) {
    return absorption_report(ArrivalProfile(graph, start));
}

/// Single barrier at 0 (reflect alpha, absorb 1 - alpha) on the nonnegative
/// integers with outward drift p > q, started at i0.
struct Lemma1Profile {
    double p = 0.0;
    double q = 0.0;
    double alpha = 0.0;
    long long i0 = 0;
    double escape_probability = 0.0;

    /// Expected arrivals at state k >= 0.
    double x(long long k) const {
        const double rho = p / q;
        const double back = std::pow(rho, -static_cast<double>(i0));
        if (k == 0) {
            return back * p / (p - alpha * q);
        }
        const long long j = std::min(k, i0);
        return back * (std::pow(rho, static_cast<double>(j)) - 1.0) / (p - q) + alpha * back / (p - alpha * q);
    }
};

inline Lemma1Profile lemma1_profile(double p, double q, double alpha, long long i0) {
    if (!(q > 0.0) || !(p > q)) {
        throw Error(ErrorCode::Drift, "single-barrier escape needs p > q > 0");
    }
    if (p + q > 1.0 + kProbabilityTolerance || alpha < 0.0 || alpha > 1.0 || i0 < 0) {
        throw Error(ErrorCode::EdgeParam, "requires p + q <= 1, 0 <= alpha <= 1, i0 >= 0");
    }
    Lemma1Profile out{p, q, alpha, i0, 0.0};
    out.escape_probability = 1.0 - p * (1.0 - alpha) * std::pow(p / q, -static_cast<double>(i0)) / (p - alpha * q);
    return out;
}

} // namespace barrier_walk
