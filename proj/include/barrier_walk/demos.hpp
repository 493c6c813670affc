#pragma once

// Built-in sample documents.

#include <barrier_walk/closed_forms.hpp>
#include <barrier_walk/document.hpp>
#include <barrier_walk/error.hpp>

#include <array>
#include <string>
#include <string_view>

namespace barrier_walk {

inline constexpr std::array<std::string_view, 4> kDemoNames = {"remark2", "infinite-star", "cycle", "two-mfb-line"};

/// Symmetric walk on [-A, B] started at 0 with absorbing ends (expected time
/// A B). A star around a center barrier when both sides have interior states,
/// otherwise a single interval started at its A-th state.
inline GraphDocument remark2_document(int A = 3, int B = 4) {
    if (A < 1 || B < 1) {
        throw Error(ErrorCode::Structure, "A and B must be positive");
    }
    if (A >= 2 && B >= 2) {
        const auto spec = interval_star_spec(A, B, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5);
        return {finite_star_graph(spec), AtBarrier{0}};
    }
    WalkGraph graph;
    graph.barriers = {{0, 0.0, 1.0, {}, {}}, {1, 0.0, 1.0, {}, {}}};
    graph.intervals = {{0, 1, A + B - 1, 0.5, 0.5}};
    return {graph, OnInterval{0, 1, A}};
}

/// One barrier with three inward or driftless half-lines: every walk is
/// eventually absorbed at the center.
inline GraphDocument infinite_star_document() {
    InfiniteStarSpec spec;
    spec.center_stay = 0.1;
    spec.center_absorb = 0.3;
    spec.rays = {{0.25, 0.5, 0.3}, {0.3, 0.3, 0.2}, {0.2, 0.6, 0.1}};
    spec.start_ray = 1;
    spec.start = 2;
    return {infinite_star_graph(spec), infinite_star_start(spec)};
}

inline CycleSpec cycle_demo_spec() {
    CycleSpec spec;
    spec.barriers = {{0.1, 0.7, 0.2}, {0.2, 0.6, 0.2}, {0.0, 0.5, 0.5}};
    spec.arcs = {{2, 0.4, 0.3}, {3, 0.35, 0.35}, {1, 0.3, 0.5}};
    return spec;
}

inline GraphDocument cycle_document() { return {cycle_graph(cycle_demo_spec()), AtBarrier{0}}; }

inline TwoMfbLineSpec two_mfb_line_demo_spec() {
    TwoMfbLineSpec spec;
    spec.p = 0.4;
    spec.q = 0.3;
    spec.p0 = 0.3;
    spec.q0 = 0.2;
    spec.r0 = 0.1;
    spec.s0 = 0.4;
    spec.pN = 0.25;
    spec.qN = 0.35;
    spec.rN = 0.1;
    spec.sN = 0.3;
    spec.N = 4;
    spec.i0 = 2;
    return spec;
}

inline GraphDocument two_mfb_line_document() {
    const auto spec = two_mfb_line_demo_spec();
    return {two_mfb_line_graph(spec), two_mfb_line_position(spec, spec.i0)};
}

inline GraphDocument demo_document(std::string_view name) {
    if (name == "remark2") {
        return remark2_document();
    }
    if (name == "infinite-star") {
        return infinite_star_document();
    }
    if (name == "cycle") {
        return cycle_document();
    }
    if (name == "two-mfb-line") {
        return two_mfb_line_document();
    }
    throw Error(ErrorCode::UnknownDemo, "unknown demo \"" + std::string(name) +
                                            "\"; choose remark2, infinite-star, cycle or two-mfb-line");
}

} // namespace barrier_walk
