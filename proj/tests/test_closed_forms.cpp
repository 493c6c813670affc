#include "support.hpp"

#include <gtest/gtest.h>

using namespace barrier_walk;
using bw_test::close;
using bw_test::Rng;
using bw_test::uniform;
using bw_test::uniform_int;

namespace {

constexpr double kTol = 1e-9;

FiniteStarSpec random_finite_star(Rng& rng, bool absorbing_tips) {
    FiniteStarSpec spec;
    const int rays = uniform_int(rng, 1, 4);
    const auto w = bw_test::distribution(rng, static_cast<std::size_t>(rays) + 2);
    spec.center_stay = w[0];
    spec.center_absorb = w[1];
    for (int i = 0; i < rays; ++i) {
        FiniteRay ray;
        ray.interior_states = uniform_int(rng, 1, 6);
        const auto [p, q] = bw_test::step_pair(rng, uniform_int(rng, -1, 1));
        ray.p = p;
        ray.q = q;
        ray.from_center = w[static_cast<std::size_t>(i) + 2];
        if (absorbing_tips) {
            ray.absorb = 1.0;
        } else {
            const auto t = bw_test::distribution(rng, 3);
            ray.to_center = t[0];
            ray.stay = t[1];
            ray.absorb = t[2];
        }
        spec.rays.push_back(ray);
    }
    spec.start = uniform_int(rng, 0, spec.rays.front().interior_states + 1);
    return spec;
}

InfiniteStarSpec random_infinite_star(Rng& rng) {
    InfiniteStarSpec spec;
    const int rays = uniform_int(rng, 1, 4);
    const auto w = bw_test::distribution(rng, static_cast<std::size_t>(rays) + 2);
    spec.center_stay = w[0];
    spec.center_absorb = w[1];
    for (int i = 0; i < rays; ++i) {
        const auto [p, q] = bw_test::step_pair(rng, uniform_int(rng, -1, 1));
        spec.rays.push_back({p, q, w[static_cast<std::size_t>(i) + 2]});
    }
    spec.start_ray = uniform_int(rng, 1, rays);
    spec.start = uniform_int(rng, 0, 6);
    return spec;
}

CycleSpec random_cycle(Rng& rng, bool homogeneous) {
    CycleSpec spec;
    const int count = uniform_int(rng, 3, 5);
    const CycleArc shared{uniform_int(rng, 1, 5), 0.0, 0.0};
    const auto [sp, sq] = bw_test::step_pair(rng, uniform_int(rng, -1, 1));
    for (int i = 0; i < count; ++i) {
        const auto w = bw_test::distribution(rng, 3);
        spec.barriers.push_back({w[0], w[1], w[2]});
        if (homogeneous) {
            spec.arcs.push_back({shared.interior_states, sp, sq});
        } else {
            const auto [p, q] = bw_test::step_pair(rng, uniform_int(rng, -1, 1));
            spec.arcs.push_back({uniform_int(rng, 1, 5), p, q});
        }
    }
    return spec;
}

TwoMfbLineSpec random_line(Rng& rng, int drift, bool inside) {
    TwoMfbLineSpec spec;
    const auto [p, q] = bw_test::step_pair(rng, drift);
    spec.p = p;
    spec.q = q;
    const auto a = bw_test::distribution(rng, 4);
    spec.p0 = a[0];
    spec.q0 = a[1];
    spec.r0 = a[2];
    spec.s0 = a[3];
    const auto b = bw_test::distribution(rng, 4);
    spec.pN = b[0];
    spec.qN = b[1];
    spec.rN = b[2];
    spec.sN = b[3];
    spec.N = uniform_int(rng, 2, 6);
    spec.i0 = inside ? uniform_int(rng, 1, spec.N - 1) : spec.N + uniform_int(rng, 1, 5);
    return spec;
}

// Cycle ratio with each arc's own kernels.
std::vector<double> corrected_cycle_y(const CycleSpec& spec) {
    const std::size_t count = spec.barriers.size();
    std::vector<double> product(count, 1.0);
    double norm = spec.barriers[0].absorb;
    for (std::size_t i = 1; i < count; ++i) {
        const auto& in = spec.arcs[i - 1];
        const auto& out = spec.arcs[i];
        const double into = power_ratio(in.interior_states, in.interior_states + 1, in.p / in.q);
        const double onward = power_ratio(out.interior_states, out.interior_states + 1, out.p / out.q);
        product[i] = product[i - 1] * spec.barriers[i - 1].forward * into /
                     (spec.barriers[i].absorb + spec.barriers[i].forward * onward);
        norm += spec.barriers[i].absorb * product[i];
    }
    for (auto& v : product) {
        v /= norm;
    }
    return product;
}

} // namespace

// ------------------------------------------------------------- finite star

TEST(FiniteStar, MatchesGeneralSolver) {
    Rng rng(51);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = random_finite_star(rng, false);
        const auto closed = finite_star_arrivals(spec);
        const ArrivalProfile prof(finite_star_graph(spec), finite_star_start(spec));
        for (std::size_t i = 0; i < closed.size(); ++i) {
            EXPECT_TRUE(close(closed[i], prof.y(static_cast<BarrierId>(i)), kTol))
                << "trial " << trial << " y" << i << " " << closed[i] << " vs " << prof.y(static_cast<BarrierId>(i));
        }
    }
}

TEST(FiniteStar, CenterStart) {
    Rng rng(52);
    for (int trial = 0; trial < 50; ++trial) {
        auto spec = random_finite_star(rng, false);
        spec.start = 0;
        const auto y = finite_star_arrivals(spec);
        double total = 0.0;
        for (std::size_t i = 1; i < y.size(); ++i) {
            total += spec.rays[i - 1].absorb * y[i];
        }
        EXPECT_NEAR(spec.center_absorb * y[0] + total, 1.0, 1e-12);
    }
}

TEST(FiniteStar, AbsorbingTipsTime) {
    Rng rng(53);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = random_finite_star(rng, true);
        const auto rep = time_report(finite_star_graph(spec));
        EXPECT_TRUE(close(finite_star_absorbing_tips_time(spec), rep.n(0), kTol)) << "trial " << trial;
    }
}

TEST(FiniteStar, TwoRayStarIsProductOfLengths) {
    EXPECT_NEAR(finite_star_absorbing_tips_time(interval_star_spec(3, 4, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5)), 12.0, 1e-12);
    EXPECT_NEAR(finite_star_absorbing_tips_time(interval_star_spec(1, 1, 0.5, 0.5, 0.5, 0.5, 0.5, 0.5)), 1.0, 1e-12);
}

TEST(FiniteStar, IntervalInterpretation) {
    // Two-ray star equals the plain interval [-A, B] through the center.
    const int A = 3;
    const int B = 5;
    const double p = 0.35;
    const double q = 0.45;
    auto spec = interval_star_spec(A, B, p, q, p, q, p / (p + q), q / (p + q));
    spec.center_stay = 0.0;
    WalkGraph line;
    line.barriers = {{0, 0.0, 1.0, {}, {}}, {1, 0.0, 1.0, {}, {}}};
    line.intervals = {{0, 1, A + B - 1, p, q}};
    const auto star = absorption_report(finite_star_graph(spec), AtBarrier{0});
    const auto plain = absorption_report(line, OnInterval{0, 1, A});
    EXPECT_NEAR(star.per_barrier[1], plain.per_barrier[1], 1e-12);
    EXPECT_NEAR(star.per_barrier[2], plain.per_barrier[0], 1e-12);
}

TEST(FiniteStar, ContinuityAtRhoOne) {
    FiniteStarSpec spec;
    spec.center_stay = 0.1;
    spec.center_absorb = 0.2;
    spec.rays = {{4, 0.3, 0.3, 0.4, 0.2, 0.3, 0.5}, {2, 0.25, 0.25, 0.3, 0.1, 0.1, 0.8}};
    spec.start = 2;
    const auto base = finite_star_arrivals(spec);
    for (double eps : {1e-6, -1e-6}) {
        auto shifted = spec;
        for (auto& ray : shifted.rays) {
            ray.p *= 1.0 + eps;
        }
        const auto y = finite_star_arrivals(shifted);
        for (std::size_t i = 0; i < y.size(); ++i) {
            EXPECT_NEAR(y[i] / base[i], 1.0, 1e-4);
        }
    }
}

// ----------------------------------------------------------- infinite star

TEST(InfiniteStar, MatchesGeneralSolver) {
    Rng rng(54);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = random_infinite_star(rng);
        const InfiniteStarReport rep(spec);
        const auto graph = infinite_star_graph(spec);
        const ArrivalProfile prof(graph, infinite_star_start(spec));
        const auto abs = absorption_report(prof);
        EXPECT_TRUE(close(rep.y0(), prof.y(0), kTol)) << "trial " << trial;
        EXPECT_TRUE(close(rep.absorbed_center(), abs.per_barrier[0], kTol));
        double total = rep.absorbed_center();
        for (int label = 1; label <= static_cast<int>(spec.rays.size()); ++label) {
            for (long long k = 1; k <= 9; ++k) {
                EXPECT_TRUE(close(rep.x(label, k), prof.x_halfline(0, label, k), kTol))
                    << "trial " << trial << " ray " << label << " k " << k;
            }
            const auto it = abs.per_end.find({0, label});
            const double general = it == abs.per_end.end() ? 0.0 : it->second;
            EXPECT_TRUE(close(rep.absorbed_end(label), general, kTol));
            total += rep.absorbed_end(label);
        }
        EXPECT_NEAR(total, 1.0, 1e-9);

        const auto times = time_report(graph);
        ASSERT_EQ(times.finite(), rep.time_center().has_value());
        if (times.finite()) {
            EXPECT_TRUE(close(*rep.time_center(), times.n(0), kTol));
            EXPECT_TRUE(close(*rep.time(1, 4), times.m_halfline(0, 1, 4), kTol));
        }
    }
}

TEST(InfiniteStar, Examples) {
    InfiniteStarSpec spec;
    spec.center_absorb = 0.5;
    spec.rays = {{0.25, 0.5, 0.5}};
    EXPECT_NEAR(*InfiniteStarReport(spec).time_center(), 5.0, 1e-12);
    EXPECT_NEAR(InfiniteStarReport(spec).absorbed_center(), 1.0, 1e-12);

    spec.rays = {{0.4, 0.4, 0.5}};
    EXPECT_NEAR(InfiniteStarReport(spec).visit_from_center(1, 1), 0.5, 1e-12);
    EXPECT_FALSE(InfiniteStarReport(spec).time_center().has_value());
}

TEST(InfiniteStar, DriftlessVisitMatchesGeneral) {
    InfiniteStarSpec spec;
    spec.center_stay = 0.1;
    spec.center_absorb = 0.2;
    spec.rays = {{0.3, 0.3, 0.4}, {0.5, 0.3, 0.3}};
    const InfiniteStarReport rep(spec);
    const auto graph = infinite_star_graph(spec);
    for (long long j = 1; j <= 6; ++j) {
        EXPECT_NEAR(rep.visit_from_center(1, j),
                    visit_probability(graph, AtBarrier{0}, OnHalfLine{0, 1, static_cast<int>(j)}), 1e-10);
    }
}

TEST(InfiniteStar, IntegerLine) {
    const auto spec = integer_line_spec(0.1, 0.3, 0.3, 0.4, 0.3, 0.35, 0.25, 0.3, -3);
    const InfiniteStarReport rep(spec);
    const ArrivalProfile prof(infinite_star_graph(spec), integer_line_position(-3));
    EXPECT_TRUE(close(rep.y0(), prof.y(0), kTol));
    EXPECT_TRUE(close(rep.x(2, 3), prof.occupancy(integer_line_position(-3)), kTol));
}

// ------------------------------------------------------------------- cycle

TEST(Cycle, HomogeneousArcsMatchGeneralSolver) {
    Rng rng(55);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = random_cycle(rng, true);
        const CycleReport rep(spec);
        const ArrivalProfile prof(cycle_graph(spec), AtBarrier{0});
        for (std::size_t i = 0; i < spec.barriers.size(); ++i) {
            EXPECT_TRUE(close(rep.y()[i], prof.y(static_cast<BarrierId>(i)), kTol)) << "trial " << trial;
        }
        EXPECT_TRUE(close(rep.return_probability(), 1.0 - 1.0 / prof.y(0), kTol));
        for (int arc = 0; arc < static_cast<int>(spec.arcs.size()); ++arc) {
            for (int k = 1; k <= spec.arcs[static_cast<std::size_t>(arc)].interior_states; ++k) {
                EXPECT_TRUE(close(rep.x(arc, k), prof.occupancy(cycle_position(spec, arc, k)), kTol))
                    << "trial " << trial << " arc " << arc << " k " << k;
            }
        }
    }
}

TEST(Cycle, MixedArcsNeedPerArcKernels) {
    Rng rng(56);
    int differing = 0;
    for (int trial = 0; trial < 100; ++trial) {
        const auto spec = random_cycle(rng, false);
        const ArrivalProfile prof(cycle_graph(spec), AtBarrier{0});
        const auto corrected = corrected_cycle_y(spec);
        const CycleReport rep(spec);
        bool same = true;
        for (std::size_t i = 0; i < corrected.size(); ++i) {
            EXPECT_TRUE(close(corrected[i], prof.y(static_cast<BarrierId>(i)), kTol)) << "trial " << trial;
            same = same && close(rep.y()[i], corrected[i], kTol);
        }
        differing += same ? 0 : 1;
    }
    EXPECT_GT(differing, 50);
}

TEST(Cycle, ReturnProbabilityInRange) {
    Rng rng(57);
    for (int trial = 0; trial < 100; ++trial) {
        const CycleReport rep(random_cycle(rng, true));
        EXPECT_GE(rep.return_probability(), -1e-12);
        EXPECT_LE(rep.return_probability(), 1.0);
    }
}

TEST(Cycle, SingleBarrierCollapses) {
    CycleSpec spec;
    spec.barriers = {{0.2, 0.5, 0.3}};
    spec.arcs = {{3, 0.4, 0.4}};
    const ArrivalProfile prof(cycle_graph(spec), AtBarrier{0});
    EXPECT_NEAR(prof.y(0), 1.0 / 0.3, 1e-12);
    spec.barriers.push_back({0.2, 0.5, 0.3});
    spec.arcs.push_back({3, 0.4, 0.4});
    EXPECT_THROW(cycle_graph(spec), Error);
}

TEST(Cycle, AbsorbingFollowers) {
    CycleSpec spec;
    spec.barriers = {{0.1, 0.6, 0.3}, {0.0, 0.0, 1.0}, {0.0, 0.0, 1.0}};
    spec.arcs = {{2, 0.3, 0.4}, {2, 0.3, 0.4}, {2, 0.3, 0.4}};
    // forward = 0 at the followers is outside the printed formulas.
    EXPECT_THROW(CycleReport{spec}, Error);
    const ArrivalProfile prof(cycle_graph(spec), AtBarrier{0});
    const double m1 = 0.6 * power_ratio(2, 3, 0.75) / 1.0;
    EXPECT_NEAR(prof.y(1), m1 * prof.y(0), 1e-12);
}

TEST(Cycle, TimeFormulaIsFinite) {
    const CycleReport rep(cycle_demo_spec());
    for (double v : rep.n()) {
        EXPECT_TRUE(std::isfinite(v));
    }
}

// ---------------------------------------------------------- two-mfb line

TEST(TwoMfbLine, OutwardDriftInsideStart) {
    Rng rng(58);
    for (int trial = 0; trial < 200; ++trial) {
        const auto spec = random_line(rng, 1, true);
        const TwoMfbLineReport rep(spec);
        const auto graph = two_mfb_line_graph(spec);
        const ArrivalProfile prof(graph, two_mfb_line_position(spec, spec.i0));
        const auto abs = absorption_report(prof);
        EXPECT_TRUE(close(rep.y0(), prof.y(0), kTol)) << "trial " << trial;
        EXPECT_TRUE(close(rep.y1(), prof.y(1), kTol)) << "trial " << trial;
        for (long long k = 1; k < spec.N; ++k) {
            EXPECT_TRUE(close(rep.x(k), prof.occupancy(two_mfb_line_position(spec, k)), kTol))
                << "trial " << trial << " k " << k;
        }
        for (long long k = spec.N + 1; k < spec.N + 5; ++k) {
            EXPECT_TRUE(close(rep.x(k), prof.occupancy(two_mfb_line_position(spec, k)), kTol));
        }
        EXPECT_TRUE(close(rep.absorbed_right_end(), abs.per_end.at({1, 1}), kTol));
        EXPECT_FALSE(time_report(graph).finite());
    }
}

TEST(TwoMfbLine, DriftlessFormulas) {
    Rng rng(59);
    for (int trial = 0; trial < 100; ++trial) {
        const bool inside = trial % 2 == 0;
        const auto spec = random_line(rng, 0, inside);
        const TwoMfbLineReport rep(spec);
        const auto graph = two_mfb_line_graph(spec);
        const ArrivalProfile prof(graph, two_mfb_line_position(spec, spec.i0));
        EXPECT_TRUE(close(rep.y0(), prof.y(0), kTol)) << "trial " << trial;
        EXPECT_TRUE(close(rep.y1(), prof.y(1), kTol)) << "trial " << trial;
        if (inside) {
            for (long long k = -3; k < spec.N + 4; ++k) {
                EXPECT_TRUE(close(rep.x(k), prof.occupancy(two_mfb_line_position(spec, k)), kTol))
                    << "trial " << trial << " k " << k;
            }
            for (long long j = spec.N + 1; j < spec.N + 4; ++j) {
                EXPECT_TRUE(close(rep.visit_probability(spec.i0, j),
                                  visit_probability(graph, two_mfb_line_position(spec, spec.i0),
                                                    two_mfb_line_position(spec, j)),
                                  kTol));
            }
        }
        EXPECT_FALSE(time_report(graph).finite());
    }
}

TEST(TwoMfbLine, Preconditions) {
    TwoMfbLineSpec spec;
    spec.N = 1;
    EXPECT_THROW(two_mfb_line_graph(spec), Error);
    spec.N = 4;
    spec.s0 = 0.0;
    spec.r0 = 0.5;
    EXPECT_THROW(two_mfb_line_graph(spec), Error);
    spec = two_mfb_line_demo_spec();
    spec.i0 = spec.N;
    EXPECT_THROW(TwoMfbLineReport{spec}, Error);
    EXPECT_FALSE(TwoMfbLineReport::time_finite());
}
