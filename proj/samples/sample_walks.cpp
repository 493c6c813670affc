// Builds two small walks in code, solves them and checks one against a
// simulation. Pass a document path to analyze that instead.

#include <barrier_walk/barrier_walk.hpp>

#include <cstdio>
#include <iostream>

namespace bw = barrier_walk;

namespace {

void print_profile(const char* title, const bw::WalkGraph& graph, const bw::StartPosition& start) {
    const bw::ArrivalProfile profile(graph, start);
    const auto absorption = bw::absorption_report(profile);
    const auto times = bw::time_report(graph);
    std::printf("%s\n", title);
    for (const auto& b : graph.barriers) {
        std::printf("  barrier %d: y = %.6f, absorbed %.6f\n", b.id, profile.y(b.id),
                    absorption.per_barrier[static_cast<std::size_t>(b.id)]);
    }
    for (const auto& [end, prob] : absorption.per_end) {
        std::printf("  end [%d,%d): absorbed %.6f\n", end.owner, end.label, prob);
    }
    if (times.finite()) {
        std::printf("  expected steps from start: %.6f\n", times.time_at(start));
    } else {
        std::printf("  expected steps: infinite (%s)\n", times.reason().c_str());
    }
}

} // namespace

int main(int argc, char** argv) {
    try {
        if (argc > 1) {
            const auto doc = bw::load_document(argv[1]);
            bw::require_valid(doc.graph);
            print_profile(argv[1], doc.graph, doc.start);
            return 0;
        }

        // Gambler's ruin on {0,1,2,3} from 1.
        bw::WalkGraph ruin;
        ruin.barriers = {{0, 0.0, 1.0, {}, {}}, {1, 0.0, 1.0, {}, {}}};
        ruin.intervals = {{0, 1, 2, 0.5, 0.5}};
        print_profile("ruin", ruin, bw::OnInterval{0, 1, 1});

        // One barrier with a drifting half-line: some walks never come back.
        bw::WalkGraph leaky;
        leaky.barriers = {{0, 0.2, 0.3, {}, {{1, 0.5}}}};
        leaky.halflines = {{0, 1, 0.5, 0.3}};
        print_profile("leaky barrier", leaky, bw::AtBarrier{0});

        bw::SimConfig config;
        config.trajectories = 50'000;
        config.seed = 1;
        const auto sim = bw::simulate(leaky, bw::AtBarrier{0}, config);
        const auto exact = bw::absorption_report(leaky, bw::AtBarrier{0});
        std::printf("  simulated escape %.4f +- %.4f (exact %.4f)\n", sim.absorbed_end.at({0, 1}).mean,
                    sim.absorbed_end.at({0, 1}).std_error, exact.per_end.at({0, 1}));
    } catch (const bw::Error& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
    return 0;
}
