// barrier-walk: validate, analyze, simulate and compare walk-graph documents.
//
// Exit status: 0 success, 1 parse/validation/configuration error,
// 2 singular system, 3 analytic and simulated values disagree (|z| > 5).

#include <barrier_walk/barrier_walk.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace bw = barrier_walk;

namespace {

constexpr int kOk = 0;
constexpr int kInputError = 1;
constexpr int kSingular = 2;
constexpr int kMismatch = 3;

struct Options {
    std::string target;
    std::vector<std::string> states;
    std::string format = "table";
    std::uint64_t trajectories = 100'000;
    std::uint64_t seed = 0;
    std::uint64_t step_cap = 1'000'000;
    long long truncation = 64;
    unsigned threads = 0;
    bool analyze = false;
};

std::string number(double v) {
    std::ostringstream out;
    out << std::setprecision(15) << v;
    return out.str();
}

std::vector<bw::Position> parse_states(const std::vector<std::string>& states) {
    std::vector<bw::Position> out;
    for (const auto& s : states) {
        out.push_back(bw::parse_state(s));
    }
    return out;
}

bw::GraphDocument load_valid(const std::string& path) {
    auto doc = bw::load_document(path);
    bw::require_valid(doc.graph);
    bw::check_position(doc.graph, doc.start);
    return doc;
}

bw::SimConfig sim_config(const Options& opt, const std::vector<bw::Position>& states) {
    bw::SimConfig config;
    config.trajectories = opt.trajectories;
    config.seed = opt.seed;
    config.step_cap = opt.step_cap;
    config.truncation_depth = opt.truncation;
    config.tracked_states = states;
    config.threads = opt.threads;
    return config;
}

void print_analysis(const bw::Analysis& a, const std::string& format) {
    if (format == "json") {
        std::cout << bw::analysis_json(a).dump(2) << "\n";
        return;
    }
    const auto& graph = a.arrivals.graph();
    std::cout << "barrier  arrivals y          absorbed\n";
    for (std::size_t i = 0; i < graph.barrier_count(); ++i) {
        std::cout << std::left << std::setw(9) << i << std::setw(20) << number(a.arrivals.y()[i])
                  << number(a.absorption.per_barrier[i]) << "\n";
    }
    for (const auto& [end, prob] : a.absorption.per_end) {
        std::cout << "end [" << end.owner << "," << end.label << ") absorbed " << number(prob) << "\n";
    }
    std::cout << "total absorbed at barriers " << number(a.absorption.total_mfb) << ", at ends "
              << number(a.absorption.total_ends()) << "\n";
    for (const auto& [state, value] : a.states) {
        std::cout << "x " << bw::describe(state) << " = " << number(value) << "\n";
    }
    if (const auto start = bw::start_time(a)) {
        for (std::size_t i = 0; i < graph.barrier_count(); ++i) {
            std::cout << "time n[" << i << "] = " << number(a.time.n()[i]) << "\n";
        }
        std::cout << "time from start = " << number(*start) << "\n";
        for (const auto& [state, value] : a.state_times) {
            std::cout << "time m " << bw::describe(state) << " = " << (value ? number(*value) : "infinite") << "\n";
        }
    } else {
        std::cout << "time infinite: " << a.time.infinite_reason(a.arrivals.start()) << "\n";
    }
}

void print_estimate(const std::string& name, const bw::SimEstimate& e) {
    std::cout << std::left << std::setw(28) << name << std::setw(20) << number(e.mean) << "+- " << number(e.std_error)
              << "\n";
}

void print_simulation(const bw::SimReport& r, const std::vector<bw::Position>& states, const std::string& format) {
    if (format == "json") {
        std::cout << bw::simulation_json(r, states).dump(2) << "\n";
        return;
    }
    for (std::size_t i = 0; i < r.y.size(); ++i) {
        print_estimate("y[" + std::to_string(i) + "]", r.y[i]);
    }
    for (std::size_t i = 0; i < states.size(); ++i) {
        print_estimate("x[" + bw::describe(states[i]) + "]", r.x[i]);
    }
    for (std::size_t i = 0; i < r.absorbed_barrier.size(); ++i) {
        print_estimate("absorb barrier " + std::to_string(i), r.absorbed_barrier[i]);
    }
    for (const auto& [end, e] : r.absorbed_end) {
        print_estimate("absorb end [" + std::to_string(end.owner) + "," + std::to_string(end.label) + ")", e);
    }
    if (r.time) {
        print_estimate(r.time_reliable ? "time" : "time (unreliable)", *r.time);
    }
    std::cout << "censored fraction " << number(r.censored_fraction) << ", resample events " << r.resample_events
              << ", trajectories " << r.trajectories << "\n";
}

int run_validate(const Options& opt) {
    const auto doc = bw::load_document(opt.target);
    const auto outcome = bw::validate(doc.graph);
    if (!outcome.ok()) {
        for (const auto& v : outcome.violations) {
            std::cout << bw::to_string(v.code) << ": " << v.element << ": " << v.message << "\n";
        }
        return kInputError;
    }
    bw::check_position(doc.graph, doc.start);
    std::cout << "OK\n";
    return kOk;
}

int run_analyze(const bw::GraphDocument& doc, const Options& opt) {
    const auto states = parse_states(opt.states);
    print_analysis(bw::analyze(doc, states), opt.format);
    return kOk;
}

int run_simulate(const Options& opt) {
    const auto doc = load_valid(opt.target);
    const auto states = parse_states(opt.states);
    const auto report = bw::simulate(doc.graph, doc.start, sim_config(opt, states));
    print_simulation(report, states, opt.format);
    return kOk;
}

int run_compare(const Options& opt) {
    const auto doc = load_valid(opt.target);
    const auto states = parse_states(opt.states);
    const auto analysis = bw::analyze(doc, states);
    const auto report = bw::simulate(doc.graph, doc.start, sim_config(opt, states));
    const auto rows = bw::comparison_rows(analysis, report, states);
    if (opt.format == "json") {
        nlohmann::json out{{"rows", bw::rows_json(rows)}, {"censored_fraction", report.censored_fraction}};
        std::cout << out.dump(2) << "\n";
    } else {
        std::cout << std::left << std::setw(28) << "quantity" << std::setw(20) << "analytic" << std::setw(20)
                  << "estimate" << std::setw(24) << "stderr" << "z\n";
        for (const auto& row : rows) {
            std::cout << std::left << std::setw(28) << row.quantity << std::setw(20) << number(row.analytic)
                      << std::setw(20) << number(row.estimate) << std::setw(24) << number(row.std_error)
                      << number(row.z) << "\n";
        }
        std::cout << "censored fraction " << number(report.censored_fraction) << "\n";
    }
    return bw::rows_agree(rows) ? kOk : kMismatch;
}

int run_demo(const Options& opt) {
    const auto doc = bw::demo_document(opt.target);
    if (opt.analyze) {
        return run_analyze(doc, opt);
    }
    std::cout << bw::dump_document(doc);
    return kOk;
}

void add_format(CLI::App* cmd, Options& opt) {
    cmd->add_option("--format", opt.format, "table or json")->check(CLI::IsMember({"table", "json"}));
}

void add_states(CLI::App* cmd, Options& opt) {
    cmd->add_option("--states", opt.states, "states as interval:from:to:k or half:owner:label:k");
}

void add_sim(CLI::App* cmd, Options& opt) {
    cmd->add_option("--trajectories", opt.trajectories, "number of simulated walks");
    cmd->add_option("--seed", opt.seed, "random seed");
    cmd->add_option("--step-cap", opt.step_cap, "steps before a walk is censored");
    cmd->add_option("--truncation", opt.truncation, "half-line depth for first-passage resampling");
    cmd->add_option("--threads", opt.threads, "worker threads (0: automatic)");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Arrivals, absorption and absorption times of random walks on barrier graphs"};
    app.require_subcommand(1);
    Options opt;

    auto* validate = app.add_subcommand("validate", "check a graph document");
    validate->add_option("path", opt.target)->required();

    auto* analyze = app.add_subcommand("analyze", "solve a graph document");
    analyze->add_option("path", opt.target)->required();
    add_states(analyze, opt);
    add_format(analyze, opt);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimates for a graph document");
    simulate->add_option("path", opt.target)->required();
    add_states(simulate, opt);
    add_format(simulate, opt);
    add_sim(simulate, opt);

    auto* compare = app.add_subcommand("compare", "analytic values against Monte Carlo estimates");
    compare->add_option("path", opt.target)->required();
    add_states(compare, opt);
    add_format(compare, opt);
    add_sim(compare, opt);

    auto* demo = app.add_subcommand("demo", "print or analyze a built-in document");
    demo->add_option("name", opt.target, "remark2, infinite-star, cycle or two-mfb-line")->required();
    demo->add_flag("--analyze", opt.analyze, "analyze instead of printing the document");
    add_states(demo, opt);
    add_format(demo, opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInputError;
    }

    try {
        if (*validate) {
            return run_validate(opt);
        }
        if (*analyze) {
            return run_analyze(load_valid(opt.target), opt);
        }
        if (*simulate) {
            return run_simulate(opt);
        }
        if (*compare) {
            return run_compare(opt);
        }
        return run_demo(opt);
    } catch (const bw::Error& e) {
        std::cerr << e.what() << "\n";
        return e.code() == bw::ErrorCode::SingularSystem ? kSingular : kInputError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kInputError;
    }
}
