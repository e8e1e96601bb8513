// Command-line front end: single scenario runs, the full factorial matrix,
// and routing-loop diagnostics over recorded traces.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ommsim/ommsim.hpp"

namespace {

using namespace ommsim;

RoadNetwork resolve_network(const std::string& network_file, const std::string& generate_arg,
                            std::uint64_t seed) {
    if (!network_file.empty()) {
        std::ifstream in(network_file, std::ios::binary);
        if (!in) throw IoError("cannot open network file " + network_file);
        return load_network(in);
    }
    std::size_t nodes = 86, edges = 161;
    if (!generate_arg.empty()) {
        auto comma = generate_arg.find(',');
        if (comma == std::string::npos) {
            throw ParameterError("--generate expects N,M");
        }
        nodes = std::stoull(generate_arg.substr(0, comma));
        edges = std::stoull(generate_arg.substr(comma + 1));
    }
    return generate_network(nodes, edges, seed);
}

MovePattern parse_pattern(const std::string& name) {
    if (name == "left-right") return MovePattern::LeftToRight;
    if (name == "random") return MovePattern::Random;
    throw ParameterError("pattern must be left-right or random, got \"" + name + "\"");
}

int cmd_run(const std::string& network_file, const std::string& generate_arg, int cars,
            int obstacles, const std::string& pattern_name, int config, std::uint64_t seed,
            int trials, double tick, const std::string& out_dir) {
    auto net = resolve_network(network_file, generate_arg, seed);
    const MovePattern pattern = parse_pattern(pattern_name);

    ExperimentMatrix matrix;
    for (int trial = 0; trial < trials; ++trial) {
        ScenarioSpec spec;
        spec.cars = cars;
        spec.obstacles = obstacles;
        spec.pattern = pattern;
        spec.config_index = config;
        spec.trial = trial;
        spec.seed = scenario_seed(seed, cars, obstacles, pattern, trial);
        MatrixEntry entry;
        entry.descriptor = {cars, obstacles, pattern, config, trial, spec.seed};
        entry.result = run_spec(net, spec, tick);
        matrix.entries.push_back(std::move(entry));
    }
    write_artifacts(matrix, net, out_dir);

    std::cout << render_summary(matrix.results());
    std::cout << "\nwrote " << matrix.entries.size() << " scenario(s) to " << out_dir << "\n";
    return 0;
}

int cmd_matrix(const std::string& network_file, const std::string& generate_arg, int trials,
               std::uint64_t base_seed, unsigned parallelism, const std::string& out_dir) {
    auto net = resolve_network(network_file, generate_arg, base_seed);
    auto matrix = run_matrix(net, trials, base_seed, parallelism);
    write_artifacts(matrix, net, out_dir);

    std::size_t failed = 0;
    for (const auto& e : matrix.entries) {
        if (!e.error.empty()) ++failed;
    }
    std::cout << render_summary(matrix.results());
    std::cout << "\nwrote " << matrix.entries.size() << " rows to " << out_dir;
    if (failed) std::cout << " (" << failed << " failed cells, see summary.txt)";
    std::cout << "\n";
    return 0;
}

int cmd_loops(const std::string& trace_file, std::size_t threshold) {
    std::ifstream in(trace_file, std::ios::binary);
    if (!in) throw IoError("cannot open trace file " + trace_file);
    auto events = read_jsonl(in);
    auto loops = detect_loops_in_trace(events, threshold);
    if (loops.empty()) {
        std::cout << "no loop diagnostics at threshold " << threshold << "\n";
        return 0;
    }
    std::printf("%8s %8s %9s %12s %12s\n", "vehicle", "node", "revisits", "first(s)",
                "second(s)");
    for (const auto& d : loops) {
        std::printf("%8u %8u %9zu %12.3f %12.3f\n", d.vehicle, d.node, d.revisit_count,
                    d.first_interval.first, d.first_interval.second);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic multi-agent vehicle routing simulator"};
    app.require_subcommand(1);

    // run
    std::string network_file, generate_arg, out_dir = "out", pattern_name = "left-right";
    int cars = 15, obstacles = 6, config = 6, trials = 1;
    std::uint64_t seed = 1;
    double tick = 0.1;
    auto* run = app.add_subcommand("run", "run one scenario configuration");
    run->add_option("--cars", cars, "fleet size")->check(CLI::PositiveNumber);
    run->add_option("--obstacles", obstacles, "obstacle count")->check(CLI::NonNegativeNumber);
    run->add_option("--pattern", pattern_name, "left-right|random");
    run->add_option("--config", config, "coordination configuration 1..6")
        ->check(CLI::Range(1, 6));
    run->add_option("--seed", seed, "base seed");
    run->add_option("--trials", trials, "trial repetitions")->check(CLI::PositiveNumber);
    run->add_option("--network", network_file, "GraphML network file");
    run->add_option("--generate", generate_arg, "generate a network: N,M");
    run->add_option("--tick", tick, "simulation tick seconds");
    run->add_option("--out", out_dir, "output directory");

    // matrix
    std::string m_network_file, m_generate_arg, m_out_dir = "matrix_out";
    int m_trials = 3;
    std::uint64_t base_seed = 1;
    unsigned parallelism = 1;
    auto* matrix = app.add_subcommand("matrix", "run the full 72-cell factorial matrix");
    matrix->add_option("--trials", m_trials, "trials per cell")->check(CLI::PositiveNumber);
    matrix->add_option("--base-seed", base_seed, "matrix base seed");
    matrix->add_option("--network", m_network_file, "GraphML network file");
    matrix->add_option("--generate", m_generate_arg, "generate a network: N,M");
    matrix->add_option("--parallelism", parallelism, "worker threads")
        ->check(CLI::PositiveNumber);
    matrix->add_option("--out", m_out_dir, "output directory");

    // loops
    std::string trace_file;
    std::size_t threshold = 2;
    auto* loops = app.add_subcommand("loops", "print loop diagnostics from a trace");
    loops->add_option("--trace", trace_file, "JSONL trace file")->required();
    loops->add_option("--threshold", threshold, "minimum revisit count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // flag problems are validation errors
    }

    try {
        if (run->parsed()) {
            return cmd_run(network_file, generate_arg, cars, obstacles, pattern_name, config,
                           seed, trials, tick, out_dir);
        }
        if (matrix->parsed()) {
            return cmd_matrix(m_network_file, m_generate_arg, m_trials, base_seed, parallelism,
                              m_out_dir);
        }
        if (loops->parsed()) {
            return cmd_loops(trace_file, threshold);
        }
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 2;
    } catch (const SimError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
