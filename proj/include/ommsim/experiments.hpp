#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "ommsim/engine.hpp"
#include "ommsim/errors.hpp"
#include "ommsim/generator.hpp"
#include "ommsim/graph.hpp"
#include "ommsim/graphml.hpp"
#include "ommsim/metrics.hpp"
#include "ommsim/rng.hpp"

namespace ommsim {

// Factor levels of the default factorial design.
inline constexpr std::array<int, 3> kDefaultCarCounts = {15, 35, 55};
inline constexpr std::array<int, 2> kDefaultObstacleCounts = {6, 20};
inline constexpr std::array<MovePattern, 2> kDefaultPatterns = {MovePattern::LeftToRight,
                                                                MovePattern::Random};

/// One requested scenario: a factorial cell plus trial index and the seed all
/// of its randomness derives from.
struct ScenarioSpec {
    int cars = 15;
    int obstacles = 6;
    MovePattern pattern = MovePattern::LeftToRight;
    int config_index = 1;
    int trial = 0;
    std::uint64_t seed = 0;
};

namespace experiments_detail {

inline std::vector<NodeId> quartile_nodes(const RoadNetwork& net, bool leftmost) {
    const auto& nodes = net.nodes();
    std::vector<std::size_t> order(nodes.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (nodes[a].x != nodes[b].x) return nodes[a].x < nodes[b].x;
        return nodes[a].id < nodes[b].id;
    });
    const std::size_t quart = std::max<std::size_t>(1, nodes.size() / 4);
    std::vector<NodeId> out;
    out.reserve(quart);
    if (leftmost) {
        for (std::size_t i = 0; i < quart; ++i) out.push_back(nodes[order[i]].id);
    } else {
        for (std::size_t i = nodes.size() - quart; i < nodes.size(); ++i) {
            out.push_back(nodes[order[i]].id);
        }
    }
    return out;
}

} // namespace experiments_detail

/// Seeded fleet endpoints. LeftToRight draws starts from the leftmost
/// quartile by x and destinations from the rightmost; Random draws both
/// endpoints uniformly. Every pair is distinct and connected.
inline std::vector<std::pair<NodeId, NodeId>> generate_fleet(const RoadNetwork& net, int car_count,
                                                             MovePattern pattern,
                                                             std::uint64_t seed) {
    if (car_count <= 0) throw ParameterError("car_count must be positive");
    if (net.node_count() < 2) throw ParameterError("network too small for a fleet");
    Rng rng(seed_mix(seed, 0x666c656574ULL));

    std::vector<NodeId> starts_pool;
    std::vector<NodeId> dests_pool;
    if (pattern == MovePattern::LeftToRight) {
        starts_pool = experiments_detail::quartile_nodes(net, true);
        dests_pool = experiments_detail::quartile_nodes(net, false);
    } else {
        for (const auto& n : net.nodes()) starts_pool.push_back(n.id);
        dests_pool = starts_pool;
    }

    std::vector<std::pair<NodeId, NodeId>> fleet;
    fleet.reserve(static_cast<std::size_t>(car_count));
    constexpr int kMaxAttempts = 256;
    for (int i = 0; i < car_count; ++i) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
            NodeId s = rng.pick(starts_pool);
            NodeId d = rng.pick(dests_pool);
            if (s == d) continue;
            if (!shortest_path(net, s, d)) continue;
            fleet.emplace_back(s, d);
            placed = true;
            break;
        }
        if (!placed) {
            throw GenerationError("no feasible endpoint pair for vehicle " + std::to_string(i) +
                                  " (seed=" + std::to_string(seed) + ")");
        }
    }
    return fleet;
}

/// Seeded obstacle placement over non-endpoint nodes, with at least half of
/// the obstacles (when possible) on some vehicle's initial shortest path so
/// that obstacles actually interact with traffic.
inline ObstacleSchedule generate_obstacles(const RoadNetwork& net,
                                           const std::vector<std::pair<NodeId, NodeId>>& fleet,
                                           int obstacle_count, std::uint64_t seed) {
    if (obstacle_count < 0) throw ParameterError("obstacle_count must be non-negative");
    ObstacleSchedule schedule;
    if (obstacle_count == 0) return schedule;

    std::set<NodeId> endpoints;
    for (const auto& [s, d] : fleet) {
        endpoints.insert(s);
        endpoints.insert(d);
    }
    std::set<NodeId> candidate_set;
    for (const auto& n : net.nodes()) {
        if (!endpoints.count(n.id)) candidate_set.insert(n.id);
    }
    if (candidate_set.size() < static_cast<std::size_t>(obstacle_count)) {
        throw ValidationError("not enough non-endpoint nodes for " +
                              std::to_string(obstacle_count) + " obstacles");
    }

    std::set<NodeId> on_path_set;
    for (const auto& [s, d] : fleet) {
        auto route = shortest_path(net, s, d);
        if (!route) continue;
        for (NodeId n : route->nodes) {
            if (candidate_set.count(n)) on_path_set.insert(n);
        }
    }

    Rng rng(seed_mix(seed, 0x6f627374ULL));
    std::vector<NodeId> on_path(on_path_set.begin(), on_path_set.end());
    rng.shuffle(on_path);
    const std::size_t want_on_path =
        std::min(on_path.size(), (static_cast<std::size_t>(obstacle_count) + 1) / 2);

    std::set<NodeId> chosen(on_path.begin(),
                            on_path.begin() + static_cast<std::ptrdiff_t>(want_on_path));
    std::vector<NodeId> rest;
    for (NodeId n : candidate_set) {
        if (!chosen.count(n)) rest.push_back(n);
    }
    rng.shuffle(rest);
    for (NodeId n : rest) {
        if (chosen.size() >= static_cast<std::size_t>(obstacle_count)) break;
        chosen.insert(n);
    }

    for (NodeId n : chosen) {
        schedule.entries.push_back({n, 0.0});
    }
    return schedule;
}

/// One factorial cell outcome; `error` is set when the scenario could not be
/// generated or validated, without aborting the rest of the matrix.
struct MatrixEntry {
    ScenarioDescriptor descriptor;
    std::optional<ScenarioResult> result;
    std::string error;
};

struct ExperimentMatrix {
    std::vector<MatrixEntry> entries;

    std::vector<ScenarioResult> results() const {
        std::vector<ScenarioResult> out;
        for (const auto& e : entries) {
            if (e.result) out.push_back(*e.result);
        }
        return out;
    }
};

/// Seed for one scenario cell+trial. Deliberately independent of the config
/// index so all six configurations of a cell share the identical fleet and
/// obstacle schedule, isolating coordination effects.
inline std::uint64_t scenario_seed(std::uint64_t base_seed, int cars, int obstacles,
                                   MovePattern pattern, int trial) {
    return seed_mix(base_seed,
                    {static_cast<std::uint64_t>(cars), static_cast<std::uint64_t>(obstacles),
                     static_cast<std::uint64_t>(pattern == MovePattern::LeftToRight ? 0 : 1),
                     static_cast<std::uint64_t>(trial)});
}

/// Runs a single spec end to end (fleet + obstacles + simulation). A fleet
/// that leaves too few non-endpoint nodes for the requested obstacles is
/// regenerated from derived sub-seeds, deterministically, so every config of
/// the cell still sees the identical final fleet and schedule.
inline ScenarioResult run_spec(const RoadNetwork& net, const ScenarioSpec& spec,
                               Seconds tick = 0.1) {
    constexpr std::uint64_t kMaxPlacementAttempts = 16;
    std::vector<std::pair<NodeId, NodeId>> fleet;
    ObstacleSchedule schedule;
    for (std::uint64_t attempt = 0;; ++attempt) {
        fleet = generate_fleet(net, spec.cars, spec.pattern, seed_mix(spec.seed, {1, attempt}));
        try {
            schedule =
                generate_obstacles(net, fleet, spec.obstacles, seed_mix(spec.seed, {2, attempt}));
            break;
        } catch (const ValidationError&) {
            if (attempt + 1 >= kMaxPlacementAttempts) throw;
        }
    }
    schedule.tick = tick;
    auto config = CoordinationConfig::from_index(spec.config_index);
    ScenarioDescriptor descriptor{spec.cars, spec.obstacles, spec.pattern, spec.config_index,
                                  spec.trial, spec.seed};
    return run_scenario(net, fleet, schedule, config, descriptor);
}

/// The full factorial matrix (3 densities x 2 obstacle levels x 2 patterns x
/// 6 configurations) for the given number of trials. Scenario jobs are
/// independent; `parallelism` workers consume them, and the collected output
/// is ordered by job index, so results do not depend on the worker count.
inline ExperimentMatrix run_matrix(const RoadNetwork& net, int trials, std::uint64_t base_seed,
                                   unsigned parallelism = 1) {
    if (trials < 1) throw ParameterError("trials must be >= 1");
    if (parallelism == 0) parallelism = 1;

    std::vector<ScenarioSpec> specs;
    for (int cars : kDefaultCarCounts) {
        for (int obstacles : kDefaultObstacleCounts) {
            for (MovePattern pattern : kDefaultPatterns) {
                for (int config : kAllConfigIndices) {
                    for (int trial = 0; trial < trials; ++trial) {
                        ScenarioSpec spec;
                        spec.cars = cars;
                        spec.obstacles = obstacles;
                        spec.pattern = pattern;
                        spec.config_index = config;
                        spec.trial = trial;
                        spec.seed = scenario_seed(base_seed, cars, obstacles, pattern, trial);
                        specs.push_back(spec);
                    }
                }
            }
        }
    }

    ExperimentMatrix matrix;
    matrix.entries.resize(specs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= specs.size()) return;
            const ScenarioSpec& spec = specs[i];
            MatrixEntry& entry = matrix.entries[i];
            entry.descriptor = {spec.cars, spec.obstacles, spec.pattern,
                                spec.config_index, spec.trial, spec.seed};
            try {
                entry.result = run_spec(net, spec);
            } catch (const SimError& e) {
                entry.error = e.what();
            }
        }
    };
    if (parallelism == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(parallelism);
        for (unsigned i = 0; i < parallelism; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return matrix;
}

// ---------------------------------------------------------------------------
// Artifact export
// ---------------------------------------------------------------------------

/// Metrics CSV across matrix entries: successful rows carry their aggregates,
/// failed rows keep their identity columns with empty metric fields.
inline std::string render_matrix_csv(const ExperimentMatrix& matrix) {
    std::vector<const MatrixEntry*> rows;
    rows.reserve(matrix.entries.size());
    for (const auto& e : matrix.entries) rows.push_back(&e);
    std::sort(rows.begin(), rows.end(), [](const MatrixEntry* a, const MatrixEntry* b) {
        const auto& da = a->descriptor;
        const auto& db = b->descriptor;
        return std::tie(da.cars, da.obstacles, da.pattern, da.config_index, da.trial) <
               std::tie(db.cars, db.obstacles, db.pattern, db.config_index, db.trial);
    });
    std::string out = kMetricsCsvHeader;
    out += '\n';
    for (const MatrixEntry* e : rows) {
        if (e->result) {
            out += metrics_csv_row(*e->result);
        } else {
            char buf[128];
            std::snprintf(buf, sizeof(buf), "%d,%d,%s,%d,%d,%llu,,,,", e->descriptor.cars,
                          e->descriptor.obstacles, pattern_name(e->descriptor.pattern),
                          e->descriptor.config_index, e->descriptor.trial,
                          static_cast<unsigned long long>(e->descriptor.seed));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

inline std::string trace_file_name(const ScenarioDescriptor& d) {
    return "cars" + std::to_string(d.cars) + "_obs" + std::to_string(d.obstacles) + "_" +
           pattern_name(d.pattern) + "_cfg" + std::to_string(d.config_index) + "_trial" +
           std::to_string(d.trial) + ".jsonl";
}

namespace experiments_detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw IoError("write failed for " + path.string());
}

} // namespace experiments_detail

/// Writes metrics.csv, summary.txt, traces/*.jsonl and network.graphml into
/// `out_dir`, creating it as needed.
inline void write_artifacts(const ExperimentMatrix& matrix, const RoadNetwork& net,
                            const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir / "traces", ec);
    if (ec) throw IoError("cannot create output directory " + out_dir.string());

    experiments_detail::write_text_file(out_dir / "metrics.csv", render_matrix_csv(matrix));

    std::string summary = render_summary(matrix.results());
    bool any_failure = false;
    for (const auto& e : matrix.entries) {
        if (!e.error.empty()) {
            if (!any_failure) {
                summary += "\nFailed cells:\n";
                any_failure = true;
            }
            summary += "  " + trace_file_name(e.descriptor) + ": " + e.error + "\n";
        }
    }
    experiments_detail::write_text_file(out_dir / "summary.txt", summary);

    std::string per_vehicle = kPerVehicleCsvHeader;
    per_vehicle += '\n';
    {
        std::vector<const MatrixEntry*> rows;
        for (const auto& e : matrix.entries) {
            if (e.result) rows.push_back(&e);
        }
        std::sort(rows.begin(), rows.end(), [](const MatrixEntry* a, const MatrixEntry* b) {
            const auto& da = a->descriptor;
            const auto& db = b->descriptor;
            return std::tie(da.cars, da.obstacles, da.pattern, da.config_index, da.trial) <
                   std::tie(db.cars, db.obstacles, db.pattern, db.config_index, db.trial);
        });
        for (const MatrixEntry* e : rows) per_vehicle += per_vehicle_csv_rows(*e->result);
    }
    experiments_detail::write_text_file(out_dir / "per_vehicle.csv", per_vehicle);

    for (const auto& e : matrix.entries) {
        if (!e.result) continue;
        std::ofstream trace_out(out_dir / "traces" / trace_file_name(e.descriptor),
                                std::ios::binary);
        if (!trace_out) throw IoError("cannot write trace for " + trace_file_name(e.descriptor));
        write_jsonl(e.result->trace, trace_out);
    }

    std::ofstream net_out(out_dir / "network.graphml", std::ios::binary);
    if (!net_out) throw IoError("cannot write network.graphml");
    save_network(net, net_out);
}

} // namespace ommsim
