#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>

#include "ommsim/experiments.hpp"

using namespace ommsim;

TEST_CASE("left-to-right fleets move across the map") {
    auto net = generate_network(86, 161, 1);
    auto fleet = generate_fleet(net, 55, MovePattern::LeftToRight, 12345);
    REQUIRE(fleet.size() == 55);
    double max_start_x = -1e18, min_dest_x = 1e18;
    for (const auto& [s, d] : fleet) {
        REQUIRE(s != d);
        max_start_x = std::max(max_start_x, net.node(s).x);
        min_dest_x = std::min(min_dest_x, net.node(d).x);
    }
    REQUIRE(max_start_x < min_dest_x);
}

TEST_CASE("fleet generation is deterministic and validated") {
    auto net = generate_network(40, 90, 9);
    auto a = generate_fleet(net, 10, MovePattern::Random, 7);
    auto b = generate_fleet(net, 10, MovePattern::Random, 7);
    REQUIRE(a == b);
    auto c = generate_fleet(net, 10, MovePattern::Random, 8);
    REQUIRE(a != c);
    for (const auto& [s, d] : a) {
        REQUIRE(s != d);
        REQUIRE(shortest_path(net, s, d));
    }
    REQUIRE_THROWS_AS(generate_fleet(net, 0, MovePattern::Random, 1), ParameterError);
}

TEST_CASE("obstacle schedules avoid endpoints and favor traveled paths") {
    auto net = generate_network(86, 161, 1);
    auto fleet = generate_fleet(net, 55, MovePattern::LeftToRight, 4242);

    SECTION("zero obstacles degenerate cleanly") {
        auto schedule = generate_obstacles(net, fleet, 0, 5);
        REQUIRE(schedule.entries.empty());
    }
    SECTION("requested count of distinct non-endpoint nodes") {
        auto schedule = generate_obstacles(net, fleet, 20, 5);
        REQUIRE(schedule.entries.size() == 20);
        std::set<NodeId> endpoints;
        for (const auto& [s, d] : fleet) {
            endpoints.insert(s);
            endpoints.insert(d);
        }
        std::set<NodeId> seen;
        for (const auto& e : schedule.entries) {
            REQUIRE(seen.insert(e.node).second);
            REQUIRE_FALSE(endpoints.count(e.node));
            REQUIRE(e.appear_at == 0.0);
        }
    }
    SECTION("at least half the obstacles touch an initial shortest path") {
        auto schedule = generate_obstacles(net, fleet, 20, 5);
        std::set<NodeId> on_path;
        for (const auto& [s, d] : fleet) {
            auto route = shortest_path(net, s, d);
            REQUIRE(route);
            for (NodeId n : route->nodes) on_path.insert(n);
        }
        std::size_t hits = 0;
        for (const auto& e : schedule.entries) {
            if (on_path.count(e.node)) ++hits;
        }
        REQUIRE(hits >= 10);
    }
    SECTION("deterministic per seed") {
        auto a = generate_obstacles(net, fleet, 6, 11);
        auto b = generate_obstacles(net, fleet, 6, 11);
        REQUIRE(a.entries.size() == b.entries.size());
        for (std::size_t i = 0; i < a.entries.size(); ++i) {
            REQUIRE(a.entries[i].node == b.entries[i].node);
        }
    }
}

TEST_CASE("matrix covers every factorial cell exactly trials times") {
    auto net = generate_network(86, 161, 77);
    auto matrix = run_matrix(net, 1, 555, 2);
    REQUIRE(matrix.entries.size() == 72);

    std::map<std::tuple<int, int, int, int>, int> counts;
    for (const auto& e : matrix.entries) {
        REQUIRE(e.error.empty());
        REQUIRE(e.result.has_value());
        counts[{e.descriptor.cars, e.descriptor.obstacles,
                static_cast<int>(e.descriptor.pattern), e.descriptor.config_index}] += 1;
    }
    REQUIRE(counts.size() == 72);
    for (const auto& [key, count] : counts) {
        REQUIRE(count == 1);
    }
}

TEST_CASE("all six configs of a cell share fleet and obstacles") {
    auto net = generate_network(86, 161, 77);
    auto matrix = run_matrix(net, 1, 100, 1);
    std::map<std::tuple<int, int, int>, std::set<std::uint64_t>> seeds_per_cell;
    for (const auto& e : matrix.entries) {
        seeds_per_cell[{e.descriptor.cars, e.descriptor.obstacles,
                        static_cast<int>(e.descriptor.pattern)}]
            .insert(e.descriptor.seed);
    }
    for (const auto& [cell, seeds] : seeds_per_cell) {
        REQUIRE(seeds.size() == 1); // identical seed across the six configs
    }
}

TEST_CASE("trial seeds are isolated") {
    auto net = generate_network(86, 161, 77);
    auto one = run_matrix(net, 1, 900, 2);
    auto two = run_matrix(net, 2, 900, 2);

    std::map<std::string, std::string> rows_one, rows_two;
    auto collect = [](const ExperimentMatrix& m, std::map<std::string, std::string>& rows) {
        for (const auto& e : m.entries) {
            if (e.descriptor.trial != 0) continue;
            rows[trace_file_name(e.descriptor)] = metrics_csv_row(*e.result);
        }
    };
    collect(one, rows_one);
    collect(two, rows_two);
    REQUIRE(rows_one == rows_two); // adding a trial leaves trial 0 untouched
}

TEST_CASE("matrix output is independent of parallelism") {
    auto net = generate_network(86, 161, 77);
    auto serial = run_matrix(net, 1, 321, 1);
    auto parallel = run_matrix(net, 1, 321, 4);
    REQUIRE(render_matrix_csv(serial) == render_matrix_csv(parallel));
}

TEST_CASE("matrix results respect the clock bound") {
    auto net = generate_network(86, 161, 77);
    auto matrix = run_matrix(net, 1, 2024, 2);
    for (const auto& e : matrix.entries) {
        REQUIRE(e.result.has_value());
        for (const auto& stats : e.result->per_vehicle) {
            REQUIRE(stats.travel_time <= 300.0);
            REQUIRE(stats.wait_time <= stats.travel_time + 1e-9);
            // non-arrival and the 300 s cutoff value imply each other
            REQUIRE((stats.arrived == (stats.travel_time < 300.0)));
        }
    }
}

TEST_CASE("matrix summary reports the coordination contrast") {
    auto net = generate_network(86, 161, 77);
    auto matrix = run_matrix(net, 1, 2024, 2);
    auto summary = render_summary(matrix.results());
    auto row_pos = summary.find("Config 6 vs. Config 4");
    REQUIRE(row_pos != std::string::npos);
    auto line_end = summary.find('\n', row_pos);
    std::string row = summary.substr(row_pos, line_end - row_pos);
    // full coordination beats memory-less rerouting on every axis
    REQUIRE(row.find("-") != std::string::npos);
    REQUIRE(row.find("+") == std::string::npos);
}

TEST_CASE("matrix csv shape") {
    auto net = generate_network(86, 161, 77);
    auto matrix = run_matrix(net, 1, 1, 2);
    auto csv = render_matrix_csv(matrix);
    std::size_t lines = 0;
    for (char c : csv) {
        if (c == '\n') ++lines;
    }
    REQUIRE(lines == 73); // header + 72 rows
    REQUIRE(csv.rfind(kMetricsCsvHeader, 0) == 0);
}
