#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ommsim/engine.hpp"
#include "ommsim/generator.hpp"

#include "audit.hpp"
#include "fixtures.hpp"

using namespace ommsim;

namespace {

ObstacleSchedule schedule_of(std::vector<NodeId> nodes, Seconds appear_at = 0.0) {
    ObstacleSchedule s;
    for (NodeId n : nodes) s.entries.push_back({n, appear_at});
    return s;
}

} // namespace

TEST_CASE("unobstructed run: travel equals the planned cost") {
    auto net = fixtures::triangle();
    auto result = run_scenario(net, {{0, 2}}, ObstacleSchedule{},
                               CoordinationConfig::from_index(1));
    REQUIRE(result.success_rate == 1.0);
    REQUIRE(result.avg_wait_time == 0.0);
    REQUIRE(result.avg_recalculations == 0.0);
    REQUIRE(std::abs(result.per_vehicle[0].travel_time - 2.0) <= 0.1 + 1e-9);
    // spawn + two hops
    REQUIRE(result.per_vehicle[0].visit_log.size() == 3);
}

TEST_CASE("config 2 on a single-corridor graph: cost plus one clearance wait") {
    auto net = fixtures::path3();
    auto result = run_scenario(net, {{0, 2}}, schedule_of({1}),
                               CoordinationConfig::from_index(2));
    const auto& stats = result.per_vehicle[0];
    REQUIRE(stats.arrived);
    REQUIRE(std::abs(stats.wait_time - 10.0) <= 1e-9);
    // unobstructed cost is 5; one tick of skew from the resume boundary
    REQUIRE(std::abs(stats.travel_time - 15.0) <= 0.2 + 1e-9);
    REQUIRE(stats.recalculations == 0);
    REQUIRE(audit::count_events(result.trace, EventKind::Broadcast) == 0);
    REQUIRE(audit::count_events(result.trace, EventKind::Clearance) == 1);

    // the wait starts at the clock of the encounter tick
    bool found_encounter = false;
    for (const auto& e : result.trace) {
        if (e.kind == EventKind::Encounter) {
            REQUIRE(e.t == 0.0);
            REQUIRE(e.node == 1);
            found_encounter = true;
        }
    }
    REQUIRE(found_encounter);
}

TEST_CASE("a node blocking mid-transit freezes the vehicle at the threshold") {
    auto net = fixtures::path3();
    // node 1 blocks at t=1.5 while the vehicle is part-way along 0->1
    auto result = run_scenario(net, {{0, 2}}, schedule_of({1}, 1.5),
                               CoordinationConfig::from_index(2));
    const auto& stats = result.per_vehicle[0];
    REQUIRE(stats.arrived);
    REQUIRE(std::abs(stats.wait_time - 10.0) <= 0.2);

    // entry into node 1 happens only after the clearance event
    Seconds clearance_t = -1.0, entry_t = -1.0;
    for (const auto& e : result.trace) {
        if (e.kind == EventKind::Clearance) clearance_t = e.t;
        if (e.kind == EventKind::Arrival && e.node == 1) entry_t = e.t;
    }
    REQUIRE(clearance_t >= 0.0);
    REQUIRE(entry_t >= clearance_t);
}

TEST_CASE("timeout accounting") {
    SECTION("unreachable destination times out at the cutoff immediately") {
        auto net = fixtures::disconnected();
        auto result = run_scenario(net, {{0, 2}, {0, 1}}, ObstacleSchedule{},
                                   CoordinationConfig::from_index(1));
        REQUIRE(result.per_vehicle[0].travel_time == 300.0);
        REQUIRE_FALSE(result.per_vehicle[0].arrived);
        REQUIRE(result.per_vehicle[1].arrived);
        REQUIRE(result.success_rate == 0.5);
    }
    SECTION("a vehicle still traveling at the cutoff is counted at 300") {
        // crawl: single edge of weight 400 > timeout
        RoadNetwork net({{0, 0, 0}, {1, 1, 0}}, {{0, 1, 400.0}});
        auto result = run_scenario(net, {{0, 1}}, ObstacleSchedule{},
                                   CoordinationConfig::from_index(1));
        REQUIRE(result.per_vehicle[0].travel_time == 300.0);
        REQUIRE_FALSE(result.per_vehicle[0].arrived);
        REQUIRE(audit::count_events(result.trace, EventKind::Timeout) == 1);
    }
}

TEST_CASE("schedule validation runs before stepping") {
    auto net = fixtures::path3();
    REQUIRE_THROWS_AS(
        run_scenario(net, {{0, 2}}, schedule_of({0}), CoordinationConfig::from_index(2)),
        ValidationError);
    REQUIRE_THROWS_AS(
        run_scenario(net, {{0, 2}}, schedule_of({2}), CoordinationConfig::from_index(2)),
        ValidationError);
    REQUIRE_THROWS_AS(run_scenario(net, {}, ObstacleSchedule{},
                                   CoordinationConfig::from_index(1)),
                      ParameterError);
    REQUIRE_THROWS_AS(run_scenario(net, {{0, 0}}, ObstacleSchedule{},
                                   CoordinationConfig::from_index(1)),
                      ValidationError);
}

TEST_CASE("identical inputs produce identical results") {
    auto net = generate_network(30, 70, 5);
    std::vector<std::pair<NodeId, NodeId>> fleet = {{0, 29}, {1, 28}, {2, 27}};
    auto schedule = schedule_of({12, 15});
    auto a = run_scenario(net, fleet, schedule, CoordinationConfig::from_index(6));
    auto b = run_scenario(net, fleet, schedule, CoordinationConfig::from_index(6));
    REQUIRE(a.trace == b.trace);
    REQUIRE(a.avg_travel_time == b.avg_travel_time);
    REQUIRE(a.avg_wait_time == b.avg_wait_time);
    REQUIRE(a.success_rate == b.success_rate);
}

TEST_CASE("vehicle conservation at every tick") {
    auto net = fixtures::two_corridors();
    Simulation sim(net, {{0, 3}, {0, 3}}, fixtures::two_corridor_obstacles(),
                   CoordinationConfig::from_index(4));
    const std::size_t fleet_size = sim.vehicles().size();
    int guard = 0;
    while (!sim.finished() && guard++ < 3200) {
        sim.step();
        std::size_t arrived = 0, timed_out = 0, active = 0;
        for (const auto& v : sim.vehicles()) {
            switch (v.state) {
                case VehicleState::Arrived: ++arrived; break;
                case VehicleState::TimedOut: ++timed_out; break;
                default: ++active; break;
            }
        }
        REQUIRE(arrived + timed_out + active == fleet_size);
    }
}

TEST_CASE("configs without coordination never recalculate or broadcast") {
    auto net = generate_network(20, 45, 3);
    std::vector<std::pair<NodeId, NodeId>> fleet = {{0, 19}, {1, 18}, {2, 17}, {3, 16}};
    auto schedule = schedule_of({9, 10, 11});
    for (int config : {1, 2}) {
        auto result = run_scenario(net, fleet, schedule, CoordinationConfig::from_index(config));
        REQUIRE(result.avg_recalculations == 0.0);
        REQUIRE(audit::count_events(result.trace, EventKind::Broadcast) == 0);
        REQUIRE(audit::count_events(result.trace, EventKind::Reroute) == 0);
    }
}

TEST_CASE("the reactive trigger preempts the clearance timer when a detour exists") {
    auto net = fixtures::three_corridors();
    auto result = run_scenario(net, {{0, 5}}, schedule_of({2}),
                               CoordinationConfig::from_index(6));
    const auto& stats = result.per_vehicle[0];
    REQUIRE(stats.arrived);
    REQUIRE(audit::count_events(result.trace, EventKind::Clearance) == 0);
    REQUIRE(stats.wait_time < 10.0);
    REQUIRE(std::abs(stats.wait_time - 8.0) <= 0.2);
}

TEST_CASE("two-corridor fixture: memory-less rerouting loops, OMM does not") {
    auto net = fixtures::two_corridors();
    auto schedule = fixtures::two_corridor_obstacles();

    auto no_memory = run_scenario(net, {{0, 3}}, schedule, CoordinationConfig::from_index(4));
    auto with_memory = run_scenario(net, {{0, 3}}, schedule, CoordinationConfig::from_index(6));

    SECTION("config 4 bounces between the corridors until the cutoff") {
        REQUIRE(no_memory.success_rate == 0.0);
        auto loops = detect_loops(audit::visit_logs(no_memory), 3);
        REQUIRE_FALSE(loops.empty());
        REQUIRE(loops.front().revisit_count >= 3);
    }
    SECTION("config 6 tries the alternative once, waits out the blockage, arrives") {
        REQUIRE(with_memory.success_rate == 1.0);
        auto loops = detect_loops(audit::visit_logs(with_memory), 3);
        REQUIRE(loops.empty());
        REQUIRE(with_memory.per_vehicle[0].recalculations == 2);
        REQUIRE(audit::count_events(with_memory.trace, EventKind::Clearance) == 1);
    }
    SECTION("config 4 recalculates far more than config 6") {
        REQUIRE(no_memory.avg_recalculations > 2.0 * with_memory.avg_recalculations);
    }
    SECTION("OMM routes stay clear of remembered obstacles") {
        auto violations = audit::omm_purity_violations(with_memory.trace);
        REQUIRE(violations.empty());
    }
}

TEST_CASE("a node blocking under a standing vehicle makes it wait in place") {
    // tick-length edges park the vehicle exactly on node 2 when it blocks
    RoadNetwork net({{0, 0, 0}, {1, 1, 0}, {2, 2, 0}, {3, 3, 0}},
                    {{0, 1, 0.1}, {1, 2, 0.1}, {2, 3, 0.1}});
    ObstacleSchedule schedule;
    schedule.entries = {{2, 0.2}};
    auto result = run_scenario(net, {{0, 3}}, schedule, CoordinationConfig::from_index(2));
    const auto& stats = result.per_vehicle[0];
    REQUIRE(stats.arrived);
    REQUIRE(std::abs(stats.wait_time - 10.0) <= 0.2);

    bool encountered_own_node = false;
    for (const auto& e : result.trace) {
        if (e.kind == EventKind::Encounter && e.node == 2) encountered_own_node = true;
    }
    REQUIRE(encountered_own_node);
    // node 2 was entered exactly once, before it blocked
    std::size_t entries = 0;
    for (const auto& [node, t] : stats.visit_log) {
        if (node == 2) ++entries;
    }
    REQUIRE(entries == 1);
}

TEST_CASE("proactive-only configurations never revisit a node") {
    auto net = fixtures::two_corridors();
    auto schedule = fixtures::two_corridor_obstacles();
    for (int config : {1, 5}) {
        auto result = run_scenario(net, {{0, 3}, {1, 3}}, schedule,
                                   CoordinationConfig::from_index(config));
        REQUIRE(detect_loops(audit::visit_logs(result), 2).empty());
    }
}

TEST_CASE("broadcasts are deduplicated across the fleet") {
    auto net = fixtures::two_corridors();
    // both vehicles head into corridor A and meet the same obstacle
    auto result = run_scenario(net, {{0, 3}, {1, 3}}, fixtures::two_corridor_obstacles(),
                               CoordinationConfig::from_index(6));
    const std::size_t broadcasts = audit::count_events(result.trace, EventKind::Broadcast);
    REQUIRE(broadcasts <= 2); // at most one per obstacle node
}
