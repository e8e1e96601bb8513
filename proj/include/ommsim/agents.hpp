#pragma once

#include <functional>
#include <optional>
#include <set>

#include "ommsim/comms.hpp"
#include "ommsim/config.hpp"
#include "ommsim/graph.hpp"
#include "ommsim/vehicle.hpp"

namespace ommsim {

// Timer comparisons tolerate the dust from clock = tick * dt.
inline constexpr double kTimerEps = 1e-9;

enum class MessageOutcome {
    Unchanged,     // message irrelevant to the current route
    Rerouted,      // route replaced
    RerouteFailed, // recalculation ran but found no path
};

enum class RerouteCheckOutcome {
    NotDue,           // threshold not reached (or not applicable)
    Backtracking,     // moving to the previous node, new route installed
    ReplannedInPlace, // no previous node; new route from the standing node
    NoPath,           // recalculation found nothing; vehicle keeps waiting
};

/// Computes and installs the vehicle's first route. OMM-enabled
/// configurations plan around everything already in memory. Does not count
/// toward recalculations. Returns false when no feasible route exists.
inline bool plan_initial_route(Vehicle& vehicle, const RoadNetwork& net,
                               const CoordinationConfig& config) {
    std::optional<Route> route;
    if (config.omm) {
        route = shortest_path_excluding(net, vehicle.start, vehicle.destination, vehicle.memory);
    } else {
        route = shortest_path(net, vehicle.start, vehicle.destination);
    }
    if (!route) return false;
    vehicle.route = std::move(*route);
    vehicle.route_pos = 0;
    vehicle.edge_elapsed = 0.0;
    vehicle.transit.reset();
    return true;
}

/// Transition into waiting when the node ahead is blocked. Adds the node to
/// memory under OMM and produces a broadcast message when communication is on
/// and the node has not been announced network-wide yet. A vehicle that is
/// already waiting is left untouched.
inline std::optional<ObstacleMessage> on_obstacle_encounter(Vehicle& vehicle, NodeId node,
                                                            Seconds now,
                                                            const CoordinationConfig& config,
                                                            const BroadcastRegistry& registry) {
    if (vehicle.state == VehicleState::WaitingAtObstacle) return std::nullopt;
    vehicle.state = VehicleState::WaitingAtObstacle;
    vehicle.wait_started_at = now;
    vehicle.blocking = node;
    vehicle.reroute_fired = false;
    if (config.omm) vehicle.remember_obstacle(node);
    if (config.communication && !registry.already_announced(node)) {
        return ObstacleMessage{vehicle.id, node, now};
    }
    return std::nullopt;
}

namespace agents_detail {

// Installs a replacement route rooted at the vehicle's committed position.
// A vehicle mid-way along an on-route edge stays committed to that edge; the
// remainder is carried as a synthetic transit toward the new route's head.
inline void install_route(Vehicle& vehicle, const RoadNetwork& net, Route route) {
    if (!vehicle.transit && vehicle.edge_elapsed > 0.0) {
        NodeId from = vehicle.route.nodes[vehicle.route_pos];
        NodeId to = vehicle.route.nodes[vehicle.route_pos + 1];
        vehicle.transit = SyntheticTransit{to, vehicle.edge_elapsed, net.edge_weight(from, to)};
    }
    vehicle.route = std::move(route);
    vehicle.route_pos = 0;
    vehicle.edge_elapsed = 0.0;
}

} // namespace agents_detail

/// Reacts to a received obstacle announcement. Under OMM the node joins
/// memory permanently. If the node lies on the remaining route the route is
/// recomputed from the vehicle's committed position, excluding memory (OMM)
/// or just the announced node (memory-less configurations; the exclusion is
/// not retained, which is what makes routing loops possible).
inline MessageOutcome on_message(Vehicle& vehicle, const ObstacleMessage& msg,
                                 const RoadNetwork& net, const CoordinationConfig& config) {
    if (vehicle.terminal()) return MessageOutcome::Unchanged;
    if (config.omm) vehicle.remember_obstacle(msg.node);

    // A frozen vehicle at the far end of an edge has no routing freedom left.
    if (vehicle.state == VehicleState::WaitingAtObstacle && vehicle.mid_edge()) {
        return MessageOutcome::Unchanged;
    }

    const NodeId current = vehicle.current_node();
    if (msg.node == current) return MessageOutcome::Unchanged;

    const auto remaining = vehicle.remaining_route();
    bool on_route = false;
    for (std::size_t i = 1; i < remaining.size(); ++i) {
        if (remaining[i] == msg.node) {
            on_route = true;
            break;
        }
    }
    if (!on_route) return MessageOutcome::Unchanged;

    std::set<NodeId> exclusions;
    if (config.omm) {
        exclusions = vehicle.memory;
    } else {
        exclusions.insert(msg.node);
    }
    auto replacement = shortest_path_excluding(net, current, vehicle.destination, exclusions);
    vehicle.stats.recalculations += 1;
    if (!replacement) return MessageOutcome::RerouteFailed;

    agents_detail::install_route(vehicle, net, std::move(*replacement));

    if (vehicle.state == VehicleState::WaitingAtObstacle) {
        auto next = vehicle.next_node();
        if (!next || *next != vehicle.blocking) {
            // The new plan no longer leads into the blocking node. A vehicle
            // standing on the blocked node itself may always drive off it.
            if (vehicle.blocking == vehicle.current_node()) {
                vehicle.entry_pass = vehicle.blocking;
            }
            vehicle.end_wait(msg.timestamp);
            vehicle.state = VehicleState::Traveling;
        }
    }
    return MessageOutcome::Rerouted;
}

/// The 8-second reactive trigger. Fires once per waiting episode: the vehicle
/// backtracks to the previous node on its route (charged that edge's full
/// weight as travel) and replans from there, excluding memory under OMM or
/// only the blocking node otherwise. Blocked at spawn, it replans in place.
/// If no path exists the vehicle keeps waiting for the clearance timer.
inline RerouteCheckOutcome reactive_reroute_check(Vehicle& vehicle, const RoadNetwork& net,
                                                  Seconds now, const CoordinationConfig& config,
                                                  Seconds reroute_threshold,
                                                  const std::function<bool(NodeId)>& is_blocked) {
    if (!config.reactive_reroute || vehicle.state != VehicleState::WaitingAtObstacle) {
        return RerouteCheckOutcome::NotDue;
    }
    if (vehicle.reroute_fired) return RerouteCheckOutcome::NotDue;
    if (now - *vehicle.wait_started_at < reroute_threshold - kTimerEps) {
        return RerouteCheckOutcome::NotDue;
    }
    if (!is_blocked(vehicle.blocking)) return RerouteCheckOutcome::NotDue;
    // Frozen at the far end of a synthetic transit: no previous position to
    // retreat to; only the clearance timer applies.
    if (vehicle.transit) return RerouteCheckOutcome::NotDue;
    vehicle.reroute_fired = true;

    NodeId backtrack_to = kInvalidNode;
    double backtrack_cost = 0.0;
    NodeId standing = vehicle.route.nodes[vehicle.route_pos];
    if (vehicle.edge_elapsed > 0.0) {
        // Frozen mid-edge: retreat to the edge's tail over the full weight.
        backtrack_to = standing;
        backtrack_cost =
            net.edge_weight(standing, vehicle.route.nodes[vehicle.route_pos + 1]);
    } else if (vehicle.route_pos > 0) {
        backtrack_to = vehicle.route.nodes[vehicle.route_pos - 1];
        backtrack_cost = net.edge_weight(backtrack_to, standing);
    }

    const NodeId replan_from = (backtrack_to != kInvalidNode) ? backtrack_to : standing;
    std::set<NodeId> exclusions;
    if (config.omm) {
        exclusions = vehicle.memory;
    } else {
        exclusions.insert(vehicle.blocking);
    }
    auto replacement = shortest_path_excluding(net, replan_from, vehicle.destination, exclusions);
    vehicle.stats.recalculations += 1;
    if (!replacement) return RerouteCheckOutcome::NoPath;

    if (backtrack_to == kInvalidNode && vehicle.blocking == replan_from) {
        // replanning in place while standing on the blocked node itself:
        // the vehicle may drive off it
        vehicle.entry_pass = vehicle.blocking;
    }
    vehicle.end_wait(now);
    vehicle.state = VehicleState::Traveling;
    vehicle.route = std::move(*replacement);
    vehicle.route_pos = 0;
    vehicle.edge_elapsed = 0.0;
    if (backtrack_to != kInvalidNode) {
        vehicle.transit = SyntheticTransit{backtrack_to, 0.0, backtrack_cost};
        return RerouteCheckOutcome::Backtracking;
    }
    vehicle.transit.reset();
    return RerouteCheckOutcome::ReplannedInPlace;
}

/// Natural clearance: after 10 seconds of waiting the blockage no longer
/// impedes this vehicle, which resumes its current route straight through
/// the node. Returns true when the vehicle resumed.
inline bool clearance_check(Vehicle& vehicle, Seconds now, Seconds clearance_threshold) {
    if (vehicle.state != VehicleState::WaitingAtObstacle) return false;
    if (now - *vehicle.wait_started_at < clearance_threshold - kTimerEps) return false;
    vehicle.entry_pass = vehicle.blocking;
    vehicle.end_wait(now);
    vehicle.state = VehicleState::Traveling;
    return true;
}

} // namespace ommsim
