#pragma once

#include <optional>
#include <set>
#include <vector>

#include "ommsim/comms.hpp"
#include "ommsim/graph.hpp"

namespace ommsim {

enum class VehicleState {
    Traveling,
    WaitingAtObstacle,
    Arrived,
    TimedOut,
};

/// Per-vehicle accumulated statistics.
struct VehicleStats {
    Seconds travel_time = 0.0;
    Seconds wait_time = 0.0;       // cumulative time stationary at obstacles
    std::size_t recalculations = 0; // path computations after the initial plan
    bool arrived = false;
    std::vector<std::pair<NodeId, Seconds>> visit_log; // (node, arrival time)
};

/// In-progress transfer toward route.nodes[0] that is not an on-route edge:
/// either a backtrack to the previous node or completion of an edge the
/// vehicle was already committed to when its route was replaced.
struct SyntheticTransit {
    NodeId to = kInvalidNode;
    Seconds elapsed = 0.0;
    Seconds total = 0.0;
};

/// One agent. Mutated only by the engine's step loop and the agent
/// operations; whole scenarios can move between threads.
struct Vehicle {
    VehicleId id = 0;
    NodeId start = kInvalidNode;
    NodeId destination = kInvalidNode;

    Route route;                 // current plan; final node == destination
    std::size_t route_pos = 0;   // index of the node the vehicle last stood at
    Seconds edge_elapsed = 0.0;  // progress along route[route_pos] -> route[route_pos+1]
    std::optional<SyntheticTransit> transit;

    std::set<NodeId> memory;     // known obstacles (OMM)
    std::optional<Seconds> wait_started_at;
    NodeId blocking = kInvalidNode;   // node the vehicle is currently blocked by
    bool reroute_fired = false;       // 8 s trigger fired for this wait episode
    NodeId entry_pass = kInvalidNode; // one-shot permission to enter a blocked node

    VehicleState state = VehicleState::Traveling;
    VehicleStats stats;

    /// Node the vehicle is standing at, or is committed to arriving at next.
    /// A vehicle part-way along an edge cannot abandon it, so its position
    /// for planning purposes is the node it is approaching.
    NodeId current_node() const {
        if (transit) return transit->to;
        if (route.nodes.empty()) return start;
        if (edge_elapsed > 0.0 && route_pos + 1 < route.nodes.size()) {
            return route.nodes[route_pos + 1];
        }
        return route.nodes[route_pos];
    }

    /// Next on-route node the vehicle would enter, if any.
    std::optional<NodeId> next_node() const {
        if (transit) return transit->to;
        if (route_pos + 1 < route.nodes.size()) return route.nodes[route_pos + 1];
        return std::nullopt;
    }

    bool mid_edge() const { return edge_elapsed > 0.0 || transit.has_value(); }

    bool terminal() const {
        return state == VehicleState::Arrived || state == VehicleState::TimedOut;
    }

    /// Remembers a blocked node, never the endpoints of the current journey.
    void remember_obstacle(NodeId node) {
        if (node == start || node == destination) return;
        memory.insert(node);
    }

    /// Remaining planned nodes, starting at current_node().
    std::vector<NodeId> remaining_route() const {
        if (route.nodes.empty()) return {};
        std::size_t from = route_pos;
        if (!transit && edge_elapsed > 0.0 && route_pos + 1 < route.nodes.size()) {
            from = route_pos + 1;
        }
        return std::vector<NodeId>(route.nodes.begin() + static_cast<std::ptrdiff_t>(from),
                                   route.nodes.end());
    }

    /// Ends a waiting episode at `now`, folding the dwell into wait_time.
    void end_wait(Seconds now) {
        if (wait_started_at) {
            stats.wait_time += now - *wait_started_at;
            wait_started_at.reset();
        }
        blocking = kInvalidNode;
        reroute_fired = false;
    }
};

} // namespace ommsim
