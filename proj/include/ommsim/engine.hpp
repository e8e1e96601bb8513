#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ommsim/agents.hpp"
#include "ommsim/comms.hpp"
#include "ommsim/config.hpp"
#include "ommsim/errors.hpp"
#include "ommsim/graph.hpp"
#include "ommsim/metrics.hpp"
#include "ommsim/schedule.hpp"
#include "ommsim/trace.hpp"
#include "ommsim/vehicle.hpp"

namespace ommsim {

/// Discrete-time scenario simulation. Single-threaded; distinct scenarios may
/// run concurrently since they share only the immutable network.
///
/// Each tick applies, in order:
///   1. activate scheduled obstacles whose appear time has been reached
///   2. advance Traveling vehicles (ascending id), logging node arrivals and
///      turning blocked next-nodes into obstacle encounters
///   3. deliver queued broadcasts to the whole fleet
///   4. run the reactive reroute check, then the clearance check, for each
///      waiting vehicle (ascending id)
///   5. arrivals were marked inline in (2); the run loop applies the cutoff
///   6. advance the clock by one tick
class Simulation {
public:
    Simulation(const RoadNetwork& net, const std::vector<std::pair<NodeId, NodeId>>& fleet,
               ObstacleSchedule schedule, CoordinationConfig config,
               ScenarioDescriptor descriptor = {})
        : net_(net), schedule_(std::move(schedule)), config_(config), descriptor_(descriptor) {
        config_.validate();
        if (fleet.empty()) throw ParameterError("fleet must be nonempty");
        schedule_.validate(net_, fleet);
        timeout_ticks_ = static_cast<long>(std::llround(schedule_.timeout / schedule_.tick));

        pending_activation_ = schedule_.entries;
        std::sort(pending_activation_.begin(), pending_activation_.end(),
                  [](const auto& a, const auto& b) {
                      return std::tie(a.appear_at, a.node) < std::tie(b.appear_at, b.node);
                  });

        vehicles_.reserve(fleet.size());
        for (std::size_t i = 0; i < fleet.size(); ++i) {
            const auto& [start, dest] = fleet[i];
            if (start == dest) {
                throw ValidationError("vehicle " + std::to_string(i) +
                                      " has identical start and destination");
            }
            if (!net_.has_node(start) || !net_.has_node(dest)) {
                throw ValidationError("vehicle " + std::to_string(i) +
                                      " references a node outside the network");
            }
            Vehicle v;
            v.id = static_cast<VehicleId>(i);
            v.start = start;
            v.destination = dest;
            vehicles_.push_back(std::move(v));
        }
        for (Vehicle& v : vehicles_) {
            v.stats.visit_log.push_back({v.start, 0.0});
            trace_.push_back({0.0, EventKind::Arrival, v.id, v.start, ""});
            if (!plan_initial_route(v, net_, config_)) {
                v.state = VehicleState::TimedOut;
                v.stats.travel_time = schedule_.timeout;
                v.stats.arrived = false;
                trace_.push_back({0.0, EventKind::Timeout, v.id, v.start, "no-initial-route"});
            }
        }
    }

    Seconds clock() const { return static_cast<double>(tick_) * schedule_.tick; }

    bool finished() const {
        return std::all_of(vehicles_.begin(), vehicles_.end(),
                           [](const Vehicle& v) { return v.terminal(); });
    }

    const std::vector<Vehicle>& vehicles() const { return vehicles_; }
    const std::set<NodeId>& blocked() const { return blocked_; }
    const BroadcastRegistry& registry() const { return registry_; }
    const std::vector<Event>& trace() const { return trace_; }
    const ObstacleSchedule& schedule() const { return schedule_; }

    /// One simulation tick. Returns the events of this tick.
    std::vector<Event> step() {
        std::vector<Event> events;
        std::vector<ObstacleMessage> outbox;
        const Seconds now = clock();
        const Seconds dt = schedule_.tick;

        // (1) obstacle activation; a vehicle standing exactly on a node the
        // moment it blocks encounters it in place
        if (config_.obstacles_enabled) {
            while (activation_cursor_ < pending_activation_.size() &&
                   pending_activation_[activation_cursor_].appear_at <= now + kTimerEps) {
                const NodeId node = pending_activation_[activation_cursor_].node;
                blocked_.insert(node);
                ++activation_cursor_;
                for (Vehicle& v : vehicles_) {
                    if (v.state != VehicleState::Traveling || v.transit ||
                        v.edge_elapsed > 0.0 || v.route.nodes.empty()) {
                        continue;
                    }
                    if (v.route.nodes[v.route_pos] == node) {
                        begin_encounter(v, node, now, outbox, events);
                    }
                }
            }
        }

        // (2) advance traveling vehicles
        for (Vehicle& v : vehicles_) {
            advance_vehicle(v, now, dt, outbox, events);
        }

        // (3) broadcast delivery
        for (const ObstacleMessage& msg : outbox) {
            const bool fresh = !registry_.already_announced(msg.node);
            broadcast(registry_, msg, vehicles_, [&](Vehicle& recipient) {
                const bool was_waiting = recipient.state == VehicleState::WaitingAtObstacle;
                const NodeId was_blocking = recipient.blocking;
                MessageOutcome outcome = on_message(recipient, msg, net_, config_);
                if (outcome == MessageOutcome::Rerouted) {
                    if (was_waiting && recipient.state == VehicleState::Traveling) {
                        waiters_remove(was_blocking, recipient.id);
                    }
                    events.push_back({now, EventKind::Reroute, recipient.id,
                                      recipient.current_node(),
                                      reroute_detail("message", recipient,
                                                     config_.omm ? recipient.memory
                                                                 : std::set<NodeId>{msg.node})});
                } else if (outcome == MessageOutcome::RerouteFailed) {
                    events.push_back({now, EventKind::Reroute, recipient.id,
                                      recipient.current_node(),
                                      std::string("message no-path")});
                }
            });
            if (fresh) {
                events.push_back({msg.timestamp, EventKind::Broadcast, msg.sender, msg.node, ""});
            }
        }

        // (4) waiting-vehicle timers
        auto is_blocked = [this](NodeId n) { return blocked_.count(n) != 0; };
        for (Vehicle& v : vehicles_) {
            if (v.state != VehicleState::WaitingAtObstacle) continue;
            const NodeId obstaclenode = v.blocking;
            RerouteCheckOutcome outcome = reactive_reroute_check(
                v, net_, now, config_, schedule_.reroute_threshold, is_blocked);
            if (outcome == RerouteCheckOutcome::Backtracking ||
                outcome == RerouteCheckOutcome::ReplannedInPlace) {
                waiters_remove(obstaclenode, v.id);
                const char* mode =
                    outcome == RerouteCheckOutcome::Backtracking ? "backtrack" : "inplace";
                events.push_back({now, EventKind::Reroute, v.id, v.current_node(),
                                  reroute_detail(mode, v,
                                                 config_.omm ? v.memory
                                                             : std::set<NodeId>{obstaclenode})});
            } else if (outcome == RerouteCheckOutcome::NoPath) {
                events.push_back({now, EventKind::Reroute, v.id, v.current_node(),
                                  std::string("reactive no-path")});
            }
            if (v.state == VehicleState::WaitingAtObstacle &&
                clearance_check(v, now, schedule_.clearance_threshold)) {
                events.push_back({now, EventKind::Clearance, v.id, obstaclenode, ""});
                NodeBlock& nb = block_state_[obstaclenode];
                nb.had_full_wait = true;
                nb.waiters.erase(v.id);
                maybe_unblock(obstaclenode);
            }
        }

        // (6) clock
        ++tick_;
        trace_.insert(trace_.end(), events.begin(), events.end());
        return events;
    }

    /// Steps until every vehicle is terminal or the cutoff is reached, then
    /// finalizes timeouts and aggregates.
    ScenarioResult run() {
        while (!finished() && tick_ < timeout_ticks_) {
            step();
        }
        const Seconds cutoff = schedule_.timeout;
        for (Vehicle& v : vehicles_) {
            if (v.terminal()) continue;
            if (v.state == VehicleState::WaitingAtObstacle) {
                v.end_wait(cutoff);
            }
            v.state = VehicleState::TimedOut;
            v.stats.travel_time = cutoff;
            v.stats.arrived = false;
            trace_.push_back({cutoff, EventKind::Timeout, v.id, v.current_node(), ""});
        }

        ScenarioResult result;
        result.descriptor = descriptor_;
        result.config_label = config_.name();
        std::vector<VehicleStats> stats;
        stats.reserve(vehicles_.size());
        for (const Vehicle& v : vehicles_) stats.push_back(v.stats);
        aggregate(stats, vehicles_.size(), result);
        result.trace = trace_;
        return result;
    }

private:
    struct NodeBlock {
        bool had_full_wait = false;
        std::set<VehicleId> waiters;
    };

    bool blocked_for(const Vehicle& v, NodeId node) const {
        return blocked_.count(node) != 0 && v.entry_pass != node;
    }

    void waiters_remove(NodeId node, VehicleId vid) {
        auto it = block_state_.find(node);
        if (it == block_state_.end()) return;
        it->second.waiters.erase(vid);
        maybe_unblock(node);
    }

    void maybe_unblock(NodeId node) {
        auto it = block_state_.find(node);
        if (it != block_state_.end() && it->second.had_full_wait && it->second.waiters.empty()) {
            blocked_.erase(node);
        }
    }

    void begin_encounter(Vehicle& v, NodeId node, Seconds at,
                         std::vector<ObstacleMessage>& outbox, std::vector<Event>& events) {
        auto msg = on_obstacle_encounter(v, node, at, config_, registry_);
        block_state_[node].waiters.insert(v.id);
        events.push_back({at, EventKind::Encounter, v.id, node, ""});
        if (msg) outbox.push_back(*msg);
    }

    void arrive_at(Vehicle& v, NodeId node, Seconds at, std::vector<Event>& events) {
        v.stats.visit_log.push_back({node, at});
        if (v.entry_pass == node) v.entry_pass = kInvalidNode;
        if (v.transit && v.transit->to == node) {
            v.transit.reset();
        } else {
            v.route_pos += 1;
        }
        v.edge_elapsed = 0.0;
        const bool is_destination = node == v.destination;
        events.push_back(
            {at, EventKind::Arrival, v.id, node, is_destination ? "destination" : ""});
        if (is_destination) {
            v.state = VehicleState::Arrived;
            v.stats.travel_time = at;
            v.stats.arrived = true;
        }
    }

    void advance_vehicle(Vehicle& v, Seconds now, Seconds dt,
                         std::vector<ObstacleMessage>& outbox, std::vector<Event>& events) {
        if (v.state != VehicleState::Traveling) return;
        Seconds budget = dt;
        while (budget > 0.0 && v.state == VehicleState::Traveling) {
            if (v.transit) {
                const Seconds need = v.transit->total - v.transit->elapsed;
                if (need > budget) {
                    v.transit->elapsed += budget;
                    budget = 0.0;
                    break;
                }
                budget -= need;
                const NodeId target = v.transit->to;
                if (blocked_for(v, target)) {
                    v.transit->elapsed = v.transit->total;
                    begin_encounter(v, target, now + (dt - budget), outbox, events);
                    break;
                }
                arrive_at(v, target, now + (dt - budget), events);
                continue;
            }
            if (v.route_pos + 1 >= v.route.nodes.size()) break;
            const NodeId from = v.route.nodes[v.route_pos];
            const NodeId next = v.route.nodes[v.route_pos + 1];
            if (v.edge_elapsed == 0.0 && blocked_for(v, next)) {
                // departure gate: the vehicle stays at `from` and waits
                begin_encounter(v, next, now + (dt - budget), outbox, events);
                break;
            }
            const Seconds weight = net_.edge_weight(from, next);
            const Seconds need = weight - v.edge_elapsed;
            if (need > budget) {
                v.edge_elapsed += budget;
                budget = 0.0;
                break;
            }
            budget -= need;
            if (blocked_for(v, next)) {
                // the node blocked while the vehicle was already committed:
                // freeze at the threshold instead of entering
                v.edge_elapsed = weight;
                begin_encounter(v, next, now + (dt - budget), outbox, events);
                break;
            }
            arrive_at(v, next, now + (dt - budget), events);
        }
    }

    static std::string reroute_detail(const char* mode, const Vehicle& v,
                                      const std::set<NodeId>& excluded) {
        std::string detail = mode;
        detail += " route=";
        const auto& nodes = v.route.nodes;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (i) detail += '>';
            detail += std::to_string(nodes[i]);
        }
        detail += " excluded=";
        bool first = true;
        for (NodeId n : excluded) {
            if (!first) detail += ',';
            detail += std::to_string(n);
            first = false;
        }
        return detail;
    }

    const RoadNetwork& net_;
    ObstacleSchedule schedule_;
    CoordinationConfig config_;
    ScenarioDescriptor descriptor_;

    std::vector<Vehicle> vehicles_;
    std::vector<ObstacleSchedule::Entry> pending_activation_;
    std::size_t activation_cursor_ = 0;
    std::set<NodeId> blocked_;
    std::map<NodeId, NodeBlock> block_state_;
    BroadcastRegistry registry_;
    std::vector<Event> trace_;
    long tick_ = 0;
    long timeout_ticks_ = 0;
};

/// Runs one scenario start to finish.
inline ScenarioResult run_scenario(const RoadNetwork& net,
                                   const std::vector<std::pair<NodeId, NodeId>>& fleet,
                                   const ObstacleSchedule& schedule,
                                   const CoordinationConfig& config,
                                   const ScenarioDescriptor& descriptor = {}) {
    Simulation sim(net, fleet, schedule, config, descriptor);
    return sim.run();
}

} // namespace ommsim
