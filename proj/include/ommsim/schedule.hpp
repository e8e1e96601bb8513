#pragma once

#include <cmath>
#include <set>
#include <string>
#include <vector>

#include "ommsim/errors.hpp"
#include "ommsim/graph.hpp"

namespace ommsim {

/// Where and when nodes become blocked, plus the timing constants governing
/// the whole scenario.
struct ObstacleSchedule {
    struct Entry {
        NodeId node = kInvalidNode;
        Seconds appear_at = 0.0;
    };

    std::vector<Entry> entries;
    Seconds clearance_threshold = 10.0; // per-vehicle wait before resuming through
    Seconds reroute_threshold = 8.0;    // reactive trigger
    Seconds timeout = 300.0;            // journey cutoff
    Seconds tick = 0.1;

    /// Checks structural invariants and that no obstacle sits on a fleet
    /// endpoint. `fleet` is (start, destination) pairs.
    void validate(const RoadNetwork& net,
                  const std::vector<std::pair<NodeId, NodeId>>& fleet) const {
        if (!(tick > 0.0) || tick > 1.0) {
            throw ValidationError("tick must be in (0, 1]");
        }
        auto tick_multiple = [&](Seconds v, const char* what) {
            const double ratio = v / tick;
            if (std::abs(ratio - std::round(ratio)) > 1e-6) {
                throw ValidationError(std::string(what) + " must be an integer multiple of tick");
            }
        };
        tick_multiple(clearance_threshold, "clearance threshold");
        tick_multiple(reroute_threshold, "reroute threshold");
        tick_multiple(timeout, "timeout");

        std::set<NodeId> seen;
        std::set<NodeId> endpoints;
        for (const auto& [s, d] : fleet) {
            endpoints.insert(s);
            endpoints.insert(d);
        }
        for (const Entry& e : entries) {
            if (!net.has_node(e.node)) {
                throw ValidationError("scheduled obstacle node " + std::to_string(e.node) +
                                      " does not exist in the network");
            }
            if (!seen.insert(e.node).second) {
                throw ValidationError("obstacle node " + std::to_string(e.node) +
                                      " scheduled more than once");
            }
            if (endpoints.count(e.node)) {
                throw ValidationError("obstacle node " + std::to_string(e.node) +
                                      " is a vehicle start or destination");
            }
            if (e.appear_at < 0.0) {
                throw ValidationError("obstacle appear_at must be non-negative");
            }
        }
    }
};

} // namespace ommsim
