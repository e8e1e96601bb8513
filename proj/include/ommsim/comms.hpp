#pragma once

#include <cstdint>
#include <set>

#include "ommsim/graph.hpp"

namespace ommsim {

using VehicleId = std::uint32_t;

/// V2V obstacle announcement <sender, node, timestamp>.
struct ObstacleMessage {
    VehicleId sender = 0;
    NodeId node = kInvalidNode;
    Seconds timestamp = 0.0;

    bool operator==(const ObstacleMessage&) const = default;
};

/// Scenario-global dedup tracker: each blocked node is announced at most once
/// per scenario, no matter how many vehicles encounter it.
struct BroadcastRegistry {
    std::set<NodeId> announced;
    std::size_t delivered_count = 0;

    bool already_announced(NodeId node) const { return announced.count(node) != 0; }
};

/// Delivers `msg` to every fleet member except the sender, in fleet order,
/// within the same simulation tick. Suppressed (returns 0) when the node was
/// already announced. `deliver` is invoked once per recipient.
template <typename Fleet, typename Deliver>
std::size_t broadcast(BroadcastRegistry& registry, const ObstacleMessage& msg, Fleet& fleet,
                      Deliver&& deliver) {
    if (registry.already_announced(msg.node)) return 0;
    registry.announced.insert(msg.node);
    std::size_t recipients = 0;
    for (auto& vehicle : fleet) {
        if (vehicle.id == msg.sender) continue;
        deliver(vehicle);
        ++recipients;
    }
    registry.delivered_count += recipients;
    return recipients;
}

} // namespace ommsim
