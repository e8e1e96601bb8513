#pragma once

// Hand-built networks shared between unit tests and the acceptance suite.

#include <vector>

#include "ommsim/graph.hpp"
#include "ommsim/schedule.hpp"

namespace fixtures {

using ommsim::NodeId;
using ommsim::RoadNetwork;

// 0 -> 1 (1), 1 -> 2 (1), 0 -> 2 (3).  Shortest 0->2 is [0,1,2] cost 2;
// excluding node 1 leaves [0,2] cost 3.
inline RoadNetwork triangle() {
    return RoadNetwork({{0, 0, 0}, {1, 1, 0}, {2, 2, 0}},
                       {{0, 1, 1.0}, {1, 2, 1.0}, {0, 2, 3.0}});
}

// Path 0 -> 1 (2) -> 2 (3); no alternatives.
inline RoadNetwork path3() {
    return RoadNetwork({{0, 0, 0}, {1, 1, 0}, {2, 2, 0}}, {{0, 1, 2.0}, {1, 2, 3.0}});
}

// Three parallel corridors from 0 to 5:
//   via 2: [0,1,2,5] cost 3      (cheapest)
//   via 3: [0,3,5]   cost 4
//   via 4: [0,4,5]   cost 8      (clean but expensive)
// Excluding 2 gives the corridor via 3; excluding 3 routes back through 2.
inline RoadNetwork three_corridors() {
    return RoadNetwork({{0, 0, 0}, {1, 1, 1}, {2, 2, 1}, {3, 1, -1}, {4, 1, 2}, {5, 3, 0}},
                       {{0, 1, 1.0},
                        {1, 2, 1.0},
                        {2, 5, 1.0},
                        {0, 3, 2.0},
                        {3, 5, 2.0},
                        {0, 4, 4.0},
                        {4, 5, 4.0}});
}

// Two corridors between source 0 and sink 3, with one obstacle deep in each
// (nodes 2 and 5). Memory-less reactive rerouting bounces between the
// corridors; memory-aware rerouting tries the alternative once, finds both
// blocked, and waits out the clearance.
//
//   0 -> 1 (2)   -> 2 (2)   -> 3 (2)     corridor A, cost 6
//   0 -> 4 (2.5) -> 5 (2.5) -> 3 (2.5)   corridor B, cost 7.5
inline RoadNetwork two_corridors() {
    return RoadNetwork({{0, 0, 0}, {1, 1, 1}, {2, 2, 1}, {3, 3, 0}, {4, 1, -1}, {5, 2, -1}},
                       {{0, 1, 2.0},
                        {1, 2, 2.0},
                        {2, 3, 2.0},
                        {0, 4, 2.5},
                        {4, 5, 2.5},
                        {5, 3, 2.5}});
}

inline ommsim::ObstacleSchedule two_corridor_obstacles() {
    ommsim::ObstacleSchedule schedule;
    schedule.entries = {{2, 0.0}, {5, 0.0}};
    return schedule;
}

// Node 2 is in a separate component; 0 -> 1 is the only edge.
inline RoadNetwork disconnected() {
    return RoadNetwork({{0, 0, 0}, {1, 1, 0}, {2, 5, 0}}, {{0, 1, 1.0}});
}

} // namespace fixtures
