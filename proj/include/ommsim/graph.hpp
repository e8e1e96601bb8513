#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ommsim/errors.hpp"

namespace ommsim {

using NodeId = std::uint32_t;
using Seconds = double;

inline constexpr NodeId kInvalidNode = std::numeric_limits<NodeId>::max();

/// Directed weighted road graph. Immutable after construction and safe to
/// share across concurrent scenario runs.
class RoadNetwork {
public:
    struct NodeInfo {
        NodeId id;
        double x;
        double y;
    };

    struct EdgeInfo {
        NodeId from;
        NodeId to;
        double weight; // travel time, seconds
    };

    struct Neighbor {
        NodeId to;
        double weight;
    };

    RoadNetwork(std::vector<NodeInfo> nodes, const std::vector<EdgeInfo>& edges) {
        nodes_ = std::move(nodes);
        std::sort(nodes_.begin(), nodes_.end(),
                  [](const NodeInfo& a, const NodeInfo& b) { return a.id < b.id; });
        for (std::size_t i = 1; i < nodes_.size(); ++i) {
            if (nodes_[i].id == nodes_[i - 1].id) {
                throw ValidationError("duplicate node id " + std::to_string(nodes_[i].id));
            }
        }
        adjacency_.resize(nodes_.size());
        for (const EdgeInfo& e : edges) {
            auto from = index_of(e.from);
            auto to = index_of(e.to);
            if (!from || !to) {
                throw SchemaError("edge " + std::to_string(e.from) + "->" + std::to_string(e.to) +
                                  " references undeclared node " +
                                  std::to_string(from ? e.to : e.from));
            }
            if (e.from == e.to) {
                throw ValidationError("self-loop edge at node " + std::to_string(e.from));
            }
            if (!(e.weight > 0.0)) {
                throw ValidationError("non-positive weight on edge " + std::to_string(e.from) +
                                      "->" + std::to_string(e.to));
            }
            adjacency_[*from].push_back({e.to, e.weight});
        }
        edge_count_ = 0;
        for (auto& nbrs : adjacency_) {
            std::sort(nbrs.begin(), nbrs.end(),
                      [](const Neighbor& a, const Neighbor& b) { return a.to < b.to; });
            for (std::size_t i = 1; i < nbrs.size(); ++i) {
                if (nbrs[i].to == nbrs[i - 1].to) {
                    throw ValidationError("duplicate edge to node " + std::to_string(nbrs[i].to));
                }
            }
            edge_count_ += nbrs.size();
        }
    }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t edge_count() const { return edge_count_; }

    bool has_node(NodeId id) const { return index_of(id).has_value(); }

    const NodeInfo& node(NodeId id) const {
        auto idx = index_of(id);
        if (!idx) throw LookupError("unknown node id " + std::to_string(id));
        return nodes_[*idx];
    }

    std::span<const Neighbor> out_edges(NodeId id) const {
        auto idx = index_of(id);
        if (!idx) throw LookupError("unknown node id " + std::to_string(id));
        return adjacency_[*idx];
    }

    bool has_edge(NodeId from, NodeId to) const {
        auto idx = index_of(from);
        if (!idx || !has_node(to)) return false;
        const auto& nbrs = adjacency_[*idx];
        auto it = std::lower_bound(nbrs.begin(), nbrs.end(), to,
                                   [](const Neighbor& n, NodeId t) { return n.to < t; });
        return it != nbrs.end() && it->to == to;
    }

    double edge_weight(NodeId from, NodeId to) const {
        auto idx = index_of(from);
        if (!idx) throw LookupError("unknown node id " + std::to_string(from));
        const auto& nbrs = adjacency_[*idx];
        auto it = std::lower_bound(nbrs.begin(), nbrs.end(), to,
                                   [](const Neighbor& n, NodeId t) { return n.to < t; });
        if (it == nbrs.end() || it->to != to) {
            throw LookupError("no edge " + std::to_string(from) + "->" + std::to_string(to));
        }
        return it->weight;
    }

    /// Nodes sorted by id.
    const std::vector<NodeInfo>& nodes() const { return nodes_; }

    /// Edges sorted by (from, to); used for deterministic export.
    std::vector<EdgeInfo> edges() const {
        std::vector<EdgeInfo> out;
        out.reserve(edge_count_);
        for (std::size_t i = 0; i < nodes_.size(); ++i) {
            for (const Neighbor& n : adjacency_[i]) {
                out.push_back({nodes_[i].id, n.to, n.weight});
            }
        }
        return out;
    }

private:
    std::optional<std::size_t> index_of(NodeId id) const {
        auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                                   [](const NodeInfo& n, NodeId v) { return n.id < v; });
        if (it == nodes_.end() || it->id != id) return std::nullopt;
        return static_cast<std::size_t>(it - nodes_.begin());
    }

    std::vector<NodeInfo> nodes_;
    std::vector<std::vector<Neighbor>> adjacency_;
    std::size_t edge_count_ = 0;
};

/// A planned path. First node is the source, last is the destination;
/// total_cost is the sum of traversed edge weights in path order.
struct Route {
    std::vector<NodeId> nodes;
    Seconds total_cost = 0.0;

    bool operator==(const Route& other) const = default;
};

namespace detail {

// Dijkstra over the node subset not in `excluded`, with deterministic
// tie-breaking: among equal-cost shortest paths the lexicographically
// smallest node-id sequence wins. Positive weights guarantee that every
// intermediate node of a shortest path settles strictly before its
// endpoint, so comparing settled parent chains is sufficient.
class ShortestPathSolver {
public:
    ShortestPathSolver(const RoadNetwork& net, const std::set<NodeId>& excluded)
        : net_(net), excluded_(excluded) {}

    std::optional<Route> solve(NodeId source, NodeId dest) {
        if (source == dest) return Route{{source}, 0.0};
        dist_.clear();
        parent_.clear();
        settled_.clear();
        dist_[source] = 0.0;

        using HeapItem = std::pair<double, NodeId>; // (dist, node)
        std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap;
        heap.push({0.0, source});

        while (!heap.empty()) {
            auto [d, u] = heap.top();
            heap.pop();
            if (settled_.count(u)) continue;
            auto du = dist_.find(u);
            if (du == dist_.end() || d != du->second) continue; // stale entry
            settled_.insert(u);
            if (u == dest) break;

            for (const auto& nbr : net_.out_edges(u)) {
                if (excluded_.count(nbr.to)) continue;
                if (settled_.count(nbr.to)) continue;
                const double nd = d + nbr.weight;
                auto it = dist_.find(nbr.to);
                if (it == dist_.end() || nd < it->second) {
                    dist_[nbr.to] = nd;
                    parent_[nbr.to] = u;
                    heap.push({nd, nbr.to});
                } else if (nd == it->second && parent_[nbr.to] != u) {
                    if (lex_less(u, parent_[nbr.to])) {
                        parent_[nbr.to] = u;
                    }
                }
            }
        }

        if (!settled_.count(dest)) return std::nullopt;
        Route route;
        route.nodes = chain_of(dest);
        route.total_cost = path_cost(route.nodes);
        return route;
    }

private:
    std::vector<NodeId> chain_of(NodeId v) const {
        std::vector<NodeId> chain;
        for (NodeId cur = v;;) {
            chain.push_back(cur);
            auto it = parent_.find(cur);
            if (it == parent_.end()) break;
            cur = it->second;
        }
        std::reverse(chain.begin(), chain.end());
        return chain;
    }

    bool lex_less(NodeId a, NodeId b) const {
        return chain_of(a) < chain_of(b);
    }

    // Re-accumulated in path order so costs match an independent enumeration exactly.
    double path_cost(const std::vector<NodeId>& nodes) const {
        double c = 0.0;
        for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
            c += net_.edge_weight(nodes[i], nodes[i + 1]);
        }
        return c;
    }

    const RoadNetwork& net_;
    const std::set<NodeId>& excluded_;
    std::map<NodeId, double> dist_;
    std::map<NodeId, NodeId> parent_;
    std::set<NodeId> settled_;
};

} // namespace detail

/// Standard shortest path. Returns nullopt iff dest is unreachable.
inline std::optional<Route> shortest_path(const RoadNetwork& net, NodeId source, NodeId dest) {
    if (!net.has_node(source)) throw LookupError("unknown node id " + std::to_string(source));
    if (!net.has_node(dest)) throw LookupError("unknown node id " + std::to_string(dest));
    static const std::set<NodeId> kEmpty;
    return detail::ShortestPathSolver(net, kEmpty).solve(source, dest);
}

/// Shortest path on the subgraph with `obstacles` (minus source/dest) removed.
/// Obstacle ids not present in the network are ignored. With an empty
/// obstacle set the result is identical to shortest_path.
inline std::optional<Route> shortest_path_excluding(const RoadNetwork& net, NodeId source,
                                                    NodeId dest,
                                                    const std::set<NodeId>& obstacles) {
    if (!net.has_node(source)) throw LookupError("unknown node id " + std::to_string(source));
    if (!net.has_node(dest)) throw LookupError("unknown node id " + std::to_string(dest));
    std::set<NodeId> excluded;
    for (NodeId v : obstacles) {
        if (v == source || v == dest) continue; // never exclude source/dest
        if (net.has_node(v)) excluded.insert(v);
    }
    return detail::ShortestPathSolver(net, excluded).solve(source, dest);
}

} // namespace ommsim
