#pragma once

#include <cstdint>
#include <vector>

namespace coopgov {

using AgentId = int;

/// Undirected edge, stored canonically with a < b.
struct Edge {
    AgentId a;
    AgentId b;

    bool operator==(const Edge&) const = default;
    auto operator<=>(const Edge&) const = default;
};

/// Immutable undirected interaction graph. No self-loops, no duplicate
/// edges; edge_list() is the canonical interaction schedule: pairs (i,j)
/// with i < j in lexicographic order.
class Graph {
public:
    /// Builds from an explicit edge set. Pairs are canonicalized (swapped
    /// so a < b) and deduplicated; self-loops or out-of-range ids throw.
    Graph(int agent_count, std::vector<Edge> edges);

    int agent_count() const { return n_; }
    std::size_t edge_count() const { return edges_.size(); }

    bool has_edge(AgentId a, AgentId b) const;

    /// Adjacent agents in ascending order; empty for isolated nodes.
    const std::vector<AgentId>& neighbors(AgentId a) const;

    const std::vector<Edge>& edge_list() const { return edges_; }

private:
    int n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<AgentId>> adjacency_;
};

/// Erdos-Renyi sample: each of the n(n-1)/2 candidate edges is included
/// independently with probability p, drawn from a stream derived from
/// `seed`. Deterministic for a fixed seed. An all-empty sample is redrawn
/// with the next derived seed up to 100 times (a round with no
/// interactions is undefined); if every attempt is empty, which can only
/// realistically happen for p == 0, the empty graph is returned.
Graph generate_er(int n, double p, std::uint64_t seed);

}  // namespace coopgov
