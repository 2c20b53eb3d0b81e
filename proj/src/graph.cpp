#include "coopgov/graph.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <utility>

#include "coopgov/rng.hpp"

namespace coopgov {

Graph::Graph(int agent_count, std::vector<Edge> edges) : n_(agent_count) {
    if (n_ < 2) throw std::invalid_argument("graph needs at least 2 agents");
    for (auto& e : edges) {
        if (e.a > e.b) std::swap(e.a, e.b);
        if (e.a == e.b) throw std::invalid_argument("self-loop on agent " + std::to_string(e.a));
        if (e.a < 0 || e.b >= n_)
            throw std::invalid_argument("edge endpoint out of range: (" + std::to_string(e.a) +
                                        "," + std::to_string(e.b) + ")");
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);

    adjacency_.resize(static_cast<std::size_t>(n_));
    for (const auto& e : edges_) {
        adjacency_[static_cast<std::size_t>(e.a)].push_back(e.b);
        adjacency_[static_cast<std::size_t>(e.b)].push_back(e.a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
}

bool Graph::has_edge(AgentId a, AgentId b) const {
    if (a == b) return false;
    const auto& nbrs = neighbors(a);
    return std::binary_search(nbrs.begin(), nbrs.end(), b);
}

const std::vector<AgentId>& Graph::neighbors(AgentId a) const {
    if (a < 0 || a >= n_)
        throw std::out_of_range("agent id " + std::to_string(a) + " out of range [0," +
                                std::to_string(n_) + ")");
    return adjacency_[static_cast<std::size_t>(a)];
}

Graph generate_er(int n, double p, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("generate_er: n must be >= 2");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("generate_er: p must be in [0,1]");

    std::vector<Edge> edges;
    for (int attempt = 0; attempt <= 100; ++attempt) {
        edges.clear();
        RngStream stream(seed_chain(seed, kSeedTagGraph, static_cast<std::uint64_t>(attempt)));
        for (AgentId i = 0; i < n; ++i)
            for (AgentId j = i + 1; j < n; ++j)
                if (stream.bernoulli(p)) edges.push_back({i, j});
        if (!edges.empty()) break;
    }
    return Graph(n, std::move(edges));
}

}  // namespace coopgov
