#pragma once

#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "gna/config.hpp"

namespace gna {

// Compact scratch graph used by the analysis algorithms: nodes 0..n-1 with
// undirected, de-duplicated adjacency (self-loops dropped).
struct SimpleGraph {
    std::size_t n = 0;
    std::vector<std::vector<std::size_t>> adj;

    explicit SimpleGraph(std::size_t nodes = 0) : n(nodes), adj(nodes) {}
    void add_edge(std::size_t u, std::size_t v);  // ignores duplicates and loops
    bool has_edge(std::size_t u, std::size_t v) const;
    std::size_t edge_count() const;
};

// Undirected view of a configuration; node ids are compacted to 0..n-1 in
// ascending order, returned in `order`.
SimpleGraph undirected_view(const GnaConfig& config, std::vector<NodeId>* order = nullptr);

// Classic closeness: (r-1) / sum of distances to the r reachable nodes,
// 0 for isolated nodes.  Harmonic closeness: sum over reachable of 1/d,
// which stays meaningful on disconnected graphs.
std::vector<double> closeness_centrality(const SimpleGraph& g, bool harmonic = false);

// Edge betweenness via breadth-first shortest-path counting with dependency
// accumulation.  Each unordered pair of distinct nodes contributes the
// fraction of its shortest paths crossing the edge; keys are (min,max).
std::map<std::pair<std::size_t, std::size_t>, double> edge_betweenness(const SimpleGraph& g);

// Connected component label per node (labels are 0-based, assigned in
// ascending order of each component's smallest node).
std::vector<std::size_t> connected_components(const SimpleGraph& g);

// Nodes of the largest component; ties broken toward the component holding
// the smallest node index.
std::vector<std::size_t> largest_component(const SimpleGraph& g);

// Histogram of undirected degree (neighbor count) across all nodes.
std::map<std::size_t, std::size_t> degree_histogram(const SimpleGraph& g);

// Maximum-likelihood exponent of a discrete power law fitted to the samples
// at or above x_min:  gamma = 1 + n / sum(ln(x / (x_min - 0.5))).
// Throws DomainError when fewer than two samples reach x_min.
double powerlaw_exponent_mle(const std::vector<std::size_t>& samples, std::size_t x_min);

}  // namespace gna
