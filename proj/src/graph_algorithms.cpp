#include "gna/graph_algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "gna/errors.hpp"

namespace gna {

void SimpleGraph::add_edge(std::size_t u, std::size_t v) {
    if (u >= n || v >= n) throw DomainError("SimpleGraph::add_edge: node out of range");
    if (u == v) return;
    auto& au = adj[u];
    if (std::find(au.begin(), au.end(), v) != au.end()) return;
    au.push_back(v);
    adj[v].push_back(u);
}

bool SimpleGraph::has_edge(std::size_t u, std::size_t v) const {
    if (u >= n || v >= n) return false;
    const auto& au = adj[u];
    return std::find(au.begin(), au.end(), v) != au.end();
}

std::size_t SimpleGraph::edge_count() const {
    std::size_t total = 0;
    for (const auto& a : adj) total += a.size();
    return total / 2;
}

SimpleGraph undirected_view(const GnaConfig& config, std::vector<NodeId>* order) {
    std::vector<NodeId> ids;
    ids.reserve(config.node_count());
    std::map<NodeId, std::size_t> index;
    for (const auto& [id, rec] : config.nodes()) {
        index[id] = ids.size();
        ids.push_back(id);
    }
    SimpleGraph g(ids.size());
    for (const auto& [id, rec] : config.nodes()) {
        for (const Link& link : rec.out) g.add_edge(index.at(id), index.at(link.dst));
    }
    if (order) *order = std::move(ids);
    return g;
}

std::vector<double> closeness_centrality(const SimpleGraph& g, bool harmonic) {
    std::vector<double> result(g.n, 0.0);
    std::vector<int> dist(g.n);
    for (std::size_t s = 0; s < g.n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        dist[s] = 0;
        std::deque<std::size_t> queue{s};
        double sum = 0.0;
        double inv_sum = 0.0;
        std::size_t reached = 0;
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            if (u != s) {
                sum += dist[u];
                inv_sum += 1.0 / dist[u];
                ++reached;
            }
            for (std::size_t v : g.adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if (harmonic) {
            result[s] = inv_sum;
        } else {
            result[s] = (sum > 0.0) ? static_cast<double>(reached) / sum : 0.0;
        }
    }
    return result;
}

std::map<std::pair<std::size_t, std::size_t>, double> edge_betweenness(const SimpleGraph& g) {
    std::map<std::pair<std::size_t, std::size_t>, double> scores;
    for (std::size_t u = 0; u < g.n; ++u)
        for (std::size_t v : g.adj[u])
            if (u < v) scores[{u, v}] = 0.0;

    // Brandes-style single-source accumulation, adapted to edges.
    std::vector<int> dist(g.n);
    std::vector<double> sigma(g.n), delta(g.n);
    std::vector<std::vector<std::size_t>> preds(g.n);
    std::vector<std::size_t> bfs_order;
    bfs_order.reserve(g.n);

    for (std::size_t s = 0; s < g.n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::fill(sigma.begin(), sigma.end(), 0.0);
        std::fill(delta.begin(), delta.end(), 0.0);
        for (auto& p : preds) p.clear();
        bfs_order.clear();

        dist[s] = 0;
        sigma[s] = 1.0;
        std::deque<std::size_t> queue{s};
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            bfs_order.push_back(u);
            for (std::size_t v : g.adj[u]) {
                if (dist[v] < 0) {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
                if (dist[v] == dist[u] + 1) {
                    sigma[v] += sigma[u];
                    preds[v].push_back(u);
                }
            }
        }
        for (auto it = bfs_order.rbegin(); it != bfs_order.rend(); ++it) {
            std::size_t w = *it;
            for (std::size_t u : preds[w]) {
                const double share = sigma[u] / sigma[w] * (1.0 + delta[w]);
                delta[u] += share;
                auto key = std::minmax(u, w);
                scores[{key.first, key.second}] += share;
            }
        }
    }
    // every unordered pair was counted from both endpoints
    for (auto& [edge, value] : scores) value /= 2.0;
    return scores;
}

std::vector<std::size_t> connected_components(const SimpleGraph& g) {
    std::vector<std::size_t> label(g.n, SIZE_MAX);
    std::size_t next = 0;
    for (std::size_t s = 0; s < g.n; ++s) {
        if (label[s] != SIZE_MAX) continue;
        std::deque<std::size_t> queue{s};
        label[s] = next;
        while (!queue.empty()) {
            std::size_t u = queue.front();
            queue.pop_front();
            for (std::size_t v : g.adj[u]) {
                if (label[v] == SIZE_MAX) {
                    label[v] = next;
                    queue.push_back(v);
                }
            }
        }
        ++next;
    }
    return label;
}

std::vector<std::size_t> largest_component(const SimpleGraph& g) {
    std::vector<std::size_t> label = connected_components(g);
    if (g.n == 0) return {};
    std::size_t n_comps = *std::max_element(label.begin(), label.end()) + 1;
    std::vector<std::size_t> size(n_comps, 0);
    for (std::size_t l : label) ++size[l];
    // labels are assigned in ascending order of smallest member, so the first
    // maximal label is the tie-break winner
    std::size_t best = 0;
    for (std::size_t c = 1; c < n_comps; ++c)
        if (size[c] > size[best]) best = c;
    std::vector<std::size_t> members;
    for (std::size_t v = 0; v < g.n; ++v)
        if (label[v] == best) members.push_back(v);
    return members;
}

std::map<std::size_t, std::size_t> degree_histogram(const SimpleGraph& g) {
    std::map<std::size_t, std::size_t> hist;
    for (const auto& a : g.adj) ++hist[a.size()];
    return hist;
}

double powerlaw_exponent_mle(const std::vector<std::size_t>& samples, std::size_t x_min) {
    if (x_min == 0) throw DomainError("powerlaw_exponent_mle: x_min must be >= 1");
    double log_sum = 0.0;
    std::size_t count = 0;
    const double shift = static_cast<double>(x_min) - 0.5;
    for (std::size_t x : samples) {
        if (x < x_min) continue;
        log_sum += std::log(static_cast<double>(x) / shift);
        ++count;
    }
    if (count < 2 || log_sum <= 0.0)
        throw DomainError("powerlaw_exponent_mle: not enough samples at or above x_min");
    return 1.0 + static_cast<double>(count) / log_sum;
}

}  // namespace gna
