// Shared test utilities: temp directories, CLI invocation, random scenario
// and graph generators, and small brute-force oracles.
#pragma once

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "gna/graph_algorithms.hpp"
#include "gna/opnet.hpp"
#include "gna/rng.hpp"

namespace testutil {

// Unique scratch directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("gna_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const {
        return (path_ / name).string();
    }

private:
    std::filesystem::path path_;
};

struct CliResult {
    int exit_code = -1;
    std::string output;  // stdout + stderr, interleaved
};

// Runs the workbench binary with the given argument string.
inline CliResult run_cli(const std::string& args) {
    TempDir cap("cli_capture");
    const std::string log = cap.file("out.txt");
    const std::string cmd =
        std::string(GNA_CLI_PATH) + " " + args + " > " + log + " 2>&1";
    const int raw = std::system(cmd.c_str());
    CliResult r;
    if (raw == -1)
        r.exit_code = -1;
    else if (WIFEXITED(raw))
        r.exit_code = WEXITSTATUS(raw);
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    r.output = buf.str();
    return r;
}

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline bool file_exists(const std::string& path) {
    return std::filesystem::exists(path);
}

// ---------------------------------------------------------------------------
// Brute-force graph oracles (independent of the library implementations).
// ---------------------------------------------------------------------------

// All-pairs shortest-path distances by Floyd-Warshall; -1 = unreachable.
inline std::vector<std::vector<long long>> brute_distances(const gna::SimpleGraph& g) {
    const long long INF = 1LL << 40;
    std::vector<std::vector<long long>> d(g.n, std::vector<long long>(g.n, INF));
    for (std::size_t v = 0; v < g.n; ++v) {
        d[v][v] = 0;
        for (std::size_t u : g.adj[v]) d[v][u] = 1;
    }
    for (std::size_t k = 0; k < g.n; ++k)
        for (std::size_t i = 0; i < g.n; ++i)
            for (std::size_t j = 0; j < g.n; ++j)
                if (d[i][k] + d[k][j] < d[i][j]) d[i][j] = d[i][k] + d[k][j];
    for (auto& row : d)
        for (auto& x : row)
            if (x >= INF) x = -1;
    return d;
}

inline std::vector<double> brute_closeness(const gna::SimpleGraph& g, bool harmonic) {
    auto d = brute_distances(g);
    std::vector<double> out(g.n, 0.0);
    for (std::size_t v = 0; v < g.n; ++v) {
        if (harmonic) {
            double sum = 0.0;
            for (std::size_t u = 0; u < g.n; ++u)
                if (u != v && d[v][u] > 0) sum += 1.0 / static_cast<double>(d[v][u]);
            out[v] = sum;
        } else {
            long long total = 0;
            std::size_t reach = 0;
            for (std::size_t u = 0; u < g.n; ++u)
                if (u != v && d[v][u] > 0) {
                    total += d[v][u];
                    ++reach;
                }
            out[v] = (reach == 0 || total == 0)
                         ? 0.0
                         : static_cast<double>(reach) / static_cast<double>(total);
        }
    }
    return out;
}

// Edge betweenness by explicit shortest-path counting: for every ordered
// source, count shortest paths with a BFS DP, then accumulate per-edge pair
// fractions.  Each unordered node pair contributes once.
inline std::map<std::pair<std::size_t, std::size_t>, double> brute_edge_betweenness(
    const gna::SimpleGraph& g) {
    std::map<std::pair<std::size_t, std::size_t>, double> score;
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::size_t u : g.adj[v])
            if (v < u) score[{v, u}] = 0.0;

    auto d = brute_distances(g);
    for (std::size_t s = 0; s < g.n; ++s) {
        // sigma[v]: number of shortest s->v paths.
        std::vector<double> sigma(g.n, 0.0);
        sigma[s] = 1.0;
        std::vector<std::size_t> order;
        for (std::size_t v = 0; v < g.n; ++v)
            if (d[s][v] >= 0) order.push_back(v);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return d[s][a] < d[s][b];
        });
        for (std::size_t v : order)
            for (std::size_t u : g.adj[v])
                if (d[s][u] == d[s][v] + 1) sigma[u] += sigma[v];
        // paths_through[(v,u)] for target t: sigma[v] * sigma_from_u_to_t.
        for (std::size_t t = s + 1; t < g.n; ++t) {
            if (d[s][t] <= 0) continue;
            // For each edge (v,u) with d[s][u] = d[s][v]+1, shortest s->t paths
            // through that edge = sigma[v] * (#shortest u->t paths on the
            // remaining distance).  Count u->t shortest paths with a second DP.
            std::vector<double> tau(g.n, 0.0);  // shortest v->t path counts
            tau[t] = 1.0;
            std::vector<std::size_t> back;
            for (std::size_t v = 0; v < g.n; ++v)
                if (d[v][t] >= 0) back.push_back(v);
            std::sort(back.begin(), back.end(), [&](std::size_t a, std::size_t b) {
                return d[a][t] < d[b][t];
            });
            for (std::size_t v : back)
                for (std::size_t u : g.adj[v])
                    if (d[u][t] == d[v][t] + 1) tau[u] += tau[v];
            const double total = sigma[t];
            if (total <= 0) continue;
            for (std::size_t v = 0; v < g.n; ++v) {
                if (d[s][v] < 0) continue;
                for (std::size_t u : g.adj[v]) {
                    if (d[s][u] != d[s][v] + 1) continue;
                    if (d[s][v] + 1 + d[u][t] != d[s][t]) continue;
                    const double through = sigma[v] * tau[u];
                    auto key = std::minmax(v, u);
                    score[{key.first, key.second}] += through / total;
                }
            }
        }
    }
    return score;
}

inline std::vector<std::size_t> brute_components(const gna::SimpleGraph& g) {
    std::vector<std::size_t> parent(g.n);
    for (std::size_t v = 0; v < g.n; ++v) parent[v] = v;
    std::function<std::size_t(std::size_t)> find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t v = 0; v < g.n; ++v)
        for (std::size_t u : g.adj[v]) parent[find(v)] = find(u);
    // Relabel roots in ascending order of each component's smallest member.
    std::map<std::size_t, std::size_t> label;
    std::vector<std::size_t> out(g.n);
    for (std::size_t v = 0; v < g.n; ++v) {
        std::size_t root = find(v);
        auto it = label.find(root);
        if (it == label.end()) it = label.emplace(root, label.size()).first;
        out[v] = it->second;
    }
    return out;
}

inline gna::SimpleGraph random_graph(std::size_t n, double p, gna::Rng& rng) {
    gna::SimpleGraph g(n);
    for (std::size_t v = 0; v < n; ++v)
        for (std::size_t u = v + 1; u < n; ++u)
            if (rng.chance(p)) g.add_edge(v, u);
    return g;
}

// ---------------------------------------------------------------------------
// Random operational scenarios: layered event chains whose knowledge
// dependencies are satisfiable, plus occasional dead events.
// ---------------------------------------------------------------------------

inline gna::OpScenario random_scenario(gna::Rng& rng) {
    static const char* kClasses[] = {"sensor", "router", "actor", "database",
                                     "controller"};
    static const char* kRegions[] = {"north", "south", "east", "west"};
    static const char* kRoles[] = {"fixed", "mobile", "heavy"};

    gna::OpScenario sc;
    sc.heterotype_prefix = 2;
    const std::size_t n_agents = 3 + rng.below(6);  // 3..8
    for (std::size_t i = 0; i < n_agents; ++i) {
        gna::OpAgent a;
        a.id = "agent" + std::to_string(i);
        a.attributes = {kClasses[rng.below(5)], kRegions[rng.below(4)],
                        kRoles[rng.below(3)]};
        sc.agents.push_back(std::move(a));
    }

    // Seed variables on random agents.
    const std::size_t n_vars = 2 + rng.below(4);
    std::vector<std::string> vars;
    for (std::size_t v = 0; v < n_vars; ++v) {
        std::string name = "var" + std::to_string(v);
        vars.push_back(name);
        gna::OpAgent& holder = sc.agents[rng.below(n_agents)];
        switch (rng.below(3)) {
            case 0: holder.knowledge[name] = rng.chance(0.5); break;
            case 1: holder.knowledge[name] = double(rng.int_in(0, 9)); break;
            default: holder.knowledge[name] = std::string("tag") +
                                              std::to_string(rng.below(4));
        }
    }

    // Chains: each event requires a variable its source may only receive
    // through an earlier event, and forwards it (flows/tasks) or pulls a
    // fresh one (requests).
    const std::size_t n_events = 2 + rng.below(8);  // 2..9
    for (std::size_t e = 0; e < n_events; ++e) {
        gna::OpEvent ev;
        std::size_t src = rng.below(n_agents);
        std::size_t dst = rng.below(n_agents);
        while (dst == src) dst = rng.below(n_agents);
        ev.source = sc.agents[src].id;
        ev.dest = sc.agents[dst].id;
        switch (rng.below(3)) {
            case 0: ev.type = gna::OpLinkType::flow; break;
            case 1: ev.type = gna::OpLinkType::request; break;
            default: ev.type = gna::OpLinkType::task;
        }
        if (rng.chance(0.7))
            ev.knowledge_required.push_back(vars[rng.below(n_vars)]);
        const std::size_t moved = rng.below(3);
        for (std::size_t m = 0; m < moved; ++m)
            ev.knowledge_transferred.push_back(vars[rng.below(n_vars)]);
        ev.duration = 1 + static_cast<int>(rng.below(4));
        ev.variation = static_cast<int>(rng.below(3));
        if (rng.chance(0.3)) ev.condition_text = "var0 == var0";  // vacuous
        sc.events.push_back(std::move(ev));
    }
    return sc;
}

}  // namespace testutil
