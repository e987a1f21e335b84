#include "gna/models.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace gna {

namespace {

// Newcomer attached to every member of the extracted subnetwork.
RewriteEvent attach_newcomer_to_all(const SubGna& sub, IdAllocator& ids,
                                    const std::string& newcomer_state, bool undirected) {
    RewriteEvent event;
    event.old_sub = sub;
    event.new_sub = structure_copy(sub);
    event.correspondence = identity_map(sub);
    const NodeId u = ids.allocate();
    event.new_sub.add_node(u, newcomer_state);
    for (const auto& [id, rec] : sub.nodes()) {
        event.new_sub.add_link(u, id);
        if (undirected) event.new_sub.add_link(id, u);
    }
    return event;
}

// Seed-node distribution by total degree, `draws` without replacement.
// Quiesces once the configuration holds `n_final` nodes.
Mechanism degree_growth_extraction(std::size_t n_final, std::size_t draws,
                                   const char* name) {
    auto fn = [n_final, draws](const GnaConfig& config, Rng& rng) -> std::optional<SubGna> {
        if (config.node_count() >= n_final) return std::nullopt;
        std::vector<NodeId> ids;
        std::vector<double> weights;
        ids.reserve(config.node_count());
        for (const auto& [id, rec] : config.nodes()) {
            ids.push_back(id);
            weights.push_back(static_cast<double>(rec.out.size() + rec.in_srcs.size()));
        }
        std::set<NodeId> members;
        std::vector<NodeId> order;
        for (std::size_t d = 0; d < draws; ++d) {
            double total = 0.0;
            for (double w : weights) total += w;
            if (total <= 0.0) return std::nullopt;
            std::size_t pick = rng.weighted(weights);
            members.insert(ids[pick]);
            order.push_back(ids[pick]);
            weights[pick] = 0.0;
        }
        SubGna sub = SubGna::induced(config, members);
        sub.focus = order;
        return sub;
    };
    return Mechanism::extraction(name, Mechanism::Mode::stochastic, std::move(fn));
}

}  // namespace

// ---- degree-preferential growth ---------------------------------------------

GnaModel ba_growth(std::size_t n_final, std::size_t links_per_node) {
    if (links_per_node == 0) throw ConfigError("ba_growth: links_per_node must be >= 1");
    if (n_final < links_per_node + 1)
        throw ConfigError("ba_growth: n_final must cover the seed clique");

    GnaModel model;
    model.name = "ba";
    model.initial = GnaConfig(true);
    std::vector<NodeId> seed;
    for (std::size_t i = 0; i < links_per_node + 1; ++i)
        seed.push_back(model.initial.add_node("0"));
    for (std::size_t i = 0; i < seed.size(); ++i)
        for (std::size_t j = i + 1; j < seed.size(); ++j) {
            model.initial.add_link(seed[i], seed[j]);
            model.initial.add_link(seed[j], seed[i]);
        }

    model.extraction = degree_growth_extraction(n_final, links_per_node, "ba-targets");
    model.replacement = Mechanism::replacement(
        "attach-newcomer", Mechanism::Mode::deterministic,
        [](const SubGna& sub, Rng&, IdAllocator& ids) {
            return attach_newcomer_to_all(sub, ids, "0", true);
        });
    return model;
}

// ---- asynchronous cellular automaton ------------------------------------------

namespace {

bool ca_bit(const std::string& state) { return state == "1"; }

RewriteEvent majority_update(const SubGna& sub) {
    if (sub.focus.size() != 1)
        throw SchemaError("majority update expects exactly one focus node");
    const NodeId x = sub.focus[0];
    std::size_t ones = 0, zeros = 0;
    for (const auto& [id, rec] : sub.nodes()) {
        if (id == x) continue;
        if (ca_bit(rec.state)) ++ones; else ++zeros;
    }
    RewriteEvent event;
    event.old_sub = sub;
    event.new_sub = structure_copy(sub);
    event.correspondence = identity_map(sub);
    if (ones != zeros)  // ties keep the current state
        event.new_sub.set_state(x, ones > zeros ? "1" : "0");
    return event;
}

}  // namespace

GnaModel async_ca(std::size_t width, std::size_t height, Rng& init_rng) {
    if (width == 0 || height == 0) throw ConfigError("async_ca: empty lattice");

    GnaModel model;
    model.name = "ca";
    model.initial = GnaConfig(true);
    std::vector<std::vector<NodeId>> grid(height, std::vector<NodeId>(width));
    for (std::size_t y = 0; y < height; ++y)
        for (std::size_t x = 0; x < width; ++x)
            grid[y][x] = model.initial.add_node(init_rng.chance(0.5) ? "1" : "0");

    for (std::size_t y = 0; y < height; ++y) {
        for (std::size_t x = 0; x < width; ++x) {
            // 4-neighbor torus coupling; deduplicated for tiny lattices
            std::set<NodeId> nbrs;
            nbrs.insert(grid[y][(x + 1) % width]);
            nbrs.insert(grid[y][(x + width - 1) % width]);
            nbrs.insert(grid[(y + 1) % height][x]);
            nbrs.insert(grid[(y + height - 1) % height][x]);
            nbrs.erase(grid[y][x]);
            for (NodeId v : nbrs) {
                if (!model.initial.has_link(grid[y][x], v))
                    model.initial.add_link(grid[y][x], v);
            }
        }
    }

    FamilyExtractionSpec spec;
    spec.family = "uniform";
    spec.draws = 1;
    spec.closure = true;
    model.extraction = make_family_extraction(spec);
    model.replacement = Mechanism::replacement(
        "majority-vote", Mechanism::Mode::deterministic,
        [](const SubGna& sub, Rng&, IdAllocator&) { return majority_update(sub); });
    return model;
}

// ---- asynchronous random boolean network ---------------------------------------

namespace {

struct RbnState {
    bool bit;
    std::string rule;  // 2^k bits, index built from input bits (LSB = smallest id)
};

RbnState parse_rbn_state(const std::string& state) {
    auto colon = state.find(':');
    if (colon != 1 || (state[0] != '0' && state[0] != '1'))
        throw SchemaError("rbn: node state \"" + state + "\" is not \"<bit>:<rule>\"");
    return RbnState{state[0] == '1', state.substr(colon + 1)};
}

std::string make_rbn_state(bool bit, const std::string& rule) {
    return (bit ? "1:" : "0:") + rule;
}

RewriteEvent rbn_update(const SubGna& sub) {
    if (sub.focus.size() != 1)
        throw SchemaError("rbn update expects exactly one focus node");
    const NodeId x = sub.focus[0];
    RbnState self = parse_rbn_state(sub.state(x));
    std::size_t index = 0;
    std::size_t position = 0;
    for (const auto& [id, rec] : sub.nodes()) {  // ascending id order
        if (id == x) continue;
        if (parse_rbn_state(rec.state).bit) index |= (std::size_t{1} << position);
        ++position;
    }
    if (index >= self.rule.size())
        throw SchemaError("rbn: rule table shorter than the input combination index");
    RewriteEvent event;
    event.old_sub = sub;
    event.new_sub = structure_copy(sub);
    event.correspondence = identity_map(sub);
    event.new_sub.set_state(x, make_rbn_state(self.rule[index] == '1', self.rule));
    return event;
}

}  // namespace

GnaModel async_rbn(std::size_t n, std::size_t k, Rng& init_rng) {
    if (n == 0) throw ConfigError("async_rbn: n must be >= 1");
    if (k >= n) throw ConfigError("async_rbn: k must be smaller than n (no self-inputs)");
    if (k > 16) throw ConfigError("async_rbn: k > 16 is not supported");

    GnaModel model;
    model.name = "rbn";
    model.initial = GnaConfig(false);
    const std::size_t table = std::size_t{1} << k;
    std::vector<NodeId> ids;
    for (std::size_t i = 0; i < n; ++i) {
        std::string rule;
        for (std::size_t r = 0; r < table; ++r) rule += init_rng.chance(0.5) ? '1' : '0';
        ids.push_back(model.initial.add_node(make_rbn_state(init_rng.chance(0.5), rule)));
    }
    for (std::size_t i = 0; i < n; ++i) {
        // k distinct inputs, self excluded
        std::set<std::size_t> inputs;
        while (inputs.size() < k) {
            std::size_t j = init_rng.below(n);
            if (j != i) inputs.insert(j);
        }
        for (std::size_t j : inputs) model.initial.add_link(ids[j], ids[i]);
    }

    FamilyExtractionSpec spec;
    spec.family = "uniform";
    spec.draws = 1;
    spec.closure = true;
    model.extraction = make_family_extraction(spec);
    model.replacement = Mechanism::replacement(
        "rule-table-update", Mechanism::Mode::deterministic,
        [](const SubGna& sub, Rng&, IdAllocator&) { return rbn_update(sub); });
    return model;
}

// ---- state-modulated preferential growth ---------------------------------------

GnaModel degree_state_growth(std::size_t n_final, double modulation, double flip_prob,
                             Rng* init_rng) {
    if (n_final < 2) throw ConfigError("degree_state_growth: n_final must be >= 2");
    if (modulation < 0.0) throw ConfigError("degree_state_growth: modulation must be >= 0");
    if (flip_prob < 0.0 || flip_prob > 1.0)
        throw ConfigError("degree_state_growth: flip_prob must be in [0,1]");

    GnaModel model;
    model.name = "degree-state";
    model.initial = GnaConfig(true);
    NodeId a, b;
    if (init_rng) {
        a = model.initial.add_node(init_rng->chance(0.5) ? "red" : "blue");
        b = model.initial.add_node(init_rng->chance(0.5) ? "red" : "blue");
    } else {
        a = model.initial.add_node("red");
        b = model.initial.add_node("blue");
    }
    model.initial.add_link(a, b);
    model.initial.add_link(b, a);

    auto extract_fn = [n_final, modulation](const GnaConfig& config,
                                            Rng& rng) -> std::optional<SubGna> {
        if (config.node_count() >= n_final) return std::nullopt;
        const bool red_newcomer = rng.chance(0.5);
        std::vector<NodeId> ids;
        std::vector<double> weights;
        for (const auto& [id, rec] : config.nodes()) {
            ids.push_back(id);
            double w = static_cast<double>(rec.out.size() + rec.in_srcs.size());
            if (red_newcomer && rec.state == "red") w *= 1.0 + modulation;
            weights.push_back(w);
        }
        double total = 0.0;
        for (double w : weights) total += w;
        if (total <= 0.0) return std::nullopt;
        const NodeId target = ids[rng.weighted(weights)];
        SubGna sub = SubGna::induced(config, {target});
        sub.focus = {target};
        sub.tags["newcomer-state"] = red_newcomer ? "red" : "blue";
        return sub;
    };

    auto replace_fn = [flip_prob](const SubGna& sub, Rng& rng, IdAllocator& ids) {
        auto tag = sub.tags.find("newcomer-state");
        const std::string state = (tag == sub.tags.end()) ? "red" : tag->second;
        RewriteEvent event = attach_newcomer_to_all(sub, ids, state, true);
        if (sub.focus.size() == 1 && rng.chance(flip_prob))
            event.new_sub.set_state(sub.focus[0], state);
        return event;
    };

    model.extraction = Mechanism::extraction("state-modulated-targets",
                                             Mechanism::Mode::stochastic, extract_fn);
    model.replacement = Mechanism::replacement("attach-and-maybe-convert",
                                               Mechanism::Mode::stochastic, replace_fn);
    return model;
}

// ---- state-driven edge growth ----------------------------------------------------

GnaModel state_based_growth(std::size_t n_initial, double newcomer_prob, double red_prob,
                            Rng* init_rng) {
    if (n_initial == 0) throw ConfigError("state_based_growth: n_initial must be >= 1");
    if (newcomer_prob < 0.0 || newcomer_prob > 1.0)
        throw ConfigError("state_based_growth: newcomer_prob must be in [0,1]");
    if (red_prob < 0.0 || red_prob > 1.0)
        throw ConfigError("state_based_growth: red_prob must be in [0,1]");

    GnaModel model;
    model.name = "state-based";
    model.initial = GnaConfig(true);
    model.initial.add_node("red");  // guarantees a startable edge source
    for (std::size_t i = 1; i < n_initial; ++i) {
        const bool red = init_rng ? init_rng->chance(red_prob) : (i % 2 == 0);
        model.initial.add_node(red ? "red" : "blue");
    }

    auto extract_fn = [newcomer_prob, red_prob](const GnaConfig& config,
                                                Rng& rng) -> std::optional<SubGna> {
        bool creation = rng.chance(newcomer_prob);
        if (!creation) {
            std::vector<NodeId> reds;
            for (const auto& [id, rec] : config.nodes())
                if (rec.state == "red") reds.push_back(id);
            if (!reds.empty()) {
                const NodeId r = reds[rng.below(reds.size())];
                std::vector<NodeId> candidates;
                for (const auto& [id, rec] : config.nodes()) {
                    if (id == r || config.has_link(r, id)) continue;
                    candidates.push_back(id);
                }
                if (!candidates.empty()) {
                    const NodeId other = candidates[rng.below(candidates.size())];
                    SubGna sub = SubGna::induced(config, {r, other});
                    sub.focus = {r, other};
                    return sub;
                }
            }
            // no eligible red->other pair: fall back to creation if allowed
            if (newcomer_prob <= 0.0) return std::nullopt;
            creation = true;
        }
        SubGna sub;  // empty: pure creation
        sub.tags["newcomer-state"] = rng.chance(red_prob) ? "red" : "blue";
        return sub;
    };

    auto replace_fn = [](const SubGna& sub, Rng&, IdAllocator& ids) {
        RewriteEvent event;
        event.old_sub = sub;
        if (sub.empty()) {
            auto tag = sub.tags.find("newcomer-state");
            event.new_sub.add_node(ids.allocate(),
                                   tag == sub.tags.end() ? "red" : tag->second);
            return event;
        }
        if (sub.focus.size() != 2)
            throw SchemaError("state-based growth: pair extraction expects two focus nodes");
        event.new_sub = structure_copy(sub);
        event.correspondence = identity_map(sub);
        event.new_sub.add_link(sub.focus[0], sub.focus[1]);
        event.new_sub.add_link(sub.focus[1], sub.focus[0]);
        return event;
    };

    model.extraction = Mechanism::extraction("red-edge-or-newcomer",
                                             Mechanism::Mode::stochastic, extract_fn);
    model.replacement = Mechanism::replacement("link-pair-or-create",
                                               Mechanism::Mode::stochastic, replace_fn);
    return model;
}

// ---- growth with local spreading --------------------------------------------------

GnaModel forest_fire_growth(std::size_t n_final, double burn_prob) {
    if (n_final < 2) throw ConfigError("forest_fire_growth: n_final must be >= 2");
    if (burn_prob < 0.0 || burn_prob > 1.0)
        throw ConfigError("forest_fire_growth: burn_prob must be in [0,1]");

    GnaModel model;
    model.name = "forest-fire";
    model.initial = GnaConfig(true);
    NodeId a = model.initial.add_node("0");
    NodeId b = model.initial.add_node("0");
    model.initial.add_link(a, b);
    model.initial.add_link(b, a);

    auto extract_fn = [n_final, burn_prob](const GnaConfig& config,
                                           Rng& rng) -> std::optional<SubGna> {
        if (config.node_count() >= n_final) return std::nullopt;
        std::vector<NodeId> ids;
        for (const auto& [id, rec] : config.nodes()) ids.push_back(id);
        const NodeId ambassador = ids[rng.below(ids.size())];

        // breadth-first spreading: every link out of a burning node gets one
        // independent trial while its far end is unburned
        std::set<NodeId> burned{ambassador};
        std::vector<NodeId> order{ambassador};
        std::deque<NodeId> queue{ambassador};
        while (!queue.empty()) {
            const NodeId x = queue.front();
            queue.pop_front();
            for (const Link& link : config.out_links(x)) {
                if (burned.count(link.dst)) continue;
                if (rng.chance(burn_prob)) {
                    burned.insert(link.dst);
                    order.push_back(link.dst);
                    queue.push_back(link.dst);
                }
            }
        }
        SubGna sub = SubGna::induced(config, burned);
        sub.focus = order;
        return sub;
    };

    model.extraction = Mechanism::extraction("ambassador-burn", Mechanism::Mode::stochastic,
                                             extract_fn);
    model.replacement = Mechanism::replacement(
        "attach-newcomer", Mechanism::Mode::deterministic,
        [](const SubGna& sub, Rng&, IdAllocator& ids) {
            return attach_newcomer_to_all(sub, ids, "0", true);
        });
    return model;
}

// ---- declarative registry ----------------------------------------------------------

std::vector<ModelInfo> model_registry() {
    return {
        {"ba",
         "degree-preferential growth to n_final nodes",
         {{"n_final", "int", 1000, 3, 1e6}, {"links_per_node", "int", 1, 1, 10}}},
        {"ca",
         "asynchronous binary majority automaton on a torus",
         {{"width", "int", 32, 1, 1024}, {"height", "int", 32, 1, 1024}}},
        {"rbn",
         "asynchronous random boolean network with per-node rule tables",
         {{"n", "int", 30, 1, 1e5}, {"k", "int", 2, 0, 8}}},
        {"degree-state",
         "degree-preferential growth modulated by newcomer/target states",
         {{"n_final", "int", 1000, 2, 1e6},
          {"modulation", "real", 2.0, 0, 100},
          {"flip_prob", "real", 0.2, 0, 1}}},
        {"state-based",
         "edge growth from red-state nodes plus random isolated newcomers",
         {{"n_initial", "int", 5, 1, 1e5},
          {"newcomer_prob", "real", 0.1, 0, 1},
          {"red_prob", "real", 0.5, 0, 1}}},
        {"forest-fire",
         "growth with breadth-first local spreading from a random ambassador",
         {{"n_final", "int", 1000, 2, 1e6}, {"burn_prob", "real", 0.35, 0, 1}}},
    };
}

GnaModel build_model(const std::string& name, const std::map<std::string, double>& params,
                     Rng& rng) {
    const auto registry = model_registry();
    const ModelInfo* info = nullptr;
    for (const auto& entry : registry)
        if (entry.name == name) info = &entry;
    if (!info) throw ConfigError("unknown model \"" + name + "\"");

    std::map<std::string, double> resolved;
    for (const auto& p : info->params) resolved[p.name] = p.def;
    for (const auto& [key, value] : params) {
        const ModelParamSpec* spec = nullptr;
        for (const auto& p : info->params)
            if (p.name == key) spec = &p;
        if (!spec)
            throw ConfigError("model \"" + name + "\" has no parameter \"" + key + "\"");
        if (value < spec->lo || value > spec->hi)
            throw ConfigError("parameter \"" + key + "\" outside [" +
                              std::to_string(spec->lo) + ", " + std::to_string(spec->hi) + "]");
        if (spec->kind == "int" && value != std::floor(value))
            throw ConfigError("parameter \"" + key + "\" must be an integer");
        resolved[key] = value;
    }

    auto as_size = [&](const char* key) {
        return static_cast<std::size_t>(resolved.at(key));
    };
    if (name == "ba") return ba_growth(as_size("n_final"), as_size("links_per_node"));
    if (name == "ca") return async_ca(as_size("width"), as_size("height"), rng);
    if (name == "rbn") return async_rbn(as_size("n"), as_size("k"), rng);
    if (name == "degree-state")
        return degree_state_growth(as_size("n_final"), resolved.at("modulation"),
                                   resolved.at("flip_prob"), &rng);
    if (name == "state-based")
        return state_based_growth(as_size("n_initial"), resolved.at("newcomer_prob"),
                                  resolved.at("red_prob"), &rng);
    if (name == "forest-fire")
        return forest_fire_growth(as_size("n_final"), resolved.at("burn_prob"));
    throw ConfigError("unknown model \"" + name + "\"");  // unreachable
}

}  // namespace gna
