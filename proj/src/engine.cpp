#include "gna/engine.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace gna {

// ---- selection families ------------------------------------------------------

namespace {

double degree_power(std::size_t degree, double alpha) {
    if (alpha == 0.0) return 1.0;  // 0^0 = 1: the uniform limit
    if (degree == 0) return 0.0;
    if (alpha == 1.0) return static_cast<double>(degree);
    return std::pow(static_cast<double>(degree), alpha);
}

struct UniformFamily : SelectionFamily {
    const char* name() const override { return "uniform"; }
    std::size_t param_count(std::size_t) const override { return 0; }
    std::vector<ParamBounds> bounds(std::size_t) const override { return {}; }
    double weight(std::size_t, std::size_t, std::span<const double>) const override {
        return 1.0;
    }
};

struct DegreeFamily : SelectionFamily {
    const char* name() const override { return "degree"; }
    std::size_t param_count(std::size_t) const override { return 1; }
    std::vector<ParamBounds> bounds(std::size_t) const override {
        return {ParamBounds{0.0, 10.0}};
    }
    double weight(std::size_t, std::size_t degree,
                  std::span<const double> params) const override {
        return degree_power(degree, params.empty() ? 1.0 : params[0]);
    }
};

// First alphabet state is pinned to weight 1; each further state gets one
// free weight.  With a single-state alphabet this degenerates to "uniform".
struct StateFamily : SelectionFamily {
    const char* name() const override { return "state"; }
    std::size_t param_count(std::size_t n_states) const override {
        return n_states > 0 ? n_states - 1 : 0;
    }
    std::vector<ParamBounds> bounds(std::size_t n_states) const override {
        return std::vector<ParamBounds>(param_count(n_states), ParamBounds{0.0, 10.0});
    }
    double weight(std::size_t state_index, std::size_t,
                  std::span<const double> params) const override {
        if (state_index == 0) return 1.0;
        if (state_index - 1 >= params.size()) return 1.0;  // unparameterized: neutral
        return params[state_index - 1];
    }
};

struct DegreeStateFamily : SelectionFamily {
    const char* name() const override { return "degree-state"; }
    std::size_t param_count(std::size_t n_states) const override {
        return 1 + (n_states > 0 ? n_states - 1 : 0);
    }
    std::vector<ParamBounds> bounds(std::size_t n_states) const override {
        return std::vector<ParamBounds>(param_count(n_states), ParamBounds{0.0, 10.0});
    }
    double weight(std::size_t state_index, std::size_t degree,
                  std::span<const double> params) const override {
        // params = [exponent, weight of state 1, weight of state 2, ...]
        const double alpha = params.empty() ? 1.0 : params[0];
        double sw = 1.0;
        if (state_index > 0 && state_index < params.size()) sw = params[state_index];
        return degree_power(degree, alpha) * sw;
    }
};

struct EmptyFamily : SelectionFamily {
    const char* name() const override { return "empty"; }
    std::size_t param_count(std::size_t) const override { return 0; }
    std::vector<ParamBounds> bounds(std::size_t) const override { return {}; }
    double weight(std::size_t, std::size_t, std::span<const double>) const override {
        return 0.0;
    }
};

}  // namespace

const SelectionFamily& find_family(const std::string& name) {
    static const UniformFamily uniform;
    static const DegreeFamily degree;
    static const StateFamily state;
    static const DegreeStateFamily degree_state;
    static const EmptyFamily empty;
    if (name == "uniform") return uniform;
    if (name == "degree") return degree;
    if (name == "state") return state;
    if (name == "degree-state") return degree_state;
    if (name == "empty") return empty;
    throw ConfigError("unknown selection family \"" + name + "\"");
}

std::vector<std::string> family_names() {
    return {"uniform", "degree", "state", "degree-state", "empty"};
}

// ---- Mechanism ----------------------------------------------------------------

Mechanism Mechanism::extraction(std::string name, Mode mode, ExtractFn fn,
                                std::vector<double> params,
                                std::vector<ParamBounds> bounds) {
    if (!fn) throw ConfigError("extraction mechanism \"" + name + "\" has no body");
    if (!bounds.empty() && bounds.size() != params.size())
        throw ConfigError("mechanism \"" + name + "\": bounds/params size mismatch");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (params[i] < bounds[i].lo || params[i] > bounds[i].hi)
            throw ConfigError("mechanism \"" + name + "\": parameter " + std::to_string(i) +
                              " outside declared bounds");
    }
    Mechanism m;
    m.kind_ = Kind::extraction;
    m.mode_ = mode;
    m.name_ = std::move(name);
    m.params_ = std::move(params);
    m.bounds_ = std::move(bounds);
    m.extract_ = std::move(fn);
    return m;
}

Mechanism Mechanism::replacement(std::string name, Mode mode, ReplaceFn fn,
                                 std::vector<double> params,
                                 std::vector<ParamBounds> bounds) {
    if (!fn) throw ConfigError("replacement mechanism \"" + name + "\" has no body");
    if (!bounds.empty() && bounds.size() != params.size())
        throw ConfigError("mechanism \"" + name + "\": bounds/params size mismatch");
    for (std::size_t i = 0; i < bounds.size(); ++i) {
        if (params[i] < bounds[i].lo || params[i] > bounds[i].hi)
            throw ConfigError("mechanism \"" + name + "\": parameter " + std::to_string(i) +
                              " outside declared bounds");
    }
    Mechanism m;
    m.kind_ = Kind::replacement;
    m.mode_ = mode;
    m.name_ = std::move(name);
    m.params_ = std::move(params);
    m.bounds_ = std::move(bounds);
    m.replace_ = std::move(fn);
    return m;
}

std::optional<SubGna> Mechanism::run_extract(const GnaConfig& config, Rng& rng) const {
    if (kind_ != Kind::extraction || !extract_)
        throw ConfigError("mechanism \"" + name_ + "\" is not a runnable extraction");
    return extract_(config, rng);
}

RewriteEvent Mechanism::run_replace(const SubGna& sub, Rng& rng, IdAllocator& ids) const {
    if (kind_ != Kind::replacement || !replace_)
        throw ConfigError("mechanism \"" + name_ + "\" is not a runnable replacement");
    return replace_(sub, rng, ids);
}

// ---- family extraction ---------------------------------------------------------

Mechanism make_family_extraction(const FamilyExtractionSpec& spec) {
    const SelectionFamily& family = find_family(spec.family);  // validates the name
    const std::string family_name = spec.family;
    FamilyExtractionSpec s = spec;

    auto fn = [s, &family](const GnaConfig& config, Rng& rng) -> std::optional<SubGna> {
        if (s.family == "empty") return SubGna{};  // pure creation

        // Sorted alphabet of states, either declared or derived per call.
        std::vector<std::string> alphabet = s.state_alphabet;
        std::map<std::string, std::size_t> index;
        if (!alphabet.empty()) {
            std::sort(alphabet.begin(), alphabet.end());
            for (std::size_t i = 0; i < alphabet.size(); ++i) index[alphabet[i]] = i;
            for (const auto& [id, rec] : config.nodes()) {
                if (!index.count(rec.state))
                    throw SchemaError("family extraction \"" + s.family +
                                      "\": configuration contains state \"" + rec.state +
                                      "\" outside the declared alphabet");
            }
        } else {
            std::set<std::string> seen;
            for (const auto& [id, rec] : config.nodes()) seen.insert(rec.state);
            for (const auto& st : seen) {
                index[st] = alphabet.size();
                alphabet.push_back(st);
            }
        }

        std::vector<NodeId> ids;
        std::vector<double> weights;
        ids.reserve(config.node_count());
        weights.reserve(config.node_count());
        for (const auto& [id, rec] : config.nodes()) {
            ids.push_back(id);
            weights.push_back(family.weight(index.at(rec.state),
                                            rec.out.size() + rec.in_srcs.size(), s.params));
        }

        std::set<NodeId> seeds;
        std::vector<NodeId> seed_order;
        for (std::size_t draw = 0; draw < s.draws; ++draw) {
            double total = 0.0;
            for (double w : weights) total += w;
            if (total <= 0.0) return std::nullopt;  // quiescence: nothing selectable
            std::size_t pick = rng.weighted(weights);
            seeds.insert(ids[pick]);
            seed_order.push_back(ids[pick]);
            weights[pick] = 0.0;  // without replacement
        }

        std::set<NodeId> members = seeds;
        if (s.closure) {
            for (NodeId seed : seeds) {
                for (NodeId src : config.in_sources(seed)) members.insert(src);
            }
        }
        SubGna sub = SubGna::induced(config, members);
        sub.focus = seed_order;
        return sub;
    };

    Mechanism::Mode mode = (family_name == "empty") ? Mechanism::Mode::deterministic
                                                    : Mechanism::Mode::stochastic;
    return Mechanism::extraction("family:" + family_name, mode, std::move(fn), s.params);
}

// ---- rewriting cycle ------------------------------------------------------------

std::optional<SubGna> extract(const GnaConfig& config, const Mechanism& e, Rng& rng) {
    return e.run_extract(config, rng);
}

RewriteEvent replace(const SubGna& sub, const Mechanism& r, Rng& rng, IdAllocator& ids) {
    RewriteEvent event = r.run_replace(sub, rng, ids);
    event.validate();
    return event;
}

void embed_in_place(GnaConfig& config, const RewriteEvent& event) {
    event.validate();
    if (!event.old_sub.matches_config(config))
        throw StaleEventError("embed: event's old subnetwork does not match the configuration");

    // 2. delete the extracted nodes; incident links go with them
    for (const auto& [id, rec] : event.old_sub.nodes()) config.remove_node(id);

    // 3. insert the replacement verbatim
    for (const auto& [id, rec] : event.new_sub.nodes()) {
        if (config.has_node(id))
            throw StaleEventError("embed: replacement node " + std::to_string(id) +
                                  " collides with a remainder node");
        config.insert_node(id, rec.state);
    }
    for (const auto& [id, rec] : event.new_sub.nodes()) {
        for (const Link& link : rec.out) config.add_link(id, link.dst, link.state);
    }

    // 4. re-attach bridges through the correspondence
    for (const BridgeLink& bridge : event.old_sub.bridges()) {
        auto it = event.correspondence.find(bridge.inside);
        if (it == event.correspondence.end()) continue;  // no correspondent: bridge dies
        const NodeId inside_now = it->second;
        if (!config.has_node(bridge.outside))
            throw StaleEventError("embed: bridge endpoint " + std::to_string(bridge.outside) +
                                  " disappeared from the remainder");
        if (bridge.outgoing)
            config.add_link(inside_now, bridge.outside, bridge.state);
        else
            config.add_link(bridge.outside, inside_now, bridge.state);
    }

    // 5. bookkeeping
    config.advance_time();
}

GnaConfig embed(const GnaConfig& config, const RewriteEvent& event) {
    GnaConfig result = config;
    embed_in_place(result, event);
    return result;
}

std::optional<RewriteEvent> step(GnaConfig& config, const Mechanism& e,
                                 const Mechanism& r, Rng& rng) {
    std::optional<SubGna> sub = extract(config, e, rng);
    if (!sub) return std::nullopt;
    IdAllocator ids(config.next_id());
    RewriteEvent event = replace(*sub, r, rng, ids);
    embed_in_place(config, event);
    return event;
}

GnaConfig Trajectory::config_at(std::size_t t) const {
    if (t > events.size())
        throw TraceError("config_at: step " + std::to_string(t) + " beyond trajectory end");
    GnaConfig config = initial;
    for (std::size_t i = 0; i < t; ++i) embed_in_place(config, events[i]);
    return config;
}

TrajectoryCursor::TrajectoryCursor(const Trajectory& traj)
    : traj_(&traj), config_(traj.initial) {}

bool TrajectoryCursor::at_end() const { return pos_ >= traj_->events.size(); }

void TrajectoryCursor::advance() {
    if (at_end()) throw TraceError("TrajectoryCursor: advanced past the end");
    embed_in_place(config_, traj_->events[pos_]);
    ++pos_;
}

Trajectory run(const GnaConfig& initial, const Mechanism& e, const Mechanism& r,
               std::size_t steps, Rng& rng) {
    Trajectory traj;
    traj.initial = initial;
    GnaConfig config = initial;
    for (std::size_t i = 0; i < steps; ++i) {
        std::optional<RewriteEvent> event = step(config, e, r, rng);
        if (!event) {
            traj.quiescent = true;
            break;
        }
        traj.events.push_back(std::move(*event));
    }
    traj.final_config = std::move(config);
    return traj;
}

}  // namespace gna
