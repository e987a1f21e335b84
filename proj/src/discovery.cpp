#include "gna/discovery.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <set>

namespace gna {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kPosInf = std::numeric_limits<double>::infinity();

SubGna relabel(const SubGna& sub, const std::map<NodeId, NodeId>& to) {
    SubGna out;
    for (const auto& [id, rec] : sub.nodes()) out.add_node(to.at(id), rec.state);
    for (const auto& [id, rec] : sub.nodes())
        for (const Link& link : rec.out) out.add_link(to.at(id), to.at(link.dst), link.state);
    return out;
}

// True when the union of old and new members (correspondents unified) forms
// one connected region under the union of old and new links.
bool footprint_connected(const RewriteEvent& event) {
    std::map<NodeId, NodeId> rep;  // new-sub id -> representative id
    for (const auto& [from, to] : event.correspondence) rep[to] = from;
    auto new_rep = [&](NodeId id) {
        auto it = rep.find(id);
        return it != rep.end() ? it->second : id;
    };

    std::map<NodeId, std::vector<NodeId>> adj;
    for (const auto& [id, rec] : event.old_sub.nodes()) adj[id];
    for (const auto& [id, rec] : event.new_sub.nodes()) adj[new_rep(id)];
    auto connect = [&](NodeId a, NodeId b) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    };
    for (const auto& [id, rec] : event.old_sub.nodes())
        for (const Link& link : rec.out) connect(id, link.dst);
    for (const auto& [id, rec] : event.new_sub.nodes())
        for (const Link& link : rec.out) connect(new_rep(id), new_rep(link.dst));

    if (adj.size() <= 1) return true;
    std::set<NodeId> seen{adj.begin()->first};
    std::vector<NodeId> stack{adj.begin()->first};
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : adj.at(v))
            if (seen.insert(w).second) stack.push_back(w);
    }
    return seen.size() == adj.size();
}

}  // namespace

// ==== event detection ========================================================

DetectedEvent detect_event(const GnaConfig& before, const GnaConfig& after) {
    if (before.undirected() != after.undirected())
        throw TraceError("detect: directedness mode flips between configurations");
    if (after.time() != before.time() + 1)
        throw TraceError("detect: configurations are not one step apart (time " +
                         std::to_string(before.time()) + " -> " +
                         std::to_string(after.time()) + ")");
    if (after.next_id() < before.next_id())
        throw TraceError("detect: id watermark moved backwards");

    std::set<NodeId> deleted;       // in before, gone in after
    std::set<NodeId> created;       // in after only
    std::set<NodeId> core;

    // one merge pass over both ordered node maps
    auto bi = before.nodes().begin();
    auto ai = after.nodes().begin();
    while (bi != before.nodes().end() || ai != after.nodes().end()) {
        if (ai == after.nodes().end() || (bi != before.nodes().end() && bi->first < ai->first)) {
            deleted.insert(bi->first);
            core.insert(bi->first);
            ++bi;
        } else if (bi == before.nodes().end() || ai->first < bi->first) {
            if (ai->first < before.next_id())
                throw TraceError("detect: node id " + std::to_string(ai->first) +
                                 " reused below the watermark");
            created.insert(ai->first);
            ++ai;
        } else {
            if (bi->second.state != ai->second.state) core.insert(bi->first);
            ++bi;
            ++ai;
        }
    }

    const std::size_t base_core = core.size();

    // link differences between survivors force both endpoints into the core
    for (const auto& [id, rec] : before.nodes()) {
        if (deleted.count(id)) continue;
        std::vector<Link> old_links;
        for (const Link& link : rec.out)
            if (!deleted.count(link.dst)) old_links.push_back(link);
        std::vector<Link> new_links;
        for (const Link& link : after.out_links(id))
            if (!created.count(link.dst)) new_links.push_back(link);
        auto oi = old_links.begin();
        auto ni = new_links.begin();
        while (oi != old_links.end() || ni != new_links.end()) {
            if (ni == new_links.end() || (oi != old_links.end() && *oi < *ni)) {
                core.insert(id);
                core.insert(oi->dst);
                ++oi;
            } else if (oi == old_links.end() || *ni < *oi) {
                core.insert(id);
                core.insert(ni->dst);
                ++ni;
            } else {
                ++oi;
                ++ni;
            }
        }
    }

    // survivors adjacent to created nodes took part in the rewriting
    for (NodeId n : created) {
        for (const Link& link : after.out_links(n))
            if (!created.count(link.dst)) core.insert(link.dst);
        for (NodeId src : after.in_sources(n))
            if (!created.count(src)) core.insert(src);
    }

    DetectedEvent result;
    result.core.assign(core.begin(), core.end());
    result.expanded = core.size() > base_core;

    // in-neighbor closure: everything that could have driven the transition
    std::set<NodeId> members = core;
    for (NodeId v : core)
        for (NodeId src : before.in_sources(v)) members.insert(src);

    result.event.old_sub = SubGna::induced(before, members);
    std::set<NodeId> members_after;
    for (NodeId v : members)
        if (!deleted.count(v)) members_after.insert(v);
    for (NodeId n : created) members_after.insert(n);
    result.event.new_sub = SubGna::induced(after, members_after);
    for (NodeId v : members)
        if (!deleted.count(v)) result.event.correspondence[v] = v;

    // replay check: the event must map `before` exactly onto `after`
    try {
        GnaConfig replay = before;
        embed_in_place(replay, result.event);
        if (!(replay == after))
            throw TraceError("detect: replaying the reconstructed event does not reproduce "
                             "the next configuration (configurations are not consecutive?)");
    } catch (const TraceError&) {
        throw;
    } catch (const GnaError& e) {
        throw TraceError(std::string("detect: reconstructed event cannot be replayed: ") +
                         e.what());
    }
    return result;
}

// ==== replacement table ======================================================

std::string ReplacementTable::pattern_key(const SubGna& sub, std::span<const NodeId> core) {
    SubGna stripped = structure_copy(sub);
    std::map<NodeId, int> colors;
    for (NodeId v : core) colors[v] = 1;
    return canonical_form(stripped, &colors).key;
}

void ReplacementTable::record(const RewriteEvent& event, std::span<const NodeId> core) {
    SubGna stripped = structure_copy(event.old_sub);
    std::map<NodeId, int> colors;
    for (NodeId v : core) colors[v] = 1;
    const CanonicalForm form = canonical_form(stripped, &colors);

    std::map<NodeId, NodeId> pos;  // actual id -> canonical position
    for (std::size_t i = 0; i < form.order.size(); ++i) pos[form.order[i]] = i;

    std::map<NodeId, NodeId> new_pos;  // new-sub id -> pattern position
    for (const auto& [from, to] : event.correspondence) new_pos[to] = pos.at(from);
    NodeId next_position = form.order.size();
    for (const auto& [id, rec] : event.new_sub.nodes())
        if (!new_pos.count(id)) new_pos[id] = next_position++;

    PatternEntry& entry = entries_[form.key];
    if (entry.total == 0) {
        entry.old_pattern = relabel(stripped, pos);
        std::set<NodeId> core_pos;
        for (NodeId v : core) core_pos.insert(pos.at(v));
        entry.core_positions.assign(core_pos.begin(), core_pos.end());
    }

    ResponseVariant variant;
    variant.new_pattern = relabel(structure_copy(event.new_sub), new_pos);
    for (const auto& [from, to] : event.correspondence)
        variant.correspondence[pos.at(from)] = new_pos.at(to);

    bool merged = false;
    for (ResponseVariant& existing : entry.variants) {
        if (existing.new_pattern == variant.new_pattern &&
            existing.correspondence == variant.correspondence) {
            ++existing.count;
            merged = true;
            break;
        }
    }
    if (!merged) {
        variant.count = 1;
        entry.variants.push_back(std::move(variant));
    }
    ++entry.total;
    ++total_;
}

std::optional<RewriteEvent> ReplacementTable::apply(const SubGna& extracted,
                                                    std::span<const NodeId> core,
                                                    bool stochastic, Rng& rng,
                                                    IdAllocator& ids) const {
    SubGna stripped = structure_copy(extracted);
    std::map<NodeId, int> colors;
    for (NodeId v : core) colors[v] = 1;
    const CanonicalForm form = canonical_form(stripped, &colors);

    auto it = entries_.find(form.key);
    if (it == entries_.end()) return std::nullopt;
    const PatternEntry& entry = it->second;

    // align pattern positions with the actual nodes and verify the match
    std::map<NodeId, NodeId> to_actual;
    for (std::size_t i = 0; i < form.order.size(); ++i) to_actual[i] = form.order[i];
    if (!is_isomorphism(entry.old_pattern, stripped, to_actual)) return std::nullopt;
    std::set<NodeId> actual_core(core.begin(), core.end());
    std::set<NodeId> mapped_core;
    for (NodeId p : entry.core_positions) mapped_core.insert(to_actual.at(p));
    if (mapped_core != actual_core) return std::nullopt;

    const ResponseVariant* pick = nullptr;
    if (stochastic) {
        std::vector<double> weights;
        for (const ResponseVariant& v : entry.variants)
            weights.push_back(static_cast<double>(v.count));
        pick = &entry.variants[rng.weighted(weights)];
    } else {
        for (const ResponseVariant& v : entry.variants)
            if (!pick || v.count > pick->count) pick = &v;
    }

    // survivors inherit the aligned ids, created nodes draw fresh ones
    std::map<NodeId, NodeId> inverse_corr;  // new position -> old position
    for (const auto& [from, to] : pick->correspondence) inverse_corr[to] = from;
    std::map<NodeId, NodeId> out_map;  // new-pattern position -> actual id
    for (const auto& [id, rec] : pick->new_pattern.nodes()) {
        auto inv = inverse_corr.find(id);
        out_map[id] = (inv != inverse_corr.end()) ? to_actual.at(inv->second) : ids.allocate();
    }

    RewriteEvent event;
    event.old_sub = extracted;
    event.new_sub = relabel(pick->new_pattern, out_map);
    for (const auto& [from, to] : pick->correspondence)
        event.correspondence[to_actual.at(from)] = out_map.at(to);
    return event;
}

std::map<std::string, double> ReplacementTable::key_distribution() const {
    std::map<std::string, double> out;
    if (total_ == 0) return out;
    for (const auto& [key, entry] : entries_)
        out[key] = static_cast<double>(entry.total) / static_cast<double>(total_);
    return out;
}

// ==== training data ==========================================================

TrainingBuilder::TrainingBuilder(FitOptions options) : options_(options) {}

void TrainingBuilder::rebuild_population(const GnaConfig& config) {
    population_.clear();
    for (const auto& [id, rec] : config.nodes())
        ++population_[{rec.state, rec.out.size() + rec.in_srcs.size()}];
}

void TrainingBuilder::add_pair(const GnaConfig& before, const GnaConfig& after) {
    if (!have_stream_ || before.time() != expect_time_ ||
        before.next_id() != expect_next_id_ || before.node_count() != expect_nodes_) {
        rebuild_population(before);
    }

    DetectedEvent det = detect_event(before, after);

    const bool noop = det.event.old_sub.empty() && det.event.new_sub.empty();
    if (noop) {
        ++staged_.noop_events;
    } else if (!footprint_connected(det.event)) {
        ++staged_.skipped_disconnected;  // several simultaneous rewritings
    } else {
        PendingEvent pe;
        for (NodeId v : det.core)
            pe.core_cells.push_back({before.state(v), before.total_degree(v)});
        pe.population = population_;
        pe.in_likelihood = det.core.size() <= options_.max_core_for_likelihood;
        if (!pe.in_likelihood) ++staged_.skipped_cores;
        if (det.expanded) ++staged_.expanded_events;
        ++staged_.core_size_histogram[det.core.size()];
        staged_.table.record(det.event, det.core);
        pending_.push_back(std::move(pe));
    }
    ++staged_.pairs;

    // roll the population histogram forward to `after`
    auto dec = [this](const StringCell& cell) {
        auto it = population_.find(cell);
        if (it == population_.end() || it->second == 0)
            throw TraceError("detect: population bookkeeping drifted from the trace");
        if (--it->second == 0) population_.erase(it);
    };
    std::set<NodeId> dropped_outside;
    for (const BridgeLink& bridge : det.event.old_sub.bridges())
        if (!det.event.correspondence.count(bridge.inside))
            dropped_outside.insert(bridge.outside);
    for (const auto& [id, rec] : det.event.old_sub.nodes())
        dec({before.state(id), before.total_degree(id)});
    for (NodeId z : dropped_outside) dec({before.state(z), before.total_degree(z)});
    for (const auto& [id, rec] : det.event.new_sub.nodes())
        ++population_[{after.state(id), after.total_degree(id)}];
    for (NodeId z : dropped_outside)
        ++population_[{after.state(z), after.total_degree(z)}];

    have_stream_ = true;
    expect_time_ = after.time();
    expect_next_id_ = after.next_id();
    expect_nodes_ = after.node_count();
}

void TrainingBuilder::add_trajectory(const Trajectory& traj) {
    TrajectoryCursor cursor(traj);
    while (!cursor.at_end()) {
        GnaConfig before = cursor.current();
        cursor.advance();
        add_pair(before, cursor.current());
    }
}

TrainingData TrainingBuilder::finish() {
    TrainingData out = std::move(staged_);

    std::map<StringCell, std::size_t> cell_index;
    for (const PendingEvent& pe : pending_)
        for (const auto& [cell, count] : pe.population) cell_index[cell];
    std::set<std::string> states;
    for (const auto& [cell, idx] : cell_index) states.insert(cell.first);
    out.alphabet.assign(states.begin(), states.end());

    std::size_t next = 0;
    for (auto& [cell, idx] : cell_index) idx = next++;
    out.cells.resize(cell_index.size());
    for (const auto& [cell, idx] : cell_index) {
        const std::size_t state_idx =
            std::lower_bound(out.alphabet.begin(), out.alphabet.end(), cell.first) -
            out.alphabet.begin();
        out.cells[idx] = {state_idx, cell.second};
    }

    out.events.reserve(pending_.size());
    for (const PendingEvent& pe : pending_) {
        TrainingData::Event ev;
        ev.in_likelihood = pe.in_likelihood;
        for (const StringCell& cell : pe.core_cells)
            ev.core_cells.push_back(cell_index.at(cell));
        for (const auto& [cell, count] : pe.population)
            ev.population.push_back({cell_index.at(cell), count});
        if (ev.in_likelihood && !ev.core_cells.empty()) ++out.likelihood_events;
        out.events.push_back(std::move(ev));
    }

    pending_.clear();
    staged_ = TrainingData{};
    population_.clear();
    have_stream_ = false;
    return out;
}

// ==== extraction fitting =====================================================

double core_set_log_probability(std::span<const double> core_weights, double total_weight) {
    const std::size_t k = core_weights.size();
    if (k == 0) return 0.0;
    if (k > 20) throw DomainError("core_set_log_probability: set too large for exact sum");
    for (double w : core_weights)
        if (!(w > 0.0) || !std::isfinite(w)) return kNegInf;
    if (!(total_weight > 0.0)) return kNegInf;
    double core_total = 0.0;
    for (double w : core_weights) core_total += w;
    // A set whose combined weight exceeds the population total cannot be
    // drawn from it (tolerance covers summation-order noise when the core
    // spans the whole population).
    if (core_total > total_weight * (1.0 + 1e-9)) return kNegInf;

    const std::uint32_t full = (std::uint32_t{1} << k) - 1;
    std::vector<double> sum(full + 1, 0.0);
    std::vector<double> prob(full + 1, 0.0);
    prob[0] = 1.0;
    for (std::uint32_t mask = 1; mask <= full; ++mask) {
        const std::uint32_t low = mask & (~mask + 1);
        sum[mask] = sum[mask ^ low] + core_weights[std::countr_zero(mask)];
        double acc = 0.0;
        for (std::uint32_t rest = mask; rest != 0;) {
            const std::uint32_t bit = rest & (~rest + 1);
            rest ^= bit;
            const std::uint32_t prev = mask ^ bit;
            const double denom = total_weight - sum[prev];
            if (!(denom > 0.0)) return kNegInf;
            acc += prob[prev] * (core_weights[std::countr_zero(bit)] / denom);
        }
        prob[mask] = acc;
    }
    return prob[full] > 0.0 ? std::log(prob[full]) : kNegInf;
}

double family_log_likelihood(const SelectionFamily& family, std::span<const double> params,
                             const TrainingData& data) {
    std::vector<double> cell_weight(data.cells.size());
    for (std::size_t i = 0; i < data.cells.size(); ++i) {
        const double w = family.weight(data.cells[i].first, data.cells[i].second, params);
        if (!std::isfinite(w) || w < 0.0) return kNegInf;
        cell_weight[i] = w;
    }

    double ll = 0.0;
    std::vector<double> core;
    for (const TrainingData::Event& ev : data.events) {
        if (!ev.in_likelihood || ev.core_cells.empty()) continue;
        double total = 0.0;
        for (const auto& [cell, count] : ev.population)
            total += cell_weight[cell] * static_cast<double>(count);
        core.clear();
        for (std::size_t cell : ev.core_cells) core.push_back(cell_weight[cell]);
        const double lp = core_set_log_probability(core, total);
        if (lp == kNegInf) return kNegInf;
        ll += lp;
    }
    return ll;
}

namespace {

double golden_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a);
    double x2 = a + phi * (b - a);
    double f1 = f(x1);
    double f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

FamilyFit fit_family(const std::string& family_name, const TrainingData& data,
                     const FitOptions& options) {
    const SelectionFamily& family = find_family(family_name);
    const std::size_t n_states = data.alphabet.size();
    const std::size_t n_params = family.param_count(n_states);
    const std::vector<ParamBounds> bounds = family.bounds(n_states);

    FamilyFit fit;
    fit.family = family_name;
    fit.params.resize(n_params);
    for (std::size_t i = 0; i < n_params; ++i)
        fit.params[i] = std::clamp(1.0, bounds[i].lo, bounds[i].hi);

    fit.log_likelihood = family_log_likelihood(family, fit.params, data);
    for (std::size_t sweep = 0; sweep < options.max_sweeps && n_params > 0; ++sweep) {
        const double before = fit.log_likelihood;
        for (std::size_t i = 0; i < n_params; ++i) {
            auto slice = [&](double x) {
                std::vector<double> p = fit.params;
                p[i] = x;
                return family_log_likelihood(family, p, data);
            };
            const double x = golden_max(slice, bounds[i].lo, bounds[i].hi, options.tol);
            const double fx = slice(x);
            if (fx > fit.log_likelihood) {
                fit.log_likelihood = fx;
                fit.params[i] = x;
            }
        }
        if (!(fit.log_likelihood - before > 1e-9)) break;
    }

    const double n = static_cast<double>(std::max<std::size_t>(data.likelihood_events, 1));
    fit.score = fit.log_likelihood - 0.5 * static_cast<double>(n_params) * std::log(n);
    return fit;
}

std::vector<FamilyFit> fit_all_families(const TrainingData& data, const FitOptions& options) {
    std::vector<FamilyFit> fits;
    for (const char* name : {"uniform", "degree", "state", "degree-state"})
        fits.push_back(fit_family(name, data, options));

    bool all_empty = !data.events.empty();
    for (const TrainingData::Event& ev : data.events)
        if (!ev.core_cells.empty()) all_empty = false;
    FamilyFit empty_fit;
    empty_fit.family = "empty";
    empty_fit.log_likelihood = all_empty ? 0.0 : kNegInf;
    empty_fit.score = empty_fit.log_likelihood;
    fits.push_back(std::move(empty_fit));
    return fits;
}

namespace {

FamilyFit select_winner(const std::vector<FamilyFit>& candidates) {
    // a pure-creation record is explained by "empty" exactly when it is viable
    for (const FamilyFit& fit : candidates)
        if (fit.family == "empty" && fit.log_likelihood == 0.0) return fit;
    double best = kNegInf;
    for (const FamilyFit& fit : candidates)
        if (fit.family != "empty") best = std::max(best, fit.score);
    for (const FamilyFit& fit : candidates)
        if (fit.family != "empty" && fit.score >= best - 1e-9) return fit;
    return candidates.front();
}

}  // namespace

DiscoveryResult discover(const Trajectory& trace, const FitOptions& options) {
    TrainingBuilder builder(options);
    builder.add_trajectory(trace);
    DiscoveryResult result;
    result.data = builder.finish();
    result.candidates = fit_all_families(result.data, options);
    result.winner = select_winner(result.candidates);
    return result;
}

// ==== reconstruction and scoring ============================================

ReconstructionRun reconstruct(const DiscoveryResult& model, const GnaConfig& initial,
                              std::size_t steps, Rng& rng,
                              const ReconstructionOptions& options) {
    struct Ctx {
        const DiscoveryResult* model;
        ReconstructionOptions options;
        std::vector<std::size_t> sizes;
        std::vector<double> size_weights;
        std::map<std::string, std::size_t> state_index;
        std::map<std::string, std::size_t> keys;
        std::size_t misses = 0;
    };
    auto ctx = std::make_shared<Ctx>();
    ctx->model = &model;
    ctx->options = options;
    for (const auto& [size, count] : model.data.core_size_histogram) {
        ctx->sizes.push_back(size);
        ctx->size_weights.push_back(static_cast<double>(count));
    }
    for (std::size_t i = 0; i < model.data.alphabet.size(); ++i)
        ctx->state_index[model.data.alphabet[i]] = i;

    const SelectionFamily* family =
        model.winner.family == "empty" ? nullptr : &find_family(model.winner.family);

    auto extract_fn = [ctx, family](const GnaConfig& config,
                                    Rng& r) -> std::optional<SubGna> {
        if (ctx->sizes.empty()) return std::nullopt;  // nothing was ever observed
        std::size_t want = ctx->sizes[r.weighted(ctx->size_weights)];
        if (want == 0) return SubGna{};

        std::vector<NodeId> ids;
        std::vector<double> weights;
        std::size_t positive = 0;
        for (const auto& [id, rec] : config.nodes()) {
            ids.push_back(id);
            auto st = ctx->state_index.find(rec.state);
            double w = 0.0;  // states never seen during training cannot be drawn
            if (st != ctx->state_index.end() && family)
                w = family->weight(st->second, rec.out.size() + rec.in_srcs.size(),
                                   ctx->model->winner.params);
            if (w > 0.0) ++positive;
            weights.push_back(w);
        }
        if (positive == 0) return std::nullopt;
        want = std::min(want, positive);

        std::set<NodeId> members;
        std::vector<NodeId> core;
        for (std::size_t d = 0; d < want; ++d) {
            const std::size_t pick = r.weighted(weights);
            core.push_back(ids[pick]);
            members.insert(ids[pick]);
            weights[pick] = 0.0;
        }
        for (NodeId v : core)
            for (NodeId src : config.in_sources(v)) members.insert(src);
        SubGna sub = SubGna::induced(config, members);
        sub.focus = core;
        return sub;
    };

    auto replace_fn = [ctx](const SubGna& sub, Rng& r, IdAllocator& ids) -> RewriteEvent {
        ++ctx->keys[ReplacementTable::pattern_key(sub, sub.focus)];
        std::optional<RewriteEvent> event = ctx->model->data.table.apply(
            sub, sub.focus, ctx->options.stochastic_table, r, ids);
        if (event) return *event;
        ++ctx->misses;
        if (!ctx->options.identity_on_miss)
            throw ReplacementMissError("reconstruct: no stored rewriting matches the "
                                       "extracted subnetwork");
        RewriteEvent identity;
        identity.old_sub = sub;
        identity.new_sub = structure_copy(sub);
        identity.correspondence = identity_map(sub);
        return identity;
    };

    Mechanism extraction = Mechanism::extraction("fitted-extraction",
                                                 Mechanism::Mode::stochastic, extract_fn);
    Mechanism replacement = Mechanism::replacement("fitted-replacement",
                                                   Mechanism::Mode::stochastic, replace_fn);

    ReconstructionRun run;
    run.trajectory = gna::run(initial, extraction, replacement, steps, rng);
    run.extracted_keys = std::move(ctx->keys);
    run.table_misses = ctx->misses;
    return run;
}

double bhattacharyya_distance(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size())
        throw DomainError("bhattacharyya: distributions differ in length");
    double sp = 0.0, sq = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw DomainError("bhattacharyya: negative probability");
        sp += v;
    }
    for (double v : q) {
        if (!(v >= 0.0)) throw DomainError("bhattacharyya: negative probability");
        sq += v;
    }
    if (std::abs(sp - 1.0) > 1e-9 || std::abs(sq - 1.0) > 1e-9)
        throw DomainError("bhattacharyya: distributions must sum to 1");
    if (std::equal(p.begin(), p.end(), q.begin())) return 0.0;
    double bc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) bc += std::sqrt(p[i] * q[i]);
    if (bc <= 0.0) return kPosInf;
    return std::max(0.0, -std::log(std::min(bc, 1.0)));
}

double bhattacharyya_distance(const std::map<std::string, double>& p,
                              const std::map<std::string, double>& q) {
    auto check = [](const std::map<std::string, double>& d) {
        double sum = 0.0;
        for (const auto& [key, v] : d) {
            if (!(v >= 0.0)) throw DomainError("bhattacharyya: negative probability");
            sum += v;
        }
        if (std::abs(sum - 1.0) > 1e-9)
            throw DomainError("bhattacharyya: distributions must sum to 1");
    };
    check(p);
    check(q);
    if (p == q) return 0.0;
    double bc = 0.0;
    for (const auto& [key, pv] : p) {
        auto it = q.find(key);
        if (it != q.end()) bc += std::sqrt(pv * it->second);
    }
    if (bc <= 0.0) return kPosInf;
    return std::max(0.0, -std::log(std::min(bc, 1.0)));
}

double score_reconstruction(const DiscoveryResult& model, const ReconstructionRun& run) {
    const std::map<std::string, double> reference = model.data.table.key_distribution();
    std::size_t total = 0;
    for (const auto& [key, count] : run.extracted_keys) total += count;
    if (reference.empty() && total == 0) return 0.0;
    if (reference.empty() || total == 0) return kPosInf;
    std::map<std::string, double> observed;
    for (const auto& [key, count] : run.extracted_keys)
        observed[key] = static_cast<double>(count) / static_cast<double>(total);
    return bhattacharyya_distance(reference, observed);
}

PipelineResult discover_reconstruct_score(const Trajectory& trace, Rng& rng,
                                          const FitOptions& fit,
                                          const ReconstructionOptions& recon) {
    PipelineResult result;
    result.discovery = discover(trace, fit);
    result.run = reconstruct(result.discovery, trace.initial, trace.step_count(), rng, recon);
    result.distance = score_reconstruction(result.discovery, result.run);
    return result;
}

}  // namespace gna
