#include "gna/canonical.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace gna {

namespace {

// Working representation: nodes 0..k-1, adjacency with link-state ids.
struct Scratch {
    std::size_t k = 0;
    std::vector<NodeId> ids;                 // position -> original id
    std::vector<int> state_of;               // position -> state rank
    std::vector<std::string> state_names;    // rank -> label
    std::vector<std::string> lstate_names;   // rank -> label
    // out[i] / in[i]: sorted lists of (peer position, link-state rank)
    std::vector<std::vector<std::pair<int, int>>> out, in;
};

Scratch build_scratch(const SubGna& sub, const std::map<NodeId, int>* seeds) {
    Scratch s;
    s.k = sub.node_count();
    s.ids.reserve(s.k);
    std::map<NodeId, int> pos;
    for (const auto& [id, rec] : sub.nodes()) {
        pos[id] = static_cast<int>(s.ids.size());
        s.ids.push_back(id);
    }

    // state ranks; seeds are folded in by pairing (seed, state)
    std::set<std::pair<int, std::string>> state_set;
    for (const auto& [id, rec] : sub.nodes()) {
        int seed = 0;
        if (seeds) {
            auto it = seeds->find(id);
            seed = (it == seeds->end()) ? -1 : it->second;
        }
        state_set.insert({seed, rec.state});
    }
    std::map<std::pair<int, std::string>, int> state_rank;
    for (const auto& key : state_set) {
        state_rank[key] = static_cast<int>(s.state_names.size());
        std::ostringstream name;
        name << key.first << "@" << key.second;
        s.state_names.push_back(seeds ? name.str() : key.second);
    }

    std::set<std::string> lstate_set;
    for (const auto& [id, rec] : sub.nodes())
        for (const Link& link : rec.out) lstate_set.insert(link.state);
    std::map<std::string, int> lstate_rank;
    for (const auto& name : lstate_set) {
        lstate_rank[name] = static_cast<int>(s.lstate_names.size());
        s.lstate_names.push_back(name);
    }

    s.state_of.resize(s.k);
    s.out.resize(s.k);
    s.in.resize(s.k);
    for (const auto& [id, rec] : sub.nodes()) {
        int i = pos.at(id);
        int seed = 0;
        if (seeds) {
            auto it = seeds->find(id);
            seed = (it == seeds->end()) ? -1 : it->second;
        }
        s.state_of[i] = state_rank.at({seed, rec.state});
        for (const Link& link : rec.out) {
            int j = pos.at(link.dst);
            int ls = lstate_rank.at(link.state);
            s.out[i].push_back({j, ls});
            s.in[j].push_back({i, ls});
        }
    }
    for (auto& v : s.out) std::sort(v.begin(), v.end());
    for (auto& v : s.in) std::sort(v.begin(), v.end());
    return s;
}

// One round of color refinement.  Returns true if the partition changed.
bool refine_once(const Scratch& s, std::vector<int>& color) {
    struct Signature {
        int old_color;
        std::vector<std::pair<int, int>> out_profile, in_profile;
        bool operator<(const Signature& o) const {
            if (old_color != o.old_color) return old_color < o.old_color;
            if (out_profile != o.out_profile) return out_profile < o.out_profile;
            return in_profile < o.in_profile;
        }
        bool operator==(const Signature& o) const {
            return old_color == o.old_color && out_profile == o.out_profile &&
                   in_profile == o.in_profile;
        }
    };
    std::vector<Signature> sig(s.k);
    for (std::size_t i = 0; i < s.k; ++i) {
        sig[i].old_color = color[i];
        for (auto [j, ls] : s.out[i]) sig[i].out_profile.push_back({color[j], ls});
        for (auto [j, ls] : s.in[i]) sig[i].in_profile.push_back({color[j], ls});
        std::sort(sig[i].out_profile.begin(), sig[i].out_profile.end());
        std::sort(sig[i].in_profile.begin(), sig[i].in_profile.end());
    }
    std::vector<int> order(s.k);
    for (std::size_t i = 0; i < s.k; ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return sig[a] < sig[b]; });
    std::vector<int> next(s.k, 0);
    int rank = 0;
    for (std::size_t idx = 0; idx < s.k; ++idx) {
        if (idx > 0 && !(sig[order[idx]] == sig[order[idx - 1]])) ++rank;
        next[order[idx]] = rank;
    }
    bool changed = next != color;
    color = std::move(next);
    return changed;
}

void refine_to_fixpoint(const Scratch& s, std::vector<int>& color) {
    while (refine_once(s, color)) {
    }
}

// Serializes the graph under a total order (position -> rank).  The result
// is the comparison/identity string for that ordering.
std::string serialize_under(const Scratch& s, const std::vector<int>& rank) {
    // invert: slot -> position
    std::vector<int> slot_of(s.k);
    for (std::size_t i = 0; i < s.k; ++i) slot_of[rank[i]] = static_cast<int>(i);
    std::ostringstream out;
    out << "n" << s.k << ";";
    for (std::size_t slot = 0; slot < s.k; ++slot) {
        const std::string& st = s.state_names[s.state_of[slot_of[slot]]];
        out << "s" << st.size() << ":" << st << ";";
    }
    std::vector<std::tuple<int, int, int>> edges;  // (from-slot, to-slot, lstate)
    for (std::size_t i = 0; i < s.k; ++i)
        for (auto [j, ls] : s.out[i]) edges.push_back({rank[i], rank[j], ls});
    std::sort(edges.begin(), edges.end());
    out << "m" << edges.size() << ";";
    for (auto [a, b, ls] : edges) {
        const std::string& lname = s.lstate_names[ls];
        out << "e" << a << "," << b << "," << lname.size() << ":" << lname << ";";
    }
    return out.str();
}

// Turns a discrete coloring into a total order (ties impossible).
std::vector<int> order_from_discrete(const std::vector<int>& color) {
    return color;  // colors are already 0..k-1 when discrete
}

bool is_discrete(const std::vector<int>& color) {
    std::set<int> seen(color.begin(), color.end());
    return seen.size() == color.size();
}

// Smallest color class with >= 2 members (by color value).
int first_non_singleton(const std::vector<int>& color) {
    std::map<int, int> count;
    for (int c : color) ++count[c];
    for (const auto& [c, n] : count)
        if (n >= 2) return c;
    return -1;
}

void individualize(std::vector<int>& color, std::size_t node) {
    // give `node` a fresh color just below its class, shifting others up
    int target = color[node];
    for (auto& c : color)
        if (c >= target) ++c;
    color[node] = target;
}

struct SearchState {
    const Scratch* s;
    std::string best;
    std::vector<int> best_rank;
    bool have_best = false;
};

// Exhaustive individualization-refinement over the first non-singleton class
// (used for subnetworks of up to 8 nodes: exact canonical form).
void search_exact(SearchState& st, std::vector<int> color) {
    refine_to_fixpoint(*st.s, color);
    if (is_discrete(color)) {
        std::vector<int> rank = order_from_discrete(color);
        std::string ser = serialize_under(*st.s, rank);
        if (!st.have_best || ser < st.best) {
            st.best = std::move(ser);
            st.best_rank = std::move(rank);
            st.have_best = true;
        }
        return;
    }
    int cls = first_non_singleton(color);
    for (std::size_t i = 0; i < color.size(); ++i) {
        if (color[i] != cls) continue;
        std::vector<int> branch = color;
        individualize(branch, i);
        search_exact(st, std::move(branch));
    }
}

}  // namespace

CanonicalForm canonical_form(const SubGna& sub, const std::map<NodeId, int>* seed_colors) {
    Scratch s = build_scratch(sub, seed_colors);
    CanonicalForm form;

    if (s.k == 0) {
        form.key = "n0;";
        form.exact = true;
        return form;
    }

    std::vector<int> color(s.k);
    for (std::size_t i = 0; i < s.k; ++i) color[i] = s.state_of[i];
    // normalize to dense ranks
    {
        std::vector<int> sorted(color);
        std::sort(sorted.begin(), sorted.end());
        sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
        for (auto& c : color)
            c = static_cast<int>(std::lower_bound(sorted.begin(), sorted.end(), c) -
                                 sorted.begin());
    }

    std::vector<int> rank;
    if (s.k <= 8) {
        SearchState st;
        st.s = &s;
        search_exact(st, color);
        rank = st.best_rank;
        form.key = st.best;
        form.exact = true;
    } else {
        refine_to_fixpoint(s, color);
        // deterministic individualization: exact only if refinement is discrete
        form.exact = is_discrete(color);
        while (!is_discrete(color)) {
            int cls = first_non_singleton(color);
            // first member in position order; canonical across relabelings
            // whenever same-colored nodes are automorphic
            for (std::size_t i = 0; i < color.size(); ++i) {
                if (color[i] == cls) {
                    individualize(color, i);
                    break;
                }
            }
            refine_to_fixpoint(s, color);
        }
        rank = order_from_discrete(color);
        form.key = serialize_under(s, rank);
    }

    form.order.resize(s.k);
    for (std::size_t i = 0; i < s.k; ++i) form.order[rank[i]] = s.ids[i];
    return form;
}

bool is_isomorphism(const SubGna& a, const SubGna& b,
                    const std::map<NodeId, NodeId>& mapping) {
    if (a.node_count() != b.node_count()) return false;
    if (mapping.size() != a.node_count()) return false;
    std::set<NodeId> image;
    for (const auto& [from, to] : mapping) {
        if (!a.has_node(from) || !b.has_node(to)) return false;
        if (!image.insert(to).second) return false;
        if (a.state(from) != b.state(to)) return false;
    }
    for (const auto& [id, rec] : a.nodes()) {
        std::vector<Link> mapped;
        for (const Link& link : rec.out) {
            auto it = mapping.find(link.dst);
            if (it == mapping.end()) return false;
            mapped.push_back(Link{it->second, link.state});
        }
        std::sort(mapped.begin(), mapped.end());
        auto actual = b.out_links(mapping.at(id));
        if (mapped.size() != actual.size()) return false;
        if (!std::equal(mapped.begin(), mapped.end(), actual.begin())) return false;
    }
    return true;
}

std::optional<std::map<NodeId, NodeId>> find_isomorphism(const SubGna& a, const SubGna& b) {
    if (a.node_count() != b.node_count()) return std::nullopt;
    CanonicalForm fa = canonical_form(a);
    CanonicalForm fb = canonical_form(b);
    if (fa.key != fb.key) return std::nullopt;
    std::map<NodeId, NodeId> mapping;
    for (std::size_t i = 0; i < fa.order.size(); ++i) mapping[fa.order[i]] = fb.order[i];
    if (!is_isomorphism(a, b, mapping)) return std::nullopt;
    return mapping;
}

}  // namespace gna
