#include "gna/config.hpp"

#include <algorithm>
#include <cctype>

namespace gna {

bool valid_state_token(const std::string& s) {
    if (s.empty()) return false;
    for (unsigned char c : s) {
        if (std::isspace(c) || !std::isprint(c)) return false;
    }
    return true;
}

void require_state_token(const std::string& s, const char* what) {
    if (!valid_state_token(s))
        throw SchemaError(std::string(what) + ": state label must be a non-empty token "
                          "without whitespace, got \"" + s + "\"");
}

GnaConfig::NodeRecord& GnaConfig::record(NodeId id, const char* op) {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw SchemaError(std::string(op) + ": node " + std::to_string(id) + " not present");
    return it->second;
}

const GnaConfig::NodeRecord& GnaConfig::record(NodeId id, const char* op) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw SchemaError(std::string(op) + ": node " + std::to_string(id) + " not present");
    return it->second;
}

NodeId GnaConfig::add_node(const std::string& state) {
    require_state_token(state, "add_node");
    NodeId id = next_id_++;
    nodes_[id] = NodeRecord{state, {}, {}};
    return id;
}

void GnaConfig::insert_node(NodeId id, const std::string& state) {
    require_state_token(state, "insert_node");
    if (nodes_.count(id))
        throw SchemaError("insert_node: node " + std::to_string(id) + " already present");
    nodes_[id] = NodeRecord{state, {}, {}};
    raise_next_id(id + 1);
}

void GnaConfig::remove_node(NodeId id) {
    NodeRecord& rec = record(id, "remove_node");
    // drop outgoing links: remove us from targets' in-bags
    for (const Link& link : rec.out) {
        if (link.dst == id) continue;  // self-loop handled with the node itself
        auto& bag = nodes_.at(link.dst).in_srcs;
        auto it = std::find(bag.begin(), bag.end(), id);
        if (it != bag.end()) bag.erase(it);
        --link_count_;
    }
    // count self-loops once (they were in rec.out)
    link_count_ -= static_cast<std::size_t>(
        std::count_if(rec.out.begin(), rec.out.end(),
                      [id](const Link& l) { return l.dst == id; }));
    // drop incoming links from other nodes
    for (NodeId src : rec.in_srcs) {
        if (src == id) continue;
        auto& out = nodes_.at(src).out;
        auto it = std::find_if(out.begin(), out.end(),
                               [id](const Link& l) { return l.dst == id; });
        while (it != out.end()) {
            out.erase(it);
            --link_count_;
            it = std::find_if(out.begin(), out.end(),
                              [id](const Link& l) { return l.dst == id; });
        }
    }
    nodes_.erase(id);
}

void GnaConfig::add_link(NodeId src, NodeId dst, const std::string& state) {
    require_state_token(state, "add_link");
    NodeRecord& s = record(src, "add_link");
    record(dst, "add_link");
    Link link{dst, state};
    s.out.insert(std::upper_bound(s.out.begin(), s.out.end(), link), link);
    nodes_.at(dst).in_srcs.push_back(src);
    ++link_count_;
}

bool GnaConfig::remove_link(NodeId src, NodeId dst, const std::string& state) {
    auto sit = nodes_.find(src);
    if (sit == nodes_.end()) return false;
    auto& out = sit->second.out;
    Link link{dst, state};
    auto it = std::lower_bound(out.begin(), out.end(), link);
    if (it == out.end() || !(*it == link)) return false;
    out.erase(it);
    auto& bag = nodes_.at(dst).in_srcs;
    auto bit = std::find(bag.begin(), bag.end(), src);
    if (bit != bag.end()) bag.erase(bit);
    --link_count_;
    return true;
}

bool GnaConfig::has_link(NodeId src, NodeId dst) const {
    auto sit = nodes_.find(src);
    if (sit == nodes_.end()) return false;
    const auto& out = sit->second.out;
    auto it = std::lower_bound(out.begin(), out.end(), Link{dst, ""});
    return it != out.end() && it->dst == dst;
}

bool GnaConfig::has_link(NodeId src, NodeId dst, const std::string& state) const {
    auto sit = nodes_.find(src);
    if (sit == nodes_.end()) return false;
    const auto& out = sit->second.out;
    Link link{dst, state};
    auto it = std::lower_bound(out.begin(), out.end(), link);
    return it != out.end() && *it == link;
}

const std::string& GnaConfig::state(NodeId id) const {
    return record(id, "state").state;
}

void GnaConfig::set_state(NodeId id, const std::string& state) {
    require_state_token(state, "set_state");
    record(id, "set_state").state = state;
}

std::span<const Link> GnaConfig::out_links(NodeId id) const {
    return record(id, "out_links").out;
}

std::span<const NodeId> GnaConfig::in_sources(NodeId id) const {
    return record(id, "in_sources").in_srcs;
}

std::size_t GnaConfig::total_degree(NodeId id) const {
    const NodeRecord& rec = record(id, "total_degree");
    return rec.out.size() + rec.in_srcs.size();
}

void GnaConfig::validate() const {
    for (const auto& [id, rec] : nodes_) {
        if (!valid_state_token(rec.state))
            throw SchemaError("validate: node " + std::to_string(id) + " has invalid state");
        for (const Link& link : rec.out) {
            if (!nodes_.count(link.dst))
                throw SchemaError("validate: link " + std::to_string(id) + " -> " +
                                  std::to_string(link.dst) + " points at a missing node");
        }
        if (id >= next_id_)
            throw SchemaError("validate: node " + std::to_string(id) +
                              " is at or above the id watermark");
    }
    if (undirected_) {
        for (const auto& [id, rec] : nodes_) {
            for (const Link& link : rec.out) {
                if (!has_link(link.dst, id, link.state))
                    throw SchemaError("validate: undirected flag set but link " +
                                      std::to_string(id) + " -> " + std::to_string(link.dst) +
                                      " has no mirror");
            }
        }
    }
}

bool operator==(const GnaConfig& a, const GnaConfig& b) {
    if (a.time_ != b.time_ || a.next_id_ != b.next_id_ ||
        a.undirected_ != b.undirected_ || a.nodes_.size() != b.nodes_.size())
        return false;
    auto ita = a.nodes_.begin();
    auto itb = b.nodes_.begin();
    for (; ita != a.nodes_.end(); ++ita, ++itb) {
        if (ita->first != itb->first) return false;
        if (ita->second.state != itb->second.state) return false;
        if (ita->second.out != itb->second.out) return false;  // both sorted
    }
    return true;
}

// ---- SubGna ----------------------------------------------------------------

void SubGna::add_node(NodeId id, const std::string& state) {
    require_state_token(state, "SubGna::add_node");
    if (nodes_.count(id))
        throw SchemaError("SubGna::add_node: node " + std::to_string(id) + " already present");
    nodes_[id] = SubNode{state, {}};
}

void SubGna::add_link(NodeId src, NodeId dst, const std::string& state) {
    require_state_token(state, "SubGna::add_link");
    auto sit = nodes_.find(src);
    if (sit == nodes_.end() || !nodes_.count(dst))
        throw SchemaError("SubGna::add_link: both endpoints must be member nodes");
    Link link{dst, state};
    auto& out = sit->second.out;
    out.insert(std::upper_bound(out.begin(), out.end(), link), link);
}

void SubGna::add_bridge(const BridgeLink& bridge) {
    if (!nodes_.count(bridge.inside))
        throw SchemaError("SubGna::add_bridge: inside endpoint is not a member node");
    if (nodes_.count(bridge.outside))
        throw SchemaError("SubGna::add_bridge: outside endpoint is a member node");
    bridges_.insert(std::upper_bound(bridges_.begin(), bridges_.end(), bridge), bridge);
}

const std::string& SubGna::state(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw SchemaError("SubGna::state: node " + std::to_string(id) + " not present");
    return it->second.state;
}

void SubGna::set_state(NodeId id, const std::string& state) {
    require_state_token(state, "SubGna::set_state");
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw SchemaError("SubGna::set_state: node " + std::to_string(id) + " not present");
    it->second.state = state;
}

std::span<const Link> SubGna::out_links(NodeId id) const {
    auto it = nodes_.find(id);
    if (it == nodes_.end())
        throw SchemaError("SubGna::out_links: node " + std::to_string(id) + " not present");
    return it->second.out;
}

std::size_t SubGna::link_count() const {
    std::size_t n = 0;
    for (const auto& [id, rec] : nodes_) n += rec.out.size();
    return n;
}

SubGna SubGna::induced(const GnaConfig& config, const std::set<NodeId>& members) {
    SubGna sub;
    for (NodeId id : members) {
        sub.add_node(id, config.state(id));  // throws if missing
    }
    for (NodeId id : members) {
        for (const Link& link : config.out_links(id)) {
            if (members.count(link.dst)) {
                sub.add_link(id, link.dst, link.state);
            } else {
                sub.add_bridge(BridgeLink{id, link.dst, true, link.state});
            }
        }
        // incoming bridges: links from outside into this member.  The in-bag
        // has one entry per link, so visit each distinct source only once.
        std::set<NodeId> outside_srcs;
        for (NodeId src : config.in_sources(id)) {
            if (!members.count(src)) outside_srcs.insert(src);
        }
        for (NodeId src : outside_srcs) {
            for (const Link& link : config.out_links(src)) {
                if (link.dst == id)
                    sub.add_bridge(BridgeLink{id, src, false, link.state});
            }
        }
    }
    return sub;
}

bool SubGna::matches_config(const GnaConfig& config) const {
    for (const auto& [id, rec] : nodes_) {
        if (!config.has_node(id)) return false;
        if (config.state(id) != rec.state) return false;
    }
    // induced links and bridges must match exactly
    std::vector<BridgeLink> actual_bridges;
    for (const auto& [id, rec] : nodes_) {
        std::vector<Link> inside;
        for (const Link& link : config.out_links(id)) {
            if (nodes_.count(link.dst)) {
                inside.push_back(link);
            } else {
                actual_bridges.push_back(BridgeLink{id, link.dst, true, link.state});
            }
        }
        if (inside != rec.out) return false;
        std::set<NodeId> outside_srcs;
        for (NodeId src : config.in_sources(id)) {
            if (!nodes_.count(src)) outside_srcs.insert(src);
        }
        for (NodeId src : outside_srcs) {
            for (const Link& link : config.out_links(src)) {
                if (link.dst == id)
                    actual_bridges.push_back(BridgeLink{id, src, false, link.state});
            }
        }
    }
    std::sort(actual_bridges.begin(), actual_bridges.end());
    return actual_bridges == bridges_;
}

// ---- RewriteEvent ----------------------------------------------------------

void RewriteEvent::validate() const {
    std::set<NodeId> seen_targets;
    for (const auto& [from, to] : correspondence) {
        if (!old_sub.has_node(from))
            throw SchemaError("RewriteEvent: correspondence source " + std::to_string(from) +
                              " is not in the old subnetwork");
        if (!new_sub.has_node(to))
            throw SchemaError("RewriteEvent: correspondence target " + std::to_string(to) +
                              " is not in the new subnetwork");
        if (!seen_targets.insert(to).second)
            throw SchemaError("RewriteEvent: correspondence is not injective at target " +
                              std::to_string(to));
    }
}

SubGna structure_copy(const SubGna& sub) {
    SubGna out;
    for (const auto& [id, rec] : sub.nodes()) out.add_node(id, rec.state);
    for (const auto& [id, rec] : sub.nodes())
        for (const Link& link : rec.out) out.add_link(id, link.dst, link.state);
    return out;
}

std::map<NodeId, NodeId> identity_map(const SubGna& sub) {
    std::map<NodeId, NodeId> corr;
    for (const auto& [id, rec] : sub.nodes()) corr[id] = id;
    return corr;
}

}  // namespace gna
