#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "gna/errors.hpp"

namespace gna {

using NodeId = std::uint64_t;

// Default link state: models with unlabeled links use this single symbol.
inline const std::string kPresentLink = "-";

// One out-going link: destination node plus a link state label.
struct Link {
    NodeId dst;
    std::string state;

    friend bool operator==(const Link& a, const Link& b) {
        return a.dst == b.dst && a.state == b.state;
    }
    friend bool operator<(const Link& a, const Link& b) {
        if (a.dst != b.dst) return a.dst < b.dst;
        return a.state < b.state;
    }
};

// State labels are single tokens: printable, no whitespace, non-empty.
bool valid_state_token(const std::string& s);
void require_state_token(const std::string& s, const char* what);

// A dynamic network configuration: a node set, a node-state map, and per-node
// ordered out-link lists (multisets; kept sorted).  Undirected networks are
// represented as symmetric directed link pairs with the `undirected` flag set.
//
// Node ids are allocated monotonically and never reused, so identity is
// unambiguous across time steps.
class GnaConfig {
public:
    struct NodeRecord {
        std::string state;
        std::vector<Link> out;       // sorted by (dst, state)
        std::vector<NodeId> in_srcs; // unsorted bag of link sources (derived index)
    };

    GnaConfig() = default;
    explicit GnaConfig(bool undirected) : undirected_(undirected) {}

    bool undirected() const { return undirected_; }
    void set_undirected(bool u) { undirected_ = u; }

    std::uint64_t time() const { return time_; }
    void set_time(std::uint64_t t) { time_ = t; }
    void advance_time() { ++time_; }

    NodeId next_id() const { return next_id_; }
    // Raise the allocation watermark (never lowers it).
    void raise_next_id(NodeId id) { if (id > next_id_) next_id_ = id; }
    NodeId allocate_id() { return next_id_++; }

    std::size_t node_count() const { return nodes_.size(); }
    std::size_t link_count() const { return link_count_; }
    bool empty() const { return nodes_.empty(); }

    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }

    // Adds a node with a fresh engine-assigned id.
    NodeId add_node(const std::string& state);
    // Adds a node under an explicit id (parser / embed); raises the watermark.
    void insert_node(NodeId id, const std::string& state);
    // Removes the node and every incident link (both directions).
    void remove_node(NodeId id);

    void add_link(NodeId src, NodeId dst, const std::string& state = kPresentLink);
    // Removes one occurrence; returns false if no such link.
    bool remove_link(NodeId src, NodeId dst, const std::string& state = kPresentLink);
    bool has_link(NodeId src, NodeId dst) const;
    bool has_link(NodeId src, NodeId dst, const std::string& state) const;

    const std::string& state(NodeId id) const;
    void set_state(NodeId id, const std::string& state);

    std::span<const Link> out_links(NodeId id) const;
    // Sources of links pointing at `id` (a bag: one entry per link).
    std::span<const NodeId> in_sources(NodeId id) const;
    std::size_t total_degree(NodeId id) const;  // in + out

    const std::map<NodeId, NodeRecord>& nodes() const { return nodes_; }

    // Throws SchemaError if the undirected flag is set but the link multiset
    // is not symmetric, or if a link points at a missing node.
    void validate() const;

    // Semantic equality: node set, states, link multisets, time, directedness
    // flag and id watermark.  Equal configurations serialize identically.
    friend bool operator==(const GnaConfig& a, const GnaConfig& b);

private:
    NodeRecord& record(NodeId id, const char* op);
    const NodeRecord& record(NodeId id, const char* op) const;

    std::map<NodeId, NodeRecord> nodes_;
    std::uint64_t time_ = 0;
    NodeId next_id_ = 0;
    std::size_t link_count_ = 0;
    bool undirected_ = false;
};

// A link crossing the boundary of an extracted subnetwork.
// `outgoing` means the link runs inside -> outside.
struct BridgeLink {
    NodeId inside;
    NodeId outside;
    bool outgoing;
    std::string state;

    friend bool operator==(const BridgeLink& a, const BridgeLink& b) {
        return a.inside == b.inside && a.outside == b.outside &&
               a.outgoing == b.outgoing && a.state == b.state;
    }
    friend bool operator<(const BridgeLink& a, const BridgeLink& b) {
        if (a.inside != b.inside) return a.inside < b.inside;
        if (a.outside != b.outside) return a.outside < b.outside;
        if (a.outgoing != b.outgoing) return a.outgoing < b.outgoing;
        return a.state < b.state;
    }
};

// A subnetwork: an induced fragment of a configuration plus the bridge links
// that connected it to the remainder.  `focus` and `tags` are transient
// annotations written by extraction mechanisms for their paired replacement
// mechanisms (e.g. which node is the update target); they are not part of
// structural identity and are not serialized.
class SubGna {
public:
    struct SubNode {
        std::string state;
        std::vector<Link> out;  // induced links only, sorted
    };

    SubGna() = default;

    std::size_t node_count() const { return nodes_.size(); }
    bool empty() const { return nodes_.empty(); }
    bool has_node(NodeId id) const { return nodes_.count(id) != 0; }

    void add_node(NodeId id, const std::string& state);
    void add_link(NodeId src, NodeId dst, const std::string& state = kPresentLink);
    void add_bridge(const BridgeLink& bridge);

    const std::string& state(NodeId id) const;
    void set_state(NodeId id, const std::string& state);
    std::span<const Link> out_links(NodeId id) const;

    const std::map<NodeId, SubNode>& nodes() const { return nodes_; }
    const std::vector<BridgeLink>& bridges() const { return bridges_; }
    std::size_t link_count() const;

    std::vector<NodeId> focus;                     // extraction annotation
    std::map<std::string, std::string> tags;       // extraction annotation

    // Induced subnetwork of `config` on `members`, bridges included.
    static SubGna induced(const GnaConfig& config, const std::set<NodeId>& members);

    // True when this subnetwork matches `config` exactly: nodes present with
    // equal states, induced links equal, and bridge records consistent with
    // the links actually crossing the boundary.
    bool matches_config(const GnaConfig& config) const;

    friend bool operator==(const SubGna& a, const SubGna& b) {
        // structural identity only; focus/tags are transient
        return a.nodes_ == b.nodes_ && a.bridges_ == b.bridges_;
    }

private:
    friend class GnaConfig;
    std::map<NodeId, SubNode> nodes_;
    std::vector<BridgeLink> bridges_;  // sorted
};

inline bool operator==(const SubGna::SubNode& a, const SubGna::SubNode& b) {
    return a.state == b.state && a.out == b.out;
}

// One rewriting event: the extracted subnetwork, its replacement, and an
// injective partial correspondence old-node -> new-node that drives bridge
// re-attachment.  Nodes of `old_sub` without a correspondent disappear
// (their bridges are dropped); nodes of `new_sub` outside the correspondence
// range are newcomers.
struct RewriteEvent {
    SubGna old_sub;
    SubGna new_sub;
    std::map<NodeId, NodeId> correspondence;

    bool is_identity() const {
        if (!(old_sub == new_sub)) return false;
        for (const auto& [from, to] : correspondence)
            if (from != to) return false;
        return true;
    }

    // Checks domain/range membership and injectivity; throws SchemaError.
    void validate() const;
};

// Copy of the induced structure only: nodes and links, no bridges, focus or
// tags.  The usual starting point for building a replacement subnetwork.
SubGna structure_copy(const SubGna& sub);

// id -> id for every member of `sub` (the identity correspondence).
std::map<NodeId, NodeId> identity_map(const SubGna& sub);

}  // namespace gna
