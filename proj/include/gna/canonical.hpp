#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gna/config.hpp"

namespace gna {

// Canonical form of a subnetwork up to state-respecting isomorphism.
//
// `key` encodes node states, link states and topology; two subnetworks are
// isomorphic (states preserved) iff their keys are equal — guaranteed for
// subnetworks of up to 8 nodes, where the form is computed by exhaustive
// search over a refinement-pruned candidate set.  Larger subnetworks use
// iterative state-and-neighborhood color refinement with deterministic
// individualization: keys then separate everything refinement separates, and
// remain relabeling-invariant whenever same-colored nodes are automorphic
// (`exact` is false to flag the weaker guarantee).
//
// `order` lists the member nodes in canonical order, so two subnetworks with
// equal keys can be aligned position by position.  Bridges, focus and tags
// are ignored: the form describes the induced fragment only.
struct CanonicalForm {
    std::string key;
    std::vector<NodeId> order;
    bool exact = false;
};

// `seed_colors`, when given, pre-partitions the nodes: nodes with different
// seeds are never mapped onto each other and the seeds are baked into the
// key.  Used to canonicalize replacements relative to a fixed left-hand side.
CanonicalForm canonical_form(const SubGna& sub,
                             const std::map<NodeId, int>* seed_colors = nullptr);

inline std::string canonical_key(const SubGna& sub) { return canonical_form(sub).key; }

// True when `mapping` (a -> b, defined on every node of `a`) is a bijection
// preserving node states and link multisets.  Bridges are not considered.
bool is_isomorphism(const SubGna& a, const SubGna& b,
                    const std::map<NodeId, NodeId>& mapping);

// State-respecting isomorphism a -> b via canonical-order alignment,
// verified structurally before returning.  std::nullopt when none is found.
std::optional<std::map<NodeId, NodeId>> find_isomorphism(const SubGna& a, const SubGna& b);

}  // namespace gna
