#pragma once

#include <map>
#include <string>
#include <vector>

#include "gna/engine.hpp"

namespace gna {

// A reference model: an extraction/replacement mechanism pair plus an
// initial configuration, ready to be driven by the generic engine loop.
struct GnaModel {
    std::string name;
    Mechanism extraction;
    Mechanism replacement;
    GnaConfig initial;
};

// ---- builders ------------------------------------------------------------
//
// Randomized initial conditions and all run-time randomness are drawn from
// the caller's generator, so a (model, seed) pair fixes the trajectory.

// Degree-preferential growth: starts from a seed clique of links_per_node+1
// nodes; each step one newcomer links to `links_per_node` distinct targets
// drawn proportionally to total degree.  Extraction quiesces at n_final
// nodes.  Undirected, single node state.
GnaModel ba_growth(std::size_t n_final, std::size_t links_per_node = 1);

// Asynchronous two-dimensional binary cellular automaton on a torus with
// 4-neighbor (von Neumann) coupling.  Each step one uniformly chosen cell
// adopts the majority state of its neighbors (ties keep the current state).
// Initial states are fair coin flips.
GnaModel async_ca(std::size_t width, std::size_t height, Rng& init_rng);

// Asynchronous random boolean network: n nodes, k random distinct inputs
// each (no self-inputs), the update rule table embedded in the node state as
// "<bit>:<rule bits>".  Rule bit index is built from the input bits in
// ascending input-id order.  Each step one uniformly chosen node recomputes
// its bit.
GnaModel async_rbn(std::size_t n, std::size_t k, Rng& init_rng);

// Growth by degree-preferential attachment modulated by node states: each
// newcomer gets a random state ("red"/"blue"); red newcomers prefer targets
// in the matching state with weight degree * (1 + modulation), blue
// newcomers attach by plain degree.  With probability flip_prob the target
// adopts the newcomer's state.  modulation = 0 reduces to plain
// degree-preferential growth.  Quiesces at n_final nodes.
GnaModel degree_state_growth(std::size_t n_final, double modulation = 2.0,
                             double flip_prob = 0.2, Rng* init_rng = nullptr);

// State-driven edge growth: with probability newcomer_prob a step introduces
// an isolated node with a random state; otherwise a uniformly chosen
// "red"-state node is linked to a uniformly chosen node not yet adjacent to
// it.  Starts from n_initial isolated nodes (the first one red).
GnaModel state_based_growth(std::size_t n_initial = 5, double newcomer_prob = 0.1,
                            double red_prob = 0.5, Rng* init_rng = nullptr);

// Growth with local spreading: each newcomer picks one uniformly random
// ambassador, then "burns" breadth-first across the ambassador's undirected
// neighborhood (each untried link spreads with probability burn_prob), and
// links to every burned node.  burn_prob = 0 degenerates to one link per
// newcomer.  Defaults follow common usage for this family of models:
// burn_prob 0.35, one ambassador; they are workbench defaults, not a pinned
// reference parameterization.  Quiesces at n_final nodes.
GnaModel forest_fire_growth(std::size_t n_final, double burn_prob = 0.35);

// ---- declarative registry (CLI entry point) -------------------------------

struct ModelParamSpec {
    std::string name;
    std::string kind;  // "int" | "real"
    double def;
    double lo;
    double hi;
};

struct ModelInfo {
    std::string name;
    std::string summary;
    std::vector<ModelParamSpec> params;
};

std::vector<ModelInfo> model_registry();

// Builds a model by registry name.  Unknown names or out-of-range/unknown
// parameters raise ConfigError.  `rng` seeds randomized initial conditions.
GnaModel build_model(const std::string& name,
                     const std::map<std::string, double>& params, Rng& rng);

}  // namespace gna
