#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gna/config.hpp"
#include "gna/rng.hpp"

namespace gna {

// Hands out fresh node ids during replacement.  step() binds it to the
// configuration's watermark; standalone callers bind it to a local counter.
class IdAllocator {
public:
    explicit IdAllocator(NodeId start) : next_(start) {}
    NodeId allocate() { return next_++; }
    NodeId next() const { return next_; }

private:
    NodeId next_;
};

struct ParamBounds {
    double lo;
    double hi;
};

// ---- node-selection families -----------------------------------------------
//
// A selection family assigns every node a non-negative weight as a function
// of its state and total degree; extraction mechanisms draw seed nodes
// proportionally to those weights.  The same families double as the
// candidate set when fitting an extraction mechanism to observed data.

class SelectionFamily {
public:
    virtual ~SelectionFamily() = default;
    virtual const char* name() const = 0;
    // Number of free parameters given the observed state alphabet.
    virtual std::size_t param_count(std::size_t n_states) const = 0;
    virtual std::vector<ParamBounds> bounds(std::size_t n_states) const = 0;
    // Weight of a node in state `state_index` (index into the sorted
    // alphabet) with total degree `degree`.
    virtual double weight(std::size_t state_index, std::size_t degree,
                          std::span<const double> params) const = 0;
};

// Names: "uniform", "degree", "state", "degree-state", "empty".
// "degree" takes one exponent parameter in [0,10] (weight degree^a, 0^0 = 1).
// "state" takes one weight in [0,10] per alphabet state after the first
// (the first state's weight is pinned to 1 for identifiability).
// "degree-state" concatenates the two parameter blocks (exponent first).
// "empty" selects nothing: the pure-creation extraction.
const SelectionFamily& find_family(const std::string& name);  // ConfigError if unknown
std::vector<std::string> family_names();

// ---- mechanisms --------------------------------------------------------------

// A dynamical mechanism: either an extraction (how a subnetwork is chosen)
// or a replacement (how the chosen subnetwork is rewritten).  Concrete
// behavior lives in a closure; `family`, `params` and `mode` describe it.
class Mechanism {
public:
    enum class Kind { extraction, replacement };
    enum class Mode { deterministic, stochastic };

    using ExtractFn =
        std::function<std::optional<SubGna>(const GnaConfig&, Rng&)>;
    using ReplaceFn =
        std::function<RewriteEvent(const SubGna&, Rng&, IdAllocator&)>;

    static Mechanism extraction(std::string name, Mode mode, ExtractFn fn,
                                std::vector<double> params = {},
                                std::vector<ParamBounds> bounds = {});
    static Mechanism replacement(std::string name, Mode mode, ReplaceFn fn,
                                 std::vector<double> params = {},
                                 std::vector<ParamBounds> bounds = {});

    // An empty mechanism is a placeholder: running it raises ConfigError.
    Mechanism() = default;

    Kind kind() const { return kind_; }
    Mode mode() const { return mode_; }
    const std::string& name() const { return name_; }
    const std::vector<double>& params() const { return params_; }

    std::optional<SubGna> run_extract(const GnaConfig& config, Rng& rng) const;
    RewriteEvent run_replace(const SubGna& sub, Rng& rng, IdAllocator& ids) const;

private:
    Kind kind_ = Kind::extraction;
    Mode mode_ = Mode::deterministic;
    std::string name_;
    std::vector<double> params_;
    std::vector<ParamBounds> bounds_;
    ExtractFn extract_;
    ReplaceFn replace_;
};

// Generic family-driven extraction:
//   * `draws` seed nodes are sampled without replacement, proportionally to
//     the family weights evaluated per node (state index over the sorted set
//     of states present in the configuration);
//   * with `closure` set, the seeds' in-neighbors are added;
//   * the induced subnetwork (bridges included) is returned, seeds in focus.
// Returns std::nullopt (quiescence) when the configuration has fewer than
// `draws` positively weighted nodes.  The "empty" family returns the empty
// subnetwork: a pure-creation extraction.
struct FamilyExtractionSpec {
    std::string family = "uniform";
    std::vector<double> params;
    std::size_t draws = 1;
    bool closure = false;                 // add in-neighbors of the seeds
    // Optional explicit state alphabet; configurations containing a state
    // outside it are rejected with SchemaError.  Empty = derive per call.
    std::vector<std::string> state_alphabet;
};
Mechanism make_family_extraction(const FamilyExtractionSpec& spec);

// ---- rewriting cycle ---------------------------------------------------------

// Applies extraction `e` to `config`.  std::nullopt signals quiescence.
std::optional<SubGna> extract(const GnaConfig& config, const Mechanism& e, Rng& rng);

// Applies replacement `r` to an extracted subnetwork.
RewriteEvent replace(const SubGna& sub, const Mechanism& r, Rng& rng, IdAllocator& ids);

// Applies one rewrite event to the configuration:
//   1. verify event.old_sub is an induced fragment of config (StaleEventError),
//   2. delete the old nodes and every incident link,
//   3. insert the new subnetwork verbatim,
//   4. re-attach each recorded bridge through the correspondence, dropping
//      bridges whose inside endpoint has no correspondent,
//   5. advance time by one and raise the id watermark above every new node.
GnaConfig embed(const GnaConfig& config, const RewriteEvent& event);
void embed_in_place(GnaConfig& config, const RewriteEvent& event);

// One asynchronous update: extract, replace, embed.  Returns the applied
// event, or std::nullopt on quiescence (config untouched).
std::optional<RewriteEvent> step(GnaConfig& config, const Mechanism& e,
                                 const Mechanism& r, Rng& rng);

// A simulation history: the initial configuration plus one event per step.
// Intermediate configurations are reconstructed by replaying events, which
// keeps long runs affordable; final_config is kept materialized.
struct Trajectory {
    GnaConfig initial;
    std::vector<RewriteEvent> events;
    GnaConfig final_config;
    bool quiescent = false;

    std::size_t step_count() const { return events.size(); }
    // Configuration after `t` events (t = 0 returns the initial one).
    GnaConfig config_at(std::size_t t) const;
};

// Walks a trajectory forward without copying configurations.
class TrajectoryCursor {
public:
    explicit TrajectoryCursor(const Trajectory& traj);
    const GnaConfig& current() const { return config_; }
    std::size_t position() const { return pos_; }  // events applied so far
    bool at_end() const;
    void advance();  // applies the next event

private:
    const Trajectory* traj_;
    GnaConfig config_;
    std::size_t pos_ = 0;
};

// Runs `steps` asynchronous updates from `initial` (one event per step).
// Stops early with `quiescent` set if extraction signals quiescence.
Trajectory run(const GnaConfig& initial, const Mechanism& e, const Mechanism& r,
               std::size_t steps, Rng& rng);

}  // namespace gna
