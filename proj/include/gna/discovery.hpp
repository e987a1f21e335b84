#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gna/canonical.hpp"
#include "gna/engine.hpp"

namespace gna {

// ==== event detection ========================================================

// The rewriting event reverse-engineered from two consecutive configurations.
struct DetectedEvent {
    RewriteEvent event;        // old/new subnetworks, identity correspondence
    std::vector<NodeId> core;  // changed nodes, before the in-neighbor closure
    bool expanded = false;     // link diffs forced nodes beyond deletions/state changes
};

// Reconstructs the minimal plausible event between consecutive configurations:
//   * the changed core = deleted nodes, state-changed nodes, both endpoints of
//     every changed link between survivors, and survivors adjacent to new
//     nodes;
//   * the old subnetwork = the core plus its in-neighbors (the nodes that
//     could have driven the transition), induced in `before`;
//   * the new subnetwork = the surviving members plus all new nodes, induced
//     in `after`; the correspondence is the identity on survivors.
// The event is verified by replaying it on `before`.  A replay mismatch, a
// reused node id, a lowered id watermark, a mode flip or a time step other
// than +1 raises TraceError.
DetectedEvent detect_event(const GnaConfig& before, const GnaConfig& after);

// ==== replacement table ======================================================

// One observed rewriting, expressed relative to the canonical positions of
// its pattern: surviving members keep their canonical position as node id,
// created nodes take positions |pattern|, |pattern|+1, ... (ascending
// original-id order).
struct ResponseVariant {
    SubGna new_pattern;                       // no bridges
    std::map<NodeId, NodeId> correspondence;  // canonical position -> position
    std::size_t count = 0;
};

struct PatternEntry {
    SubGna old_pattern;                  // node ids = canonical positions; no bridges
    std::vector<NodeId> core_positions;  // canonical positions of the core nodes
    std::vector<ResponseVariant> variants;  // first-seen order
    std::size_t total = 0;
};

// Frequency table mapping extracted-subnetwork isomorphism classes (core
// nodes colored apart from closure nodes; bridges ignored) to the rewritings
// observed for them.
class ReplacementTable {
public:
    // Canonical key of a subnetwork with its core nodes distinguished.
    static std::string pattern_key(const SubGna& sub, std::span<const NodeId> core);

    void record(const RewriteEvent& event, std::span<const NodeId> core);

    // Rewrites `extracted` following the table.  Deterministic mode picks the
    // most frequent variant (first seen wins ties); stochastic mode samples
    // variants proportionally to frequency.  Created nodes draw fresh ids
    // from `ids` in ascending pattern-position order.  Returns std::nullopt
    // when no stored pattern matches.
    std::optional<RewriteEvent> apply(const SubGna& extracted,
                                      std::span<const NodeId> core, bool stochastic,
                                      Rng& rng, IdAllocator& ids) const;

    const std::map<std::string, PatternEntry>& entries() const { return entries_; }
    std::size_t total_events() const { return total_; }
    bool empty() const { return entries_.empty(); }

    // Normalized pattern-key frequencies: the reference distribution a
    // reconstruction is scored against.
    std::map<std::string, double> key_distribution() const;

private:
    std::map<std::string, PatternEntry> entries_;
    std::size_t total_ = 0;
};

// ==== training data ==========================================================

struct FitOptions {
    // Events whose core exceeds this size are skipped by the likelihood (the
    // exact set probability costs 2^k); they still feed the histogram and
    // the replacement table.
    std::size_t max_core_for_likelihood = 16;
    double tol = 1e-6;            // golden-section bracket width
    std::size_t max_sweeps = 100; // coordinate-descent rounds
};

// Sufficient statistics for extraction fitting, accumulated over a trace.
// Node weights depend only on (state, total degree), so each event keeps its
// core cells plus a population histogram over cells instead of full
// configurations.
struct TrainingData {
    std::vector<std::string> alphabet;                        // sorted states
    std::vector<std::pair<std::size_t, std::size_t>> cells;   // (state idx, degree)
    struct Event {
        std::vector<std::size_t> core_cells;                           // cell per core node
        std::vector<std::pair<std::size_t, std::size_t>> population;   // (cell, count)
        bool in_likelihood = true;
    };
    std::vector<Event> events;
    std::map<std::size_t, std::size_t> core_size_histogram;
    ReplacementTable table;
    std::size_t pairs = 0;
    std::size_t noop_events = 0;       // pairs with no difference at all (not recorded)
    std::size_t skipped_disconnected = 0;  // change regions not connected (not recorded)
    std::size_t skipped_cores = 0;     // cores beyond max_core_for_likelihood
    std::size_t expanded_events = 0;   // events with link-diff-forced core nodes
    std::size_t likelihood_events = 0; // non-empty cores entering the likelihood
};

// Streams consecutive configurations, detects each event and accumulates the
// statistics.  Population histograms are maintained incrementally while the
// stream stays continuous (each `before` equal to the previous `after`) and
// rebuilt from scratch otherwise.
//
// Pairs with no difference (no-op events) are counted but not recorded as
// training events.  Pairs whose change footprint (old plus new members,
// correspondents unified) is not a connected region are counted as skipped:
// they indicate several simultaneous rewritings, which the one-event-per-step
// input contract rules out.
class TrainingBuilder {
public:
    explicit TrainingBuilder(FitOptions options = {});
    void add_pair(const GnaConfig& before, const GnaConfig& after);
    void add_trajectory(const Trajectory& traj);  // every consecutive pair
    TrainingData finish();                        // resets the builder

private:
    using StringCell = std::pair<std::string, std::size_t>;  // (state, degree)
    struct PendingEvent {
        std::vector<StringCell> core_cells;
        std::map<StringCell, std::size_t> population;
        bool in_likelihood = true;
    };
    void rebuild_population(const GnaConfig& config);

    FitOptions options_;
    std::vector<PendingEvent> pending_;
    TrainingData staged_;
    std::map<StringCell, std::size_t> population_;
    bool have_stream_ = false;
    std::size_t expect_time_ = 0;
    NodeId expect_next_id_ = 0;
    std::size_t expect_nodes_ = 0;
};

// ==== extraction fitting =====================================================

struct FamilyFit {
    std::string family;
    std::vector<double> params;
    double log_likelihood = 0.0;
    double score = 0.0;  // log-likelihood minus the complexity penalty
};

// Log-probability that sequential weighted sampling without replacement from
// a population of total weight `total_weight` produced exactly the given
// core set, marginalized over draw orders (exact subset recursion, O(2^k k)).
// -inf when a weight is non-positive or the set is heavier than the
// population.  The empty set has probability 1.
double core_set_log_probability(std::span<const double> core_weights, double total_weight);

double family_log_likelihood(const SelectionFamily& family, std::span<const double> params,
                             const TrainingData& data);

// Maximum-likelihood fit of one family (coordinate descent with golden
// section per parameter); `score` carries the complexity-penalized value
// log L - (k/2) ln(max(N,1)) with N the number of likelihood events.
FamilyFit fit_family(const std::string& family, const TrainingData& data,
                     const FitOptions& options = {});

// Fits uniform, degree, state and degree-state, in that order; "empty" is
// appended as a candidate and wins exactly when every observed core is
// empty.  The winner is the first candidate within 1e-9 of the best score.
std::vector<FamilyFit> fit_all_families(const TrainingData& data,
                                        const FitOptions& options = {});

struct DiscoveryResult {
    TrainingData data;
    std::vector<FamilyFit> candidates;
    FamilyFit winner;
};

DiscoveryResult discover(const Trajectory& trace, const FitOptions& options = {});

// ==== reconstruction and scoring ============================================

struct ReconstructionOptions {
    bool stochastic_table = false;  // sample responses by frequency
    bool identity_on_miss = true;   // miss: keep the configuration (time advances);
                                    // otherwise raise ReplacementMissError
};

struct ReconstructionRun {
    Trajectory trajectory;
    std::map<std::string, std::size_t> extracted_keys;  // pattern keys seen
    std::size_t table_misses = 0;
};

// Drives the fitted mechanisms for `steps` steps from `initial`: each step
// draws a core size from the empirical histogram, draws that many nodes by
// the winning family's weights (clamped to the positively weighted
// population; quiesces when none is left), closes over in-neighbors and
// rewrites via the replacement table.  States never seen during training get
// weight zero and are not drawn.
ReconstructionRun reconstruct(const DiscoveryResult& model, const GnaConfig& initial,
                              std::size_t steps, Rng& rng,
                              const ReconstructionOptions& options = {});

// Bhattacharyya distance -ln sum sqrt(p_i q_i).  Inputs must each sum to 1
// within 1e-9 (DomainError otherwise).  Identical inputs give exactly 0;
// disjoint supports give +inf.
double bhattacharyya_distance(std::span<const double> p, std::span<const double> q);
double bhattacharyya_distance(const std::map<std::string, double>& p,
                              const std::map<std::string, double>& q);

// Distance between the table's pattern-key distribution and the keys
// extracted during `run` (+inf when the run extracted nothing).
double score_reconstruction(const DiscoveryResult& model, const ReconstructionRun& run);

struct PipelineResult {
    DiscoveryResult discovery;
    ReconstructionRun run;
    double distance = 0.0;
};

// discover() + reconstruct() from the trace's own initial configuration over
// the same number of steps + score_reconstruction().
PipelineResult discover_reconstruct_score(const Trajectory& trace, Rng& rng,
                                          const FitOptions& fit = {},
                                          const ReconstructionOptions& recon = {});

}  // namespace gna
