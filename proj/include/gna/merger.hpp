#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gna/rng.hpp"

namespace gna {

// ---------------------------------------------------------------------------
// Post-merger cultural-integration model.
//
// Two firms of n individuals each carry points in a continuous cultural
// space and a directed social network of weighted ties.  Individuals pull
// information from in-neighbors, adopt the partner's culture by averaging
// when the cultural distance is small enough, and strengthen or weaken the
// used tie accordingly; ties dropping below 0.01 disappear.  Organizational
// dysfunction is tracked through turnover, conflict and ineffectiveness
// metrics on the largest weakly-connected component.
// ---------------------------------------------------------------------------

struct MergerParams {
    std::size_t n_per_firm = 50;
    std::size_t dims = 10;           // cultural-space dimension
    std::size_t within_ties = 490;   // directed ties inside each firm
    std::size_t between_ties = 50;   // directed cross-firm ties per direction
    double center_separation = 3.0;  // distance between the two firm centers
    double noise_sd = 0.1;           // per-component gaussian spread
    double d_c = 0.5;                // distance at which acceptance drops to 1/2
    double w = 1.0;                  // within-firm concentration exponent
    double b = 0.1;                  // between-firm concentration exponent
    std::size_t iterations = 200;
    bool shuffle_order = false;      // permute the action order each iteration

    void validate() const;  // ConfigError on non-positive / out-of-range values
};

struct Individual {
    std::size_t id = 0;    // global id: firm A holds 0..n-1, firm B n..2n-1
    int firm = 0;          // 0 = A, 1 = B
    std::size_t rank = 0;  // within-firm index i in 1..n; source weight (i/n)^w
    std::vector<double> culture;
};

// Euclidean distance between cultural vectors (DomainError on length mismatch).
double cultural_distance(const std::vector<double>& a,
                         const std::vector<double>& b);

// Directed weighted network over the merged population.  Strengths live in
// (0,1); a tie whose strength falls below 0.01 is removed, never stored.
struct MergerState {
    MergerParams params;
    std::vector<Individual> people;  // index == id
    // out_ties[origin] maps destination -> strength; in_ties mirrors it so
    // in-neighbor draws are O(in-degree).
    std::vector<std::map<std::size_t, double>> out_ties;
    std::vector<std::map<std::size_t, double>> in_ties;

    std::size_t tie_count() const;
    bool has_tie(std::size_t origin, std::size_t dest) const;
    double tie_strength(std::size_t origin, std::size_t dest) const;  // 0 if absent
    void set_tie(std::size_t origin, std::size_t dest, double strength);
    void remove_tie(std::size_t origin, std::size_t dest);
};

// Builds the merged population: cultural vectors are firm center plus
// gaussian noise (centers separated along the first axis); each firm gets
// `within_ties` distinct directed ties with the destination uniform and the
// source drawn with probability proportional to (rank/n)^w; afterwards each
// cross-firm direction gets `between_ties` distinct ties whose endpoints are
// drawn proportionally to (within-firm harmonic closeness)^b, with a 1e-9
// weight floor so isolated individuals stay drawable.  Initial strengths are
// uniform on [0.01, 0.99].  An unreachable tie quota raises InitError.
MergerState init_population(const MergerParams& params, Rng& rng);

// P(accept) = (1/2)^(distance/d_c).  DomainError when distance < 0 or d_c <= 0.
double acceptance_probability(double distance, double d_c);

// Moves the strength one unit in logit space: up on accept, down on reject.
// DomainError unless strength lies strictly inside (0,1).
double update_tie(double strength, bool accepted);

// One information-pull by `focal`: with probability 0.99 the partner is an
// in-neighbor drawn proportionally to tie strength (falling through to the
// rare branch when focal has none); otherwise a uniform member of focal's
// weakly-connected component, creating the missing partner->focal tie at
// strength 0.01.  The focal individual then accepts with probability
// P(accept): on accept its vector becomes the mean of the two vectors and
// the used tie strengthens, otherwise the tie weakens; a strength below
// 0.01 removes the tie.  A focal alone in its component does nothing.
void individual_action(MergerState& st, std::size_t focal, Rng& rng);

// Dysfunction metrics on the largest weakly-connected component (ties toward
// the component containing the smallest id).
struct MergerMetrics {
    // Mean cultural distance over cross-firm pairs inside the component;
    // NaN when the component holds only one firm.
    double avg_cross_distance = 0.0;
    double turnover = 0.0;         // 2n - |largest component|
    double conflict = 0.0;         // sum of distance x strength per tie inside
    double ineffectiveness = 0.0;  // sum of distance x edge betweenness per tie
};
MergerMetrics merger_metrics(const MergerState& st);

// Full simulation: init, then `iterations` sweeps in which every individual
// acts once in ascending-id order (or a freshly shuffled order when the
// params ask for it).  series.front() describes the freshly initialized
// state; with record_series each iteration appends its metrics, otherwise
// only the final state's metrics are appended.
struct MergerRun {
    MergerState final_state;
    std::vector<MergerMetrics> series;
    // Iteration number of each series entry (0 for the initial snapshot).
    std::vector<std::size_t> series_iteration;
};
MergerRun run_merger(const MergerParams& params, Rng& rng,
                     bool record_series = true);

// Parameter sweep: every (w, b) condition is run `runs` times with
// independent derived random streams, parallelized across worker threads
// (GNA_WORKERS environment variable, default: hardware concurrency).  Row
// order is deterministic: conditions in the given order, runs ascending,
// iterations ascending.
struct SweepCondition {
    double w = 0.0;
    double b = 0.0;
};

struct SweepOptions {
    MergerParams base;                      // w/b replaced per condition
    std::vector<SweepCondition> conditions;
    std::size_t runs = 10;
    std::uint64_t seed = 0;
    bool record_series = true;
    bool keep_final_states = false;
};

struct SweepRow {
    double w = 0.0;
    double b = 0.0;
    std::size_t run = 0;
    std::size_t iteration = 0;
    MergerMetrics metrics;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    // One final state per (condition, run) task, in row order, when
    // keep_final_states was set.
    std::vector<MergerState> final_states;
};

SweepResult run_sweep(const SweepOptions& options);

std::string sweep_csv_header();
std::string sweep_csv_row(const SweepRow& row);

// Deterministic text dump of a network state ("merger-state v1"): firm
// roster with cultural vectors plus the directed tie list, enough to
// recompute metrics or to continue running actions.  parse_merger_state
// raises ParseError on malformed text and SchemaError on dangling ids.
std::string serialize_merger_state(const MergerState& st);
MergerState parse_merger_state(const std::string& text);

}  // namespace gna
