#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "gna/rng.hpp"

namespace gna {

// ---------------------------------------------------------------------------
// Operational-network simulator.
//
// A fixed "standby" roster of heterogeneous agents carries an event table.
// Events that become executable fire once, run down a countdown timer, and on
// completion add a typed, weighted link to a growing directed operational
// network while moving knowledge between the endpoint agents.  The simulation
// advances until no active or executable events remain.
// ---------------------------------------------------------------------------

// A knowledge variable's value: boolean flag, number, or free-text label.
using OpValue = std::variant<bool, double, std::string>;

// Scenario-file representation of a value.  Booleans render as true/false,
// numbers in shortest round-trip form, strings single-quoted.
std::string op_value_to_string(const OpValue& value);

// Inverse of op_value_to_string, also accepting bare (unquoted) strings.
OpValue op_value_from_string(const std::string& text);

struct OpAgent {
    std::string id;
    // Attribute string: a fixed-position list of categorical traits.  The
    // first attribute is the agent class and must be one of sensor, router,
    // actor, database, controller.
    std::vector<std::string> attributes;
    std::map<std::string, OpValue> knowledge;
    bool tasked = false;

    // Heterotype key: the first prefix_len attributes joined with '/'.
    // Agents with equal keys count as the same heterotype.
    std::string heterotype(std::size_t prefix_len) const;
};

enum class OpLinkType { request, flow, task };

std::string to_string(OpLinkType type);
OpLinkType op_link_type_from_string(const std::string& text);

// Compiled boolean predicate over the knowledge of an event's endpoints.
// Grammar (parsed at load time; malformed text raises ConfigError):
//
//   expr   := term (("or" | "||") term)*
//   term   := factor (("and" | "&&") factor)*
//   factor := ("not" | "!") factor | "(" expr ")" | compare
//   compare:= operand (("=="|"!="|"<"|"<="|">"|">=") operand)?
//   operand:= "true" | "false" | number | 'quoted text' | identifier
//
// A bare identifier reads the source agent's knowledge; "src.name" and
// "dst.name" select an endpoint explicitly.  A missing variable or a
// type-mismatched comparison evaluates to false (ordered comparisons apply
// to numbers and strings only).  A lone operand is tested for truthiness:
// booleans as themselves, numbers against zero, strings against emptiness.
class OpCondition {
public:
    virtual ~OpCondition() = default;
    virtual bool evaluate(const OpAgent& source, const OpAgent& dest) const = 0;
};

// Compiles an expression; empty or "-" text yields an always-true condition.
std::shared_ptr<const OpCondition> compile_condition(const std::string& text);

// One row of the event table.  Events fire at most once; recurring
// interactions are written as separate rows.
struct OpEvent {
    std::string condition_text;  // original expression ("-" when vacuous)
    std::string source;          // agent id
    std::string dest;            // agent id
    OpLinkType type = OpLinkType::flow;
    // Variables the source must hold (by name) for the event to start.
    std::vector<std::string> knowledge_required;
    // Variables moved when the event completes.  request: the destination's
    // listed variables are copied back to the source; flow: the source's
    // listed variables are copied to the destination; task: the list is
    // ignored and the destination is marked tasked.  Variables the giver
    // does not hold are skipped.
    std::vector<std::string> knowledge_transferred;
    int duration = 1;   // ticks from activation to completion (>= 1)
    int variation = 0;  // +/- uniform integer jitter on duration (>= 0)
    std::shared_ptr<const OpCondition> condition;  // compiled condition_text
};

// A parsed scenario: roster plus event table.
//
// File format ("opnet-scenario v1"), one record per line, ';'-separated
// columns, '#' comments and blank lines ignored:
//
//   opnet-scenario v1
//   prefix 3
//   agent <id> ; <attr>,<attr>,...
//   know <id> ; <variable> ; <value>
//   event <condition> ; <src> ; <dst> ; <type> ; <required,...> ;
//         <transferred,...> ; <duration> ; <variation>
//
// "-" marks an empty condition or an empty variable list.  Attribute and
// variable names must not contain ';', ',' or quotes; string values must
// not contain ';', a quote, or a newline.  Agents must be declared before
// they are referenced and need at least `prefix` attributes.
struct OpScenario {
    std::size_t heterotype_prefix = 3;
    std::vector<OpAgent> agents;  // declaration order
    std::vector<OpEvent> events;  // table order; index is the commit priority

    const OpAgent* find_agent(const std::string& id) const;
};

// Parses scenario text.  Structural problems (missing header, wrong column
// counts, bad numbers) raise ParseError; semantic problems (unknown agent
// class, undeclared endpoints, duplicate ids, bad conditions, duration < 1)
// raise ConfigError.
OpScenario parse_scenario(const std::string& text);
OpScenario load_scenario(const std::string& path);  // IoError on read failure
std::string serialize_scenario(const OpScenario& scenario);

// Identity of one directed typed link in the operational network.
struct OpLinkKey {
    std::string src;
    std::string dst;
    OpLinkType type = OpLinkType::flow;

    friend bool operator==(const OpLinkKey&, const OpLinkKey&) = default;
    friend auto operator<=>(const OpLinkKey&, const OpLinkKey&) = default;
};

// Log entry for one completed interaction.
struct OpCompletion {
    long long tick = 0;          // clock value once the completing tick ends
    std::size_t event_index = 0;
    std::vector<std::string> transferred;  // variables actually copied
};

// Live simulation state.  One tick performs, in order: (1) activate every
// not-yet-fired executable event with a countdown of duration plus sampled
// variation (clamped to >= 1; the rng is consulted only when variation > 0);
// (2) decrement every active countdown, including ones started this tick;
// (3) commit countdowns that reached zero in event-table order — add or
// reweight the typed link, move knowledge, log the completion; (4) advance
// the clock.  Node and link-weight totals therefore never decrease.
class OpState {
public:
    explicit OpState(OpScenario scenario);

    // True when the event's condition holds and the source currently holds
    // every required variable.  Index must be in range.
    bool executable(std::size_t event_index) const;

    void tick(Rng& rng);

    // Ticks until quiescent or until max_ticks elapse; returns the number of
    // ticks run and sets *hit_cap (when given) if the bound cut the run off.
    long long run_to_quiescence(Rng& rng, long long max_ticks,
                                bool* hit_cap = nullptr);

    // No active countdowns and no executable unfired event: nothing can
    // change any more.
    bool quiescent() const;

    const OpScenario& scenario() const { return scenario_; }
    long long clock() const { return clock_; }
    const std::set<std::string>& operational_nodes() const { return op_nodes_; }
    const std::map<OpLinkKey, long long>& operational_links() const {
        return op_links_;
    }
    const std::vector<OpCompletion>& completions() const { return completions_; }
    bool fired(std::size_t event_index) const;

    // Live agents (knowledge and tasked flags evolve during the run).
    const std::map<std::string, OpAgent>& agents() const { return agents_; }
    const OpAgent& agent(const std::string& id) const;  // DomainError if absent

private:
    OpScenario scenario_;
    std::map<std::string, OpAgent> agents_;
    std::vector<char> fired_;           // one flag per event row
    std::map<std::size_t, int> active_;  // event index -> remaining ticks
    std::set<std::string> op_nodes_;
    std::map<OpLinkKey, long long> op_links_;
    std::vector<OpCompletion> completions_;
    long long clock_ = 0;
};

// Normalized heterotype entropy S = -(1/ln K) * sum_k X_k ln X_k where X_k is
// the fraction of agents in heterotype k and K the number of distinct
// heterotypes.  S is 0 when K == 1 and is clamped to [0,1].  An empty input
// raises DomainError.
double network_entropy(const std::vector<std::string>& heterotypes);
double network_entropy(const std::vector<OpAgent>& agents,
                       std::size_t prefix_len);

// Closed radius-1 neighborhood of a node in the operational network, with
// links treated as undirected for reachability.  DomainError when the node
// is not part of the operational network.
struct SphereOfInfluence {
    std::set<std::string> nodes;             // center plus direct neighbors
    std::map<OpLinkKey, long long> links;    // induced typed links
    double fraction = 0.0;                   // |nodes| / |operational network|
    std::size_t degree = 0;                  // distinct neighbors of the center
};
SphereOfInfluence sphere_of_influence(const OpState& st,
                                      const std::string& node);

// Snapshot summary of the operational network (all fields zero when it is
// still empty).  Entropy is computed over the operational nodes only.
struct OpMetrics {
    std::size_t node_count = 0;
    std::size_t link_count = 0;  // distinct typed directed links
    long long max_weight = 0;
    long long min_weight = 0;
    double avg_weight = 0.0;
    std::size_t heterotype_count = 0;
    double entropy = 0.0;
};
OpMetrics op_metrics(const OpState& st);

std::string op_metrics_csv_header();
std::string op_metrics_csv_row(long long clock, const OpMetrics& metrics);

// Deterministic text dump of clock, nodes, links, live agent knowledge and
// the completion log, for reproducibility comparisons.
std::string serialize_opstate(const OpState& st);

}  // namespace gna
