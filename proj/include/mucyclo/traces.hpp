#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mucyclo/formula.hpp"
#include "mucyclo/proof.hpp"

namespace mucyclo {

/// One descendant step of a rule application: the formula at the conclusion,
/// the formula it becomes in the premise, and the variable unfolded by the
/// step (fixpoint rules only).
struct TraceTriple {
    AnnotatedFormula from;
    AnnotatedFormula to;
    std::optional<std::string> unfolded_variable;
};

/// Descendant relation for one premise of a rule instance. For Backedge and
/// Discharge nodes child_index must be 0 and the triples lead into the
/// target/companion sequent. Throws on invalid instances.
std::vector<TraceTriple> descendants(const Proof& proof, int node_id, std::size_t child_index);

struct TraceGraphEdge {
    int from = 0;
    int to = 0;
    /// (formula at from, formula at to, unfolded variable or none)
    std::vector<std::tuple<Formula, Formula, std::optional<std::string>>> steps;
};

/// Proof graph with back-edges resolved; infinite branches of the (unfolded)
/// proof are exactly the infinite paths from the root.
struct TraceGraph {
    int root = 0;
    std::map<int, std::vector<Formula>> node_formulas;
    std::vector<TraceGraphEdge> edges;
};

TraceGraph build_trace_graph(const Proof& proof);

struct PriorityMap {
    std::map<std::string, unsigned> priority;

    unsigned at(const std::string& var) const;
};

/// Even priorities for nu-variables, odd for mu-variables, monotone along the
/// subsumption order (gap insertion over a topological linearization).
PriorityMap priority_assignment(const ClosureSet& closure, const SubsumptionOrder& order);

enum class TraceVerdict { Accept, Reject, ResourceError };

struct TraceCheckResult {
    TraceVerdict verdict = TraceVerdict::Accept;
    std::string detail;
    std::uint64_t profiles = 0;        // inclusion check: distinct path profiles
    std::uint64_t lassos_checked = 0;  // oracle: simple lassos examined
};

/// Exact check that every infinite path from the root carries a trace whose
/// minimal infinitely-often unfolded priority is even. Decided as an
/// omega-language inclusion: all-paths automaton versus the nondeterministic
/// good-trace automaton, via profile (transition monoid) saturation with the
/// classical idempotent-loop membership test. A profile budget bounds the
/// saturation; exceeding it is a resource error, never a verdict.
TraceCheckResult check_global_trace_condition(const TraceGraph& graph,
                                              const PriorityMap& priorities,
                                              std::uint64_t profile_budget = 2'000'000);

/// Independent brute-force oracle: enumerates the simple lassos of the graph
/// and decides, per lasso, whether a good trace exists by cycle analysis of
/// the lasso x trace product.
TraceCheckResult lasso_oracle(const TraceGraph& graph, const PriorityMap& priorities,
                              std::uint64_t node_cap = 64);

/// Diagnostic node/edge dump of the good-trace automaton.
std::string dump_trace_automaton(const TraceGraph& graph, const PriorityMap& priorities);

}  // namespace mucyclo
