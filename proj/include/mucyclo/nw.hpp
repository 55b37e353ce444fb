#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mucyclo/proof.hpp"
#include "mucyclo/traces.hpp"

namespace mucyclo {

struct NwCheckResult {
    bool accepted = false;
    std::vector<std::string> diagnostics;  // per-node messages on reject
    TraceCheckResult trace;                // filled by check_nw

    std::string summary() const;
};

/// Local rule-shape checking: every node must instantiate its rule exactly
/// (axioms close on complementary literals; the modal rule requires a
/// diamond-only context around its box principal; back-edges point to strict
/// ancestors with equal sequents). All violations are reported.
NwCheckResult check_nw_local(const Proof& proof);

/// Full check: local validity plus the global trace condition on the induced
/// trace graph (every infinite branch carries a trace whose outermost
/// infinitely-often unfolded variable is a nu-variable).
NwCheckResult check_nw(const Proof& proof);

struct BranchStats {
    std::size_t nodes = 0;
    std::size_t back_edges = 0;
    std::size_t simple_cycles = 0;
    std::size_t nontrivial_sccs = 0;

    std::string str() const;
};

/// Deterministic cycle-structure report over the proof's trace graph.
BranchStats branch_language_stats(const Proof& proof);

}  // namespace mucyclo
