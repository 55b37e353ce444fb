#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mucyclo/clo.hpp"
#include "mucyclo/nw.hpp"

namespace mucyclo {

struct SearchBounds {
    std::size_t max_depth = 50;              // rule applications per branch
    std::size_t max_clo = 4;                 // discharge-introducing nodes per branch
    std::size_t max_sequent = 8;             // formulas per sequent
    std::uint64_t node_budget = 10'000'000;  // total expansions
};

enum class SearchStatus { Found, ExhaustedWithinBounds, BudgetExceeded };

struct SearchStats {
    std::uint64_t expansions = 0;
    std::uint64_t distinct_states = 0;
};

struct SearchOutcome {
    SearchStatus status = SearchStatus::ExhaustedWithinBounds;
    std::optional<Proof> proof;  // set exactly when status == Found
    SearchStats stats;
    std::string fragment;        // human-readable description of the searched fragment

    std::string summary() const;
};

/// Goal-directed backward search for a cyclic proof. Bare sequents stay inside
/// the closure of the root; a repeat of an ancestor sequent becomes a back-edge
/// candidate; complete candidates are validated with check_nw before being
/// returned. Weakening is restricted: only toward an axiom or to clear
/// non-modal formulas ahead of the modal rule. Deterministic; the first
/// accepted candidate in enumeration order is returned.
SearchOutcome search_nw(const Sequent& sequent, const SearchBounds& bounds = {});

/// Backward search for an annotated proof. The annotation-shrinking rule is
/// applied only to realize a pending discharge (when the bare sequent matches
/// an open companion's assumption); cut is never applied; memoized on
/// (annotated sequent, open-companion stack). ExhaustedWithinBounds asserts
/// that the full bounded fragment was enumerated.
SearchOutcome search_clo(const Sequent& sequent, const SearchBounds& bounds = {});

struct EnumerationResult {
    std::vector<Proof> proofs;  // deterministic order, no duplicates
    bool truncated = false;     // some branch hit the size cap or the budget
    SearchStats stats;
};

/// All check_nw-accepted cyclic proofs with at most size_cap nodes, under
/// unrestricted weakening. Branches whose sequent has a small countermodel are
/// pruned (an invalid sequent has no proof).
EnumerationResult enumerate_nw_proofs(const Sequent& sequent, std::size_t size_cap,
                                      std::uint64_t node_budget = 10'000'000);

}  // namespace mucyclo
