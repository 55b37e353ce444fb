#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mucyclo/formula.hpp"

namespace mucyclo {

/// Subset of a model's states as a bitmask. Models are capped at 16 states,
/// which is far beyond what bounded enumeration can visit anyway.
using StateSet = std::uint32_t;

constexpr std::size_t kMaxStates = 16;

struct KripkeModel {
    std::size_t num_states = 0;
    std::vector<StateSet> successors;            // per state
    std::map<std::string, StateSet> valuation;   // proposition -> states

    StateSet all_states() const {
        return static_cast<StateSet>((1u << num_states) - 1);
    }

    std::string str() const;
};

/// Parses `states N; edges i->j, ...; val p = {i, ...};`.
KripkeModel parse_model(const std::string& text);

using Environment = std::map<std::string, StateSet>;

/// Knaster-Tarski denotation; mu iterates from the empty set, nu from the
/// full set. Unbound variables are an error.
StateSet eval(const Formula& f, const KripkeModel& model, const Environment& env = {});

bool holds_everywhere(const Formula& f, const KripkeModel& model);

struct PointedModel {
    KripkeModel model;
    std::size_t state = 0;
};

enum class CountermodelStatus { Found, NoneFound, BudgetExceeded };

struct CountermodelResult {
    CountermodelStatus status = CountermodelStatus::NoneFound;
    std::optional<PointedModel> witness;
    std::uint64_t models_checked = 0;
};

/// Exhaustive enumeration of pointed models up to max_states states over the
/// formula's proposition letters, pruned by state-permutation symmetry (the
/// distinguished state 0 is kept fixed). Returns the enumeration-least
/// falsifying pointed model, if any.
CountermodelResult search_countermodel(const Formula& f, std::size_t max_states,
                                       std::uint64_t budget = 50'000'000);

}  // namespace mucyclo
