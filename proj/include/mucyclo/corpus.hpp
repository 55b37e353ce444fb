#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "mucyclo/clo.hpp"
#include "mucyclo/formula.hpp"
#include "mucyclo/proof.hpp"

namespace mucyclo {

/// A pinned displayed object with the verdicts the toolkit must reproduce.
struct Artifact {
    std::string name;
    std::string kind;  // "formula" | "sequent" | "nw-proof" | "clo-derivation"
    std::optional<Formula> formula;
    std::optional<Sequent> sequent;
    std::optional<Proof> proof;
    std::vector<std::pair<std::string, std::string>> expected;  // operation -> verdict

    /// Canonical serialization: formula/sequent text or proof JSON.
    std::string payload_text() const;
};

const std::vector<std::string>& artifact_names();

/// Throws std::invalid_argument on unknown names.
Artifact get_artifact(const std::string& name);

/// Convenience: resolve a CLI argument that may be an artifact alias carrying
/// a sequent (formula artifacts become one-formula sequents).
std::optional<Sequent> artifact_sequent(const std::string& name);

struct SuiteOptions {
    CheckOptions check;              // forwarded to the annotated-proof checker
    bool stub_trace_accept = false;  // replace the trace condition by local checks only
};

struct SuiteItem {
    std::string name;
    bool passed = false;
    std::string detail;  // verdict or mismatch description
};

struct SuiteReport {
    std::vector<SuiteItem> items;
    bool all_passed() const;
    std::string str() const;
};

/// Evaluates every artifact's expected verdicts plus a battery of
/// finer-grained reproduction checks. Each relaxable side condition flips at
/// least one item when disabled through the options.
SuiteReport run_paper_suite(const SuiteOptions& options = {});

}  // namespace mucyclo
