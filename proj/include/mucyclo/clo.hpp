#pragma once

#include <map>
#include <string>
#include <vector>

#include "mucyclo/nw.hpp"
#include "mucyclo/proof.hpp"

namespace mucyclo {

/// a <= x: every name in the word belongs to a variable below x.
bool annotation_leq_var(const Annotation& a, const std::string& x, const SubsumptionOrder& order);

/// Side-condition switches. The individual toggles exist to demonstrate that
/// each condition is load-bearing (disabling any one flips a known verdict);
/// production callers use the defaults.
struct CheckOptions {
    bool allow_cut = false;
    bool check_eta_annotation = true;     // fixpoint rule requires a <= x
    bool check_exp_subword = true;        // premise annotations are subwords
    bool check_clo_freshness = true;      // a <= dx and dx fresh for the context
    bool check_discharge_equality = true; // leaf equals companion + new name
};

struct CloCheckResult {
    bool accepted = false;
    std::vector<std::string> diagnostics;  // all violations, not just the first

    std::string summary() const;
};

/// Local checking of annotated derivations: every rule instance including the
/// annotation side conditions, unique discharge tokens, and the discharge
/// discipline. Open branches are reported (a proof must close every leaf).
CloCheckResult check_clo(const Proof& proof, const CheckOptions& options = {});

/// Soundness translation: Clo nodes become Nu nodes, Exp nodes are contracted,
/// Discharge leaves become back-edges to their companions, annotations are
/// stripped. Input must pass check_clo; the output is a cyclic derivation
/// whose acceptance by check_nw is the executable content of soundness.
Proof translate_clo_to_nw(const Proof& proof);

/// Nodes whose bare sequent equals the target (Exp nodes excluded), with
/// edges u -> v when v lies below u with no unfolding node strictly between.
struct UnfoldingTree {
    std::vector<int> nodes;                  // preorder
    std::vector<int> roots;                  // topmost unfolding nodes
    std::map<int, std::vector<int>> children;
};

UnfoldingTree unfolding_tree(const Proof& proof, const Sequent& target);

enum class UnfoldingChildKind { XNode, YNode, Neither };

/// For a two-formula target {nu x.phi, nu y.psi}: an x-node child has no
/// trace from nu y.psi at the parent into either target formula at the child;
/// a y-node symmetrically blocks traces from nu x.phi.
UnfoldingChildKind classify_unfolding_child(int u, int v, const Proof& proof,
                                            const Sequent& target);

/// True when no discharge leaf inside u's subtree has its companion strictly
/// above u.
bool is_root_like(int u, const Proof& proof);

struct LemmaVerdict {
    bool accepted = false;
    std::vector<std::string> diagnostics;
};

/// Every (root-like, for annotated derivations) non-leaf unfolding node must
/// have two or three children in the unfolding tree, exactly one an x-node
/// and exactly one a y-node.
LemmaVerdict verify_children_lemma(const Proof& proof, const Sequent& target);

}  // namespace mucyclo
