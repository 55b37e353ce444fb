#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mucyclo/formula.hpp"

namespace mucyclo {

/// A name d_x for a formal variable x, rendered `x#index`.
struct Name {
    std::string variable;
    unsigned index = 0;

    std::string str() const { return variable + "#" + std::to_string(index); }
    static Name parse(const std::string& text);

    auto operator<=>(const Name&) const = default;
};

/// Finite word of names; the empty word is epsilon.
using Annotation = std::vector<Name>;

std::string annotation_str(const Annotation& a);

/// Reflexive, not necessarily contiguous sub-word relation.
bool subword(const Annotation& a, const Annotation& b);

struct AnnotatedFormula {
    Formula formula;
    Annotation annotation;

    std::string str() const;
    auto operator<=>(const AnnotatedFormula&) const = default;
};

/// Set of annotated formulas in canonical order.
class AnnotatedSequent {
public:
    AnnotatedSequent() = default;
    explicit AnnotatedSequent(std::vector<AnnotatedFormula> items);

    const std::vector<AnnotatedFormula>& items() const { return items_; }
    std::size_t size() const { return items_.size(); }
    bool contains(const AnnotatedFormula& af) const;

    AnnotatedSequent with(const AnnotatedFormula& af) const;
    AnnotatedSequent without(const AnnotatedFormula& af) const;

    Sequent bare() const;
    std::string str() const;

    bool operator==(const AnnotatedSequent&) const = default;
    auto operator<=>(const AnnotatedSequent&) const = default;

private:
    std::vector<AnnotatedFormula> items_;
};

enum class Rule { Ax, Or, And, Weak, Box, Mu, Nu, Backedge, Exp, Clo, Cut, Discharge, Open };

std::string rule_name(Rule r);
std::optional<Rule> rule_from_name(const std::string& name);

enum class ProofSystem { Nw, Clo };

struct ProofNode {
    int id = 0;
    AnnotatedSequent sequent;
    Rule rule = Rule::Open;
    std::optional<int> principal;  // index into the sequent's canonical order
    std::vector<int> children;
    std::optional<int> target;     // Backedge target / Discharge companion
    std::optional<Name> token;     // Clo / Discharge

    const AnnotatedFormula& principal_formula() const;
};

/// Finite rule-labelled tree addressed by node ids; back-edges and discharge
/// leaves refer to ancestors by id.
struct Proof {
    ProofSystem system = ProofSystem::Nw;
    int root = 0;
    std::map<int, ProofNode> nodes;

    const ProofNode& node(int id) const;
    bool has_node(int id) const { return nodes.count(id) > 0; }

    /// parent id per node, root maps to nullopt; error on malformed trees.
    std::map<int, std::optional<int>> parents() const;
    bool is_strict_ancestor(int ancestor, int descendant) const;
};

/// Structural well-formedness: ids consistent, children form a tree rooted at
/// root, child counts match rules. Returns diagnostics, empty when fine.
std::vector<std::string> validate_tree(const Proof& proof);

Proof proof_from_json_text(const std::string& text);
std::string proof_to_json_text(const Proof& proof);

Proof load_proof_file(const std::string& path);
void save_proof_file(const Proof& proof, const std::string& path);

}  // namespace mucyclo
