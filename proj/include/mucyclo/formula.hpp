#pragma once

#include <compare>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace mucyclo {

enum class FormulaKind { Lit, Var, Or, And, Dia, Box, Mu, Nu };

/// Immutable mu-calculus formula. Negation appears only on propositional
/// literals. Equality and ordering go through the canonical printed form,
/// which is cached at construction.
class Formula {
public:
    static Formula lit(std::string name, bool negated);
    static Formula var(std::string name);
    static Formula disj(Formula left, Formula right);
    static Formula conj(Formula left, Formula right);
    static Formula dia(Formula sub);
    static Formula box(Formula sub);
    static Formula mu(std::string var, Formula body);
    static Formula nu(std::string var, Formula body);

    FormulaKind kind() const;
    /// Lit: atom name; Var: variable name; Mu/Nu: bound variable.
    const std::string& name() const;
    bool negated() const;

    const Formula& left() const;
    const Formula& right() const;
    const Formula& sub() const;   // Dia/Box
    const Formula& body() const;  // Mu/Nu

    bool is_fixpoint() const { return kind() == FormulaKind::Mu || kind() == FormulaKind::Nu; }
    bool is_literal() const { return kind() == FormulaKind::Lit; }

    /// Canonical concrete syntax; parse(str()) == *this.
    const std::string& str() const;

    bool operator==(const Formula& other) const { return str() == other.str(); }
    std::strong_ordering operator<=>(const Formula& other) const {
        return str() <=> other.str();
    }

    std::set<std::string> free_vars() const;
    bool closed() const { return free_vars().empty(); }

private:
    struct Node;
    explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
    static Formula make_node(FormulaKind kind, std::string name, bool negated,
                             std::vector<Formula> children);
    std::shared_ptr<const Node> node_;

    friend struct Node;
};

/// Finite set of closed formulas, kept in canonical (printed) order.
class Sequent {
public:
    Sequent() = default;
    explicit Sequent(std::vector<Formula> formulas);

    const std::vector<Formula>& formulas() const { return formulas_; }
    bool contains(const Formula& f) const;
    std::size_t size() const { return formulas_.size(); }
    bool empty() const { return formulas_.empty(); }

    Sequent with(const Formula& f) const;
    Sequent without(const Formula& f) const;

    std::string str() const;

    bool operator==(const Sequent&) const = default;
    auto operator<=>(const Sequent&) const = default;

private:
    std::vector<Formula> formulas_;
};

struct ParseError : std::runtime_error {
    ParseError(std::size_t pos, const std::string& msg)
        : std::runtime_error("parse error at position " + std::to_string(pos) + ": " + msg),
          position(pos),
          message(msg) {}

    std::size_t position;
    std::string message;
};

/// Parses the concrete grammar. Identifiers bound by an enclosing mu/nu are
/// variables, all others propositional atoms; shadowing and atom/variable
/// clashes are rejected. Throws ParseError.
Formula parse_formula(const std::string& text);
Sequent parse_sequent(const std::string& text);

struct CleanlinessVerdict {
    bool clean = true;
    std::string offending_variable;  // set on reject
    std::string detail;
};

/// Each variable must have a unique binder up to identifying binders after
/// recursively substituting free variables by their own binders.
CleanlinessVerdict check_clean(const Sequent& sequent);

/// Reflexive-transitive subsumption order: x <= y when x occurs free in a
/// pre-substitution binding subformula of y.
class SubsumptionOrder {
public:
    SubsumptionOrder() = default;
    SubsumptionOrder(std::set<std::string> variables,
                     std::set<std::pair<std::string, std::string>> leq);

    const std::set<std::string>& variables() const { return variables_; }
    bool leq(const std::string& x, const std::string& y) const;
    bool contains(const std::string& x) const { return variables_.count(x) > 0; }

private:
    std::set<std::string> variables_;
    std::set<std::pair<std::string, std::string>> leq_;
};

SubsumptionOrder subsumption_order(const Sequent& sequent);

/// Body with every occurrence of the bound variable replaced by the whole
/// fixpoint formula. Input must be a fixpoint formula.
Formula unfold(const Formula& fixpoint);

/// Capture-free substitution of a closed formula for a variable.
Formula substitute(const Formula& f, const std::string& var, const Formula& replacement);

struct ClosureSet {
    std::set<Formula> members;
    std::set<std::pair<Formula, Formula>> edges;  // tracestep relation

    bool contains(const Formula& f) const { return members.count(f) > 0; }
};

/// Least tracestep-closed superset: boolean/modal formulas step to direct
/// subformulas, fixpoint formulas to their unfolding.
ClosureSet closure(const Sequent& sequent);
ClosureSet closure(const Formula& formula);

Sequent diamond_sequent(const Sequent& sequent);

/// De Morgan dual: swaps p/~p, or/and, <>/[] and mu/nu. Involution.
Formula negate(const Formula& f);

struct AdisjunctivityVerdict {
    bool adisjunctive = true;
    std::optional<Formula> nu_formula;    // witness on reject
    std::optional<Formula> disjunction;   // witness on reject
};

/// Rejects when some nu-formula in Clos(Gamma) re-enters both disjuncts of a
/// disjunction in its own closure.
AdisjunctivityVerdict is_adisjunctive(const Sequent& sequent);

}  // namespace mucyclo
