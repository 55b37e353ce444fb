#include "mucyclo/formula.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace mucyclo {

struct Formula::Node {
    FormulaKind kind;
    std::string name;  // Lit atom, Var name, Mu/Nu bound variable
    bool negated = false;
    std::vector<Formula> children;
    std::string printed;
};

namespace {

bool is_binary(FormulaKind k) { return k == FormulaKind::Or || k == FormulaKind::And; }

// Canonical printing. Binders are parenthesized unless they are the whole
// formula or the whole body of an enclosing binder; nested binary operators
// keep explicit parentheses so the output is unambiguous.
std::string print_node(const Formula& f, bool is_top);

std::string print_operand(const Formula& f, bool parenthesize_binary) {
    if (f.is_fixpoint()) return "(" + print_node(f, true) + ")";
    if (parenthesize_binary && is_binary(f.kind())) return "(" + print_node(f, false) + ")";
    return print_node(f, false);
}

std::string print_node(const Formula& f, bool is_top) {
    switch (f.kind()) {
        case FormulaKind::Lit:
            return f.negated() ? "~" + f.name() : f.name();
        case FormulaKind::Var:
            return f.name();
        case FormulaKind::Or: {
            std::string l = f.left().kind() == FormulaKind::Or
                                ? "(" + print_node(f.left(), false) + ")"
                                : print_operand(f.left(), false);
            std::string r = f.right().kind() == FormulaKind::Or
                                ? "(" + print_node(f.right(), false) + ")"
                                : print_operand(f.right(), false);
            return l + " | " + r;
        }
        case FormulaKind::And:
            return print_operand(f.left(), true) + " & " + print_operand(f.right(), true);
        case FormulaKind::Dia:
            return "<>" + print_operand(f.sub(), true);
        case FormulaKind::Box:
            return "[]" + print_operand(f.sub(), true);
        case FormulaKind::Mu:
        case FormulaKind::Nu: {
            std::string s = (f.kind() == FormulaKind::Mu ? "mu " : "nu ") + f.name() + ". " +
                            print_node(f.body(), true);
            return is_top ? s : "(" + s + ")";
        }
    }
    return "?";
}

}  // namespace

Formula Formula::make_node(FormulaKind kind, std::string name, bool negated,
                           std::vector<Formula> children) {
    auto node = std::make_shared<Node>();
    node->kind = kind;
    node->name = std::move(name);
    node->negated = negated;
    node->children = std::move(children);
    Formula f(node);
    node->printed = print_node(f, true);
    return f;
}

Formula Formula::lit(std::string name, bool negated) {
    return make_node(FormulaKind::Lit, std::move(name), negated, {});
}
Formula Formula::var(std::string name) {
    return make_node(FormulaKind::Var, std::move(name), false, {});
}
Formula Formula::disj(Formula l, Formula r) {
    return make_node(FormulaKind::Or, "", false, {std::move(l), std::move(r)});
}
Formula Formula::conj(Formula l, Formula r) {
    return make_node(FormulaKind::And, "", false, {std::move(l), std::move(r)});
}
Formula Formula::dia(Formula sub) {
    return make_node(FormulaKind::Dia, "", false, {std::move(sub)});
}
Formula Formula::box(Formula sub) {
    return make_node(FormulaKind::Box, "", false, {std::move(sub)});
}
Formula Formula::mu(std::string var, Formula body) {
    return make_node(FormulaKind::Mu, std::move(var), false, {std::move(body)});
}
Formula Formula::nu(std::string var, Formula body) {
    return make_node(FormulaKind::Nu, std::move(var), false, {std::move(body)});
}

FormulaKind Formula::kind() const { return node_->kind; }
const std::string& Formula::name() const { return node_->name; }
bool Formula::negated() const { return node_->negated; }
const Formula& Formula::left() const { return node_->children[0]; }
const Formula& Formula::right() const { return node_->children[1]; }
const Formula& Formula::sub() const { return node_->children[0]; }
const Formula& Formula::body() const { return node_->children[0]; }
const std::string& Formula::str() const { return node_->printed; }

std::set<std::string> Formula::free_vars() const {
    std::set<std::string> out;
    std::function<void(const Formula&, std::set<std::string>&)> walk =
        [&](const Formula& f, std::set<std::string>& bound) {
            switch (f.kind()) {
                case FormulaKind::Lit:
                    break;
                case FormulaKind::Var:
                    if (!bound.count(f.name())) out.insert(f.name());
                    break;
                case FormulaKind::Or:
                case FormulaKind::And:
                    walk(f.left(), bound);
                    walk(f.right(), bound);
                    break;
                case FormulaKind::Dia:
                case FormulaKind::Box:
                    walk(f.sub(), bound);
                    break;
                case FormulaKind::Mu:
                case FormulaKind::Nu: {
                    bool fresh = bound.insert(f.name()).second;
                    walk(f.body(), bound);
                    if (fresh) bound.erase(f.name());
                    break;
                }
            }
        };
    std::set<std::string> bound;
    walk(*this, bound);
    return out;
}

// ---------------------------------------------------------------------------
// Sequent

Sequent::Sequent(std::vector<Formula> formulas) {
    std::sort(formulas.begin(), formulas.end());
    formulas.erase(std::unique(formulas.begin(), formulas.end()), formulas.end());
    formulas_ = std::move(formulas);
}

bool Sequent::contains(const Formula& f) const {
    return std::binary_search(formulas_.begin(), formulas_.end(), f);
}

Sequent Sequent::with(const Formula& f) const {
    auto v = formulas_;
    v.push_back(f);
    return Sequent(std::move(v));
}

Sequent Sequent::without(const Formula& f) const {
    std::vector<Formula> v;
    for (const auto& g : formulas_)
        if (!(g == f)) v.push_back(g);
    return Sequent(std::move(v));
}

std::string Sequent::str() const {
    std::string out;
    for (std::size_t i = 0; i < formulas_.size(); ++i) {
        if (i) out += ", ";
        out += formulas_[i].str();
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : text_(text) {}

    Formula parse_complete() {
        Formula f = parse_or();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return f;
    }

    std::vector<Formula> parse_sequent_items() {
        std::vector<Formula> items;
        items.push_back(parse_or());
        skip_ws();
        while (pos_ < text_.size() && text_[pos_] == ',') {
            ++pos_;
            items.push_back(parse_or());
            skip_ws();
        }
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return items;
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw ParseError{pos_, msg}; }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    // Keyword followed by a non-identifier character.
    bool eat_keyword(const std::string& kw) {
        skip_ws();
        if (text_.compare(pos_, kw.size(), kw) != 0) return false;
        std::size_t after = pos_ + kw.size();
        if (after < text_.size()) {
            char c = text_[after];
            if (std::islower(static_cast<unsigned char>(c)) ||
                std::isdigit(static_cast<unsigned char>(c)) || c == '_')
                return false;
        }
        pos_ = after;
        return true;
    }

    bool eat(const std::string& tok) {
        skip_ws();
        if (text_.compare(pos_, tok.size(), tok) == 0) {
            pos_ += tok.size();
            return true;
        }
        return false;
    }

    std::optional<std::string> ident() {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::islower(static_cast<unsigned char>(text_[pos_])))
            return std::nullopt;
        std::size_t end = pos_ + 1;
        while (end < text_.size() &&
               (std::islower(static_cast<unsigned char>(text_[end])) ||
                std::isdigit(static_cast<unsigned char>(text_[end])) || text_[end] == '_'))
            ++end;
        std::string name = text_.substr(start, end - start);
        if (name == "mu" || name == "nu") return std::nullopt;
        pos_ = end;
        return name;
    }

    bool in_scope(const std::string& name) const {
        return std::find(scope_.begin(), scope_.end(), name) != scope_.end();
    }

    Formula parse_or() {
        Formula l = parse_and();
        if (eat("|")) return Formula::disj(std::move(l), parse_or());
        return l;
    }

    Formula parse_and() {
        Formula l = parse_unary();
        if (eat("&")) return Formula::conj(std::move(l), parse_and());
        return l;
    }

    Formula parse_binder(bool is_mu) {
        auto name = ident();
        if (!name) fail("expected variable after binder");
        if (props_.count(*name)) fail("'" + *name + "' already used as a proposition");
        if (!eat(".")) fail("expected '.' after bound variable");
        scope_.push_back(*name);
        bound_anywhere_.insert(*name);
        Formula body = parse_or();
        scope_.pop_back();
        return is_mu ? Formula::mu(*name, std::move(body)) : Formula::nu(*name, std::move(body));
    }

    Formula parse_unary() {
        if (eat("<>")) return Formula::dia(parse_unary());
        if (eat("[]")) return Formula::box(parse_unary());
        if (eat("~")) {
            auto name = ident();
            if (!name) fail("expected atom after '~'");
            if (in_scope(*name) || bound_anywhere_.count(*name))
                fail("negation applied to bound variable '" + *name + "'");
            props_.insert(*name);
            return Formula::lit(*name, true);
        }
        if (eat_keyword("mu")) return parse_binder(true);
        if (eat_keyword("nu")) return parse_binder(false);
        if (eat("(")) {
            Formula f = parse_or();
            if (!eat(")")) fail("expected ')'");
            return f;
        }
        if (auto name = ident()) {
            if (in_scope(*name)) return Formula::var(*name);
            if (bound_anywhere_.count(*name))
                fail("variable '" + *name + "' used outside its binder");
            props_.insert(*name);
            return Formula::lit(*name, false);
        }
        fail("expected formula");
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    std::vector<std::string> scope_;
    std::set<std::string> props_;
    std::set<std::string> bound_anywhere_;
};

}  // namespace

Formula parse_formula(const std::string& text) { return Parser(text).parse_complete(); }

Sequent parse_sequent(const std::string& text) {
    return Sequent(Parser(text).parse_sequent_items());
}

// ---------------------------------------------------------------------------
// Substitution / unfolding

Formula substitute(const Formula& f, const std::string& var, const Formula& replacement) {
    switch (f.kind()) {
        case FormulaKind::Lit:
            return f;
        case FormulaKind::Var:
            return f.name() == var ? replacement : f;
        case FormulaKind::Or:
            return Formula::disj(substitute(f.left(), var, replacement),
                                 substitute(f.right(), var, replacement));
        case FormulaKind::And:
            return Formula::conj(substitute(f.left(), var, replacement),
                                 substitute(f.right(), var, replacement));
        case FormulaKind::Dia:
            return Formula::dia(substitute(f.sub(), var, replacement));
        case FormulaKind::Box:
            return Formula::box(substitute(f.sub(), var, replacement));
        case FormulaKind::Mu:
            if (f.name() == var) return f;
            return Formula::mu(f.name(), substitute(f.body(), var, replacement));
        case FormulaKind::Nu:
            if (f.name() == var) return f;
            return Formula::nu(f.name(), substitute(f.body(), var, replacement));
    }
    return f;
}

Formula unfold(const Formula& fixpoint) {
    if (!fixpoint.is_fixpoint())
        throw std::invalid_argument("unfold: not a fixpoint formula: " + fixpoint.str());
    return substitute(fixpoint.body(), fixpoint.name(), fixpoint);
}

// ---------------------------------------------------------------------------
// Cleanliness and subsumption

namespace {

void collect_binders(const Formula& f, std::map<std::string, std::set<Formula>>& out) {
    switch (f.kind()) {
        case FormulaKind::Lit:
        case FormulaKind::Var:
            break;
        case FormulaKind::Or:
        case FormulaKind::And:
            collect_binders(f.left(), out);
            collect_binders(f.right(), out);
            break;
        case FormulaKind::Dia:
        case FormulaKind::Box:
            collect_binders(f.sub(), out);
            break;
        case FormulaKind::Mu:
        case FormulaKind::Nu:
            out[f.name()].insert(f);
            collect_binders(f.body(), out);
            break;
    }
}

}  // namespace

CleanlinessVerdict check_clean(const Sequent& sequent) {
    std::map<std::string, std::set<Formula>> binders;
    for (const auto& f : sequent.formulas()) {
        if (!f.closed())
            return {false, "", "formula not closed: " + f.str()};
        collect_binders(f, binders);
    }

    // closed_of(v): representative binder with free variables recursively
    // replaced by their (closed) binders. Cycle => unclean.
    std::map<std::string, Formula> closed;
    std::set<std::string> in_progress;
    std::function<std::optional<Formula>(const std::string&)> closed_of =
        [&](const std::string& v) -> std::optional<Formula> {
        auto it = closed.find(v);
        if (it != closed.end()) return it->second;
        if (in_progress.count(v)) return std::nullopt;
        in_progress.insert(v);
        Formula result = *binders.at(v).begin();
        for (const auto& z : result.free_vars()) {
            if (!binders.count(z)) return std::nullopt;
            auto zb = closed_of(z);
            if (!zb) return std::nullopt;
            result = substitute(result, z, *zb);
        }
        in_progress.erase(v);
        closed.emplace(v, result);
        return result;
    };

    for (const auto& [v, forms] : binders) {
        auto rep = closed_of(v);
        if (!rep)
            return {false, v, "cyclic or unresolvable binder for '" + v + "'"};
        for (const auto& b : forms) {
            Formula c = b;
            for (const auto& z : c.free_vars()) {
                auto zb = closed_of(z);
                if (!zb) return {false, v, "unresolvable free variable '" + z + "'"};
                c = substitute(c, z, *zb);
            }
            if (!(c == *rep))
                return {false, v,
                        "incompatible binders for '" + v + "': " + c.str() + " vs " + rep->str()};
        }
    }
    return {};
}

SubsumptionOrder::SubsumptionOrder(std::set<std::string> variables,
                                   std::set<std::pair<std::string, std::string>> leq)
    : variables_(std::move(variables)), leq_(std::move(leq)) {}

bool SubsumptionOrder::leq(const std::string& x, const std::string& y) const {
    if (x == y) return variables_.count(x) > 0;
    return leq_.count({x, y}) > 0;
}

SubsumptionOrder subsumption_order(const Sequent& sequent) {
    auto verdict = check_clean(sequent);
    if (!verdict.clean)
        throw std::invalid_argument("subsumption_order: unclean sequent (" + verdict.detail + ")");

    std::map<std::string, std::set<Formula>> binders;
    for (const auto& f : sequent.formulas()) collect_binders(f, binders);

    std::set<std::string> vars;
    for (const auto& [v, _] : binders) vars.insert(v);

    std::set<std::pair<std::string, std::string>> leq;
    for (const auto& v : vars) leq.insert({v, v});
    for (const auto& [y, forms] : binders)
        for (const auto& b : forms)
            for (const auto& x : b.free_vars()) leq.insert({x, y});
    // transitive closure
    bool changed = true;
    while (changed) {
        changed = false;
        for (const auto& [x, y] : std::set<std::pair<std::string, std::string>>(leq))
            for (const auto& z : vars)
                if (leq.count({y, z}) && leq.insert({x, z}).second) changed = true;
    }
    return SubsumptionOrder(std::move(vars), std::move(leq));
}

// ---------------------------------------------------------------------------
// Closure

namespace {

std::vector<Formula> tracestep_targets(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Or:
        case FormulaKind::And:
            return {f.left(), f.right()};
        case FormulaKind::Dia:
        case FormulaKind::Box:
            return {f.sub()};
        case FormulaKind::Mu:
        case FormulaKind::Nu:
            return {unfold(f)};
        default:
            return {};
    }
}

}  // namespace

ClosureSet closure(const Sequent& sequent) {
    ClosureSet out;
    std::vector<Formula> worklist(sequent.formulas().begin(), sequent.formulas().end());
    for (const auto& f : worklist) out.members.insert(f);
    while (!worklist.empty()) {
        Formula f = worklist.back();
        worklist.pop_back();
        for (const auto& g : tracestep_targets(f)) {
            out.edges.insert({f, g});
            if (out.members.insert(g).second) worklist.push_back(g);
        }
    }
    return out;
}

ClosureSet closure(const Formula& formula) { return closure(Sequent({formula})); }

Sequent diamond_sequent(const Sequent& sequent) {
    std::vector<Formula> out;
    for (const auto& f : sequent.formulas()) out.push_back(Formula::dia(f));
    return Sequent(std::move(out));
}

// ---------------------------------------------------------------------------
// Negation and adisjunctivity

Formula negate(const Formula& f) {
    switch (f.kind()) {
        case FormulaKind::Lit:
            return Formula::lit(f.name(), !f.negated());
        case FormulaKind::Var:
            return f;
        case FormulaKind::Or:
            return Formula::conj(negate(f.left()), negate(f.right()));
        case FormulaKind::And:
            return Formula::disj(negate(f.left()), negate(f.right()));
        case FormulaKind::Dia:
            return Formula::box(negate(f.sub()));
        case FormulaKind::Box:
            return Formula::dia(negate(f.sub()));
        case FormulaKind::Mu:
            return Formula::nu(f.name(), negate(f.body()));
        case FormulaKind::Nu:
            return Formula::mu(f.name(), negate(f.body()));
    }
    return f;
}

AdisjunctivityVerdict is_adisjunctive(const Sequent& sequent) {
    auto verdict = check_clean(sequent);
    if (!verdict.clean)
        throw std::invalid_argument("is_adisjunctive: unclean sequent (" + verdict.detail + ")");
    ClosureSet clos = closure(sequent);
    std::map<Formula, ClosureSet> sub_closures;
    auto clos_of = [&](const Formula& f) -> const ClosureSet& {
        auto it = sub_closures.find(f);
        if (it == sub_closures.end()) it = sub_closures.emplace(f, closure(f)).first;
        return it->second;
    };
    for (const auto& nu_f : clos.members) {
        if (nu_f.kind() != FormulaKind::Nu) continue;
        for (const auto& d : clos_of(nu_f).members) {
            if (d.kind() != FormulaKind::Or) continue;
            if (clos_of(d.left()).contains(nu_f) && clos_of(d.right()).contains(nu_f))
                return {false, nu_f, d};
        }
    }
    return {};
}

}  // namespace mucyclo
