#include "mucyclo/clo.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "mucyclo/traces.hpp"

namespace mucyclo {

bool annotation_leq_var(const Annotation& a, const std::string& x,
                        const SubsumptionOrder& order) {
    if (!order.contains(x)) throw std::invalid_argument("unknown variable '" + x + "'");
    for (const auto& name : a) {
        if (!order.contains(name.variable))
            throw std::invalid_argument("unknown variable '" + name.variable + "'");
        if (!order.leq(name.variable, x)) return false;
    }
    return true;
}

namespace {

struct CloChecker {
    const Proof& proof;
    const CheckOptions& opt;
    CloCheckResult& r;
    const SubsumptionOrder& order;

    void note(int id, const std::string& msg) {
        r.diagnostics.push_back("node " + std::to_string(id) + ": " + msg);
    }

    const AnnotatedSequent& premise(const ProofNode& n, std::size_t k) {
        return proof.node(n.children[k]).sequent;
    }

    bool annotation_in(const Name& name, const Annotation& a) {
        return std::find(a.begin(), a.end(), name) != a.end();
    }

    void check_node(const ProofNode& n) {
        switch (n.rule) {
            case Rule::Ax: {
                const auto& items = n.sequent.items();
                bool ok = items.size() == 2 && items[0].annotation.empty() &&
                          items[1].annotation.empty() && items[0].formula.is_literal() &&
                          items[1].formula.is_literal() &&
                          items[0].formula.name() == items[1].formula.name() &&
                          items[0].formula.negated() != items[1].formula.negated();
                if (!ok)
                    note(n.id, "axiom must be a complementary literal pair with empty annotations");
                break;
            }
            case Rule::Or: {
                const AnnotatedFormula& p = n.principal_formula();
                if (p.formula.kind() != FormulaKind::Or) {
                    note(n.id, "principal of the disjunction rule is not a disjunction");
                    break;
                }
                AnnotatedSequent expect = n.sequent.without(p)
                                              .with({p.formula.left(), p.annotation})
                                              .with({p.formula.right(), p.annotation});
                if (!(premise(n, 0) == expect))
                    note(n.id, "premise is not the conclusion with the disjunction split");
                break;
            }
            case Rule::And: {
                const AnnotatedFormula& p = n.principal_formula();
                if (p.formula.kind() != FormulaKind::And) {
                    note(n.id, "principal of the conjunction rule is not a conjunction");
                    break;
                }
                AnnotatedSequent ctx = n.sequent.without(p);
                if (!(premise(n, 0) == ctx.with({p.formula.left(), p.annotation})))
                    note(n.id, "left premise does not match the left conjunct");
                if (!(premise(n, 1) == ctx.with({p.formula.right(), p.annotation})))
                    note(n.id, "right premise does not match the right conjunct");
                break;
            }
            case Rule::Weak: {
                const AnnotatedFormula& p = n.principal_formula();
                if (!(premise(n, 0) == n.sequent.without(p)))
                    note(n.id, "premise is not the conclusion minus the weakened formula");
                break;
            }
            case Rule::Box: {
                const AnnotatedFormula& p = n.principal_formula();
                if (p.formula.kind() != FormulaKind::Box) {
                    note(n.id, "principal of the modal rule is not a box formula");
                    break;
                }
                std::vector<AnnotatedFormula> stripped{{p.formula.sub(), p.annotation}};
                bool shape = true;
                for (const auto& af : n.sequent.items()) {
                    if (af == p) continue;
                    if (af.formula.kind() != FormulaKind::Dia) {
                        shape = false;
                        break;
                    }
                    stripped.push_back({af.formula.sub(), af.annotation});
                }
                if (!shape) {
                    note(n.id, "modal rule context must consist of diamond formulas only");
                    break;
                }
                if (!(premise(n, 0) == AnnotatedSequent(std::move(stripped))))
                    note(n.id, "premise is not the conclusion with all modalities stripped");
                break;
            }
            case Rule::Mu:
            case Rule::Nu: {
                const AnnotatedFormula& p = n.principal_formula();
                FormulaKind want = n.rule == Rule::Mu ? FormulaKind::Mu : FormulaKind::Nu;
                if (p.formula.kind() != want) {
                    note(n.id, "principal does not match the fixpoint rule");
                    break;
                }
                if (opt.check_eta_annotation &&
                    !annotation_leq_var(p.annotation, p.formula.name(), order))
                    note(n.id, "fixpoint side condition fails: annotation [" +
                                   annotation_str(p.annotation) + "] is not below variable '" +
                                   p.formula.name() + "'");
                AnnotatedSequent expect =
                    n.sequent.without(p).with({unfold(p.formula), p.annotation});
                if (!(premise(n, 0) == expect))
                    note(n.id, "premise is not the conclusion with the fixpoint unfolded");
                break;
            }
            case Rule::Exp: {
                const auto& con = n.sequent.items();
                const auto& pre = premise(n, 0).items();
                if (con.size() != pre.size()) {
                    note(n.id, "annotation-shrinking rule changes the number of formulas");
                    break;
                }
                // canonical pairing: both sides sorted by (formula, annotation)
                for (std::size_t i = 0; i < con.size(); ++i) {
                    if (!(con[i].formula == pre[i].formula)) {
                        note(n.id, "annotation-shrinking rule changes the formula multiset");
                        break;
                    }
                    if (opt.check_exp_subword &&
                        !subword(pre[i].annotation, con[i].annotation))
                        note(n.id, "premise annotation [" + annotation_str(pre[i].annotation) +
                                       "] is not a subword of [" +
                                       annotation_str(con[i].annotation) + "] on " +
                                       con[i].formula.str());
                }
                break;
            }
            case Rule::Clo: {
                const AnnotatedFormula& p = n.principal_formula();
                if (p.formula.kind() != FormulaKind::Nu) {
                    note(n.id, "discharge-introducing rule needs a nu-formula principal");
                    break;
                }
                if (!n.token) {
                    note(n.id, "discharge-introducing rule without a token");
                    break;
                }
                if (n.token->variable != p.formula.name())
                    note(n.id, "token variable '" + n.token->variable +
                                   "' does not match the principal's variable '" +
                                   p.formula.name() + "'");
                if (opt.check_clo_freshness) {
                    if (!annotation_leq_var(p.annotation, p.formula.name(), order))
                        note(n.id, "side condition fails: annotation [" +
                                       annotation_str(p.annotation) +
                                       "] is not below variable '" + p.formula.name() + "'");
                    for (const auto& af : n.sequent.items())
                        if (!(af == p) && annotation_in(*n.token, af.annotation))
                            note(n.id, "token " + n.token->str() +
                                           " already appears in the context on " +
                                           af.formula.str());
                    if (annotation_in(*n.token, p.annotation))
                        note(n.id, "token " + n.token->str() +
                                       " already appears in the principal's own annotation");
                }
                Annotation extended = p.annotation;
                extended.push_back(*n.token);
                AnnotatedSequent expect =
                    n.sequent.without(p).with({unfold(p.formula), extended});
                if (!(premise(n, 0) == expect))
                    note(n.id, "premise is not the conclusion with the fixpoint unfolded "
                               "under the new name");
                break;
            }
            case Rule::Discharge: {
                if (!n.token || !n.target) {
                    note(n.id, "discharged assumption needs a token and a companion");
                    break;
                }
                if (!proof.has_node(*n.target) ||
                    !proof.is_strict_ancestor(*n.target, n.id)) {
                    note(n.id, "companion is not a strict ancestor");
                    break;
                }
                const ProofNode& comp = proof.node(*n.target);
                if (comp.rule != Rule::Clo || !comp.token || !(*comp.token == *n.token)) {
                    note(n.id, "companion does not introduce this token");
                    break;
                }
                if (opt.check_discharge_equality) {
                    const AnnotatedFormula& p = comp.principal_formula();
                    Annotation extended = p.annotation;
                    extended.push_back(*n.token);
                    AnnotatedSequent expect =
                        comp.sequent.without(p).with({p.formula, extended});
                    if (!(n.sequent == expect))
                        note(n.id, "discharge mismatch: leaf sequent {" + n.sequent.str() +
                                       "} differs from the companion's assumption {" +
                                       expect.str() + "}");
                }
                break;
            }
            case Rule::Cut: {
                if (!opt.allow_cut) {
                    note(n.id, "cut is not allowed in this check");
                    break;
                }
                bool ok = false;
                for (const auto& cand : premise(n, 0).items()) {
                    if (!cand.annotation.empty()) continue;
                    AnnotatedFormula dual{negate(cand.formula), {}};
                    if (premise(n, 0) == n.sequent.with(cand) &&
                        premise(n, 1) == n.sequent.with(dual)) {
                        ok = true;
                        break;
                    }
                }
                if (!ok)
                    note(n.id, "premises are not the conclusion extended by a complementary "
                               "formula pair with empty annotations");
                break;
            }
            case Rule::Open:
                note(n.id, "open branch: leaf is neither an axiom nor a discharged assumption");
                break;
            default:
                note(n.id, "rule " + rule_name(n.rule) + " is not part of this system");
        }
    }
};

}  // namespace

std::string CloCheckResult::summary() const {
    if (accepted) return "accepted";
    std::ostringstream out;
    out << "rejected";
    for (const auto& d : diagnostics) out << "\n  " << d;
    return out.str();
}

CloCheckResult check_clo(const Proof& proof, const CheckOptions& options) {
    CloCheckResult r;
    if (proof.system != ProofSystem::Clo) {
        r.diagnostics.push_back("proof is not declared as an annotated proof");
        return r;
    }
    r.diagnostics = validate_tree(proof);
    if (!r.diagnostics.empty()) return r;

    Sequent root = proof.node(proof.root).sequent.bare();
    auto clean = check_clean(root);
    if (!clean.clean) {
        r.diagnostics.push_back("root sequent is not clean: " + clean.detail);
        return r;
    }

    // cut formulas extend the closure the node formulas must live in
    std::vector<Formula> base = root.formulas();
    if (options.allow_cut)
        for (const auto& [id, n] : proof.nodes)
            if (n.rule == Rule::Cut)
                for (int child : n.children)
                    for (const auto& af : proof.node(child).sequent.items())
                        base.push_back(af.formula);
    ClosureSet clos = closure(Sequent(std::move(base)));
    SubsumptionOrder order = subsumption_order(root);

    CloChecker checker{proof, options, r, order};
    std::map<Name, int> token_owner;
    for (const auto& [id, n] : proof.nodes) {
        for (const auto& af : n.sequent.items())
            if (!clos.contains(af.formula))
                checker.note(id, "formula outside the closure of the root sequent: " +
                                     af.formula.str());
        if (n.rule == Rule::Clo && n.token) {
            auto [it, fresh] = token_owner.emplace(*n.token, id);
            if (!fresh)
                checker.note(id, "token " + n.token->str() + " is also introduced at node " +
                                     std::to_string(it->second));
        }
        try {
            checker.check_node(n);
        } catch (const std::exception& e) {
            checker.note(id, e.what());
        }
    }
    r.accepted = r.diagnostics.empty();
    return r;
}

Proof translate_clo_to_nw(const Proof& proof) {
    CloCheckResult check = check_clo(proof);
    if (!check.accepted)
        throw std::invalid_argument("translation requires a checked proof: " + check.summary());

    // skip annotation-shrinking nodes entirely
    std::function<int(int)> resolve = [&](int id) {
        while (proof.node(id).rule == Rule::Exp) id = proof.node(id).children[0];
        return id;
    };

    Proof out;
    out.system = ProofSystem::Nw;
    out.root = resolve(proof.root);
    for (const auto& [id, n] : proof.nodes) {
        if (n.rule == Rule::Exp) continue;
        ProofNode m;
        m.id = id;
        std::vector<AnnotatedFormula> bare;
        for (const auto& af : n.sequent.items()) bare.push_back({af.formula, {}});
        m.sequent = AnnotatedSequent(std::move(bare));
        switch (n.rule) {
            case Rule::Clo:
                m.rule = Rule::Nu;
                break;
            case Rule::Discharge:
                m.rule = Rule::Backedge;
                m.target = n.target;
                break;
            default:
                m.rule = n.rule;
        }
        if (n.principal) {
            Formula pf = n.principal_formula().formula;
            const auto& canon = m.sequent.items();
            for (std::size_t i = 0; i < canon.size(); ++i)
                if (canon[i].formula == pf) m.principal = static_cast<int>(i);
        }
        for (int c : n.children) m.children.push_back(resolve(c));
        out.nodes[m.id] = std::move(m);
    }
    return out;
}

UnfoldingTree unfolding_tree(const Proof& proof, const Sequent& target) {
    UnfoldingTree tree;
    std::function<void(int, int)> walk = [&](int id, int last) {
        const ProofNode& n = proof.node(id);
        bool unfolding = n.rule != Rule::Exp && n.sequent.bare() == target;
        if (unfolding) {
            tree.nodes.push_back(id);
            if (last < 0)
                tree.roots.push_back(id);
            else
                tree.children[last].push_back(id);
            last = id;
        }
        for (int c : n.children) walk(c, last);
    };
    walk(proof.root, -1);
    return tree;
}

UnfoldingChildKind classify_unfolding_child(int u, int v, const Proof& proof,
                                            const Sequent& target) {
    if (target.size() != 2)
        throw std::invalid_argument("classification needs a two-formula target sequent");
    SubsumptionOrder order = subsumption_order(target);
    Formula a = target.formulas()[0], b = target.formulas()[1];
    if (!a.is_fixpoint() || !b.is_fixpoint())
        throw std::invalid_argument("classification needs fixpoint target formulas");
    // the "x" formula is the subsumption-lower binder
    Formula xf = order.leq(a.name(), b.name()) ? a : b;
    Formula yf = xf == a ? b : a;

    // path from u down to v through the tree
    auto parents = proof.parents();
    std::vector<int> path{v};
    int cur = v;
    while (cur != u) {
        auto it = parents.find(cur);
        if (it == parents.end() || !it->second)
            throw std::invalid_argument("second node is not below the first");
        cur = *it->second;
        path.push_back(cur);
    }
    std::reverse(path.begin(), path.end());

    auto reaches_target = [&](const Formula& start) {
        std::set<Formula> live{start};
        for (std::size_t i = 0; i + 1 < path.size(); ++i) {
            const ProofNode& n = proof.node(path[i]);
            std::size_t k = static_cast<std::size_t>(
                std::find(n.children.begin(), n.children.end(), path[i + 1]) -
                n.children.begin());
            std::set<Formula> next;
            for (const auto& t : descendants(proof, path[i], k))
                if (live.count(t.from.formula)) next.insert(t.to.formula);
            live = std::move(next);
            if (live.empty()) break;
        }
        return live.count(xf) > 0 || live.count(yf) > 0;
    };

    if (!reaches_target(yf)) return UnfoldingChildKind::XNode;
    if (!reaches_target(xf)) return UnfoldingChildKind::YNode;
    return UnfoldingChildKind::Neither;
}

bool is_root_like(int u, const Proof& proof) {
    std::set<int> subtree;
    std::vector<int> stack{u};
    while (!stack.empty()) {
        int id = stack.back();
        stack.pop_back();
        if (!subtree.insert(id).second) continue;
        for (int c : proof.node(id).children) stack.push_back(c);
    }
    for (int id : subtree) {
        const ProofNode& n = proof.node(id);
        if (n.rule == Rule::Discharge && n.target && !subtree.count(*n.target) &&
            proof.is_strict_ancestor(*n.target, u))
            return false;
    }
    return true;
}

LemmaVerdict verify_children_lemma(const Proof& proof, const Sequent& target) {
    LemmaVerdict v;
    UnfoldingTree tree = unfolding_tree(proof, target);
    for (int u : tree.nodes) {
        auto it = tree.children.find(u);
        if (it == tree.children.end() || it->second.empty()) continue;
        if (proof.system == ProofSystem::Clo && !is_root_like(u, proof)) continue;
        const auto& kids = it->second;
        if (kids.size() < 2 || kids.size() > 3)
            v.diagnostics.push_back("unfolding node " + std::to_string(u) + " has " +
                                    std::to_string(kids.size()) + " children, expected 2 or 3");
        int x_count = 0, y_count = 0;
        for (int c : kids) {
            switch (classify_unfolding_child(u, c, proof, target)) {
                case UnfoldingChildKind::XNode: ++x_count; break;
                case UnfoldingChildKind::YNode: ++y_count; break;
                case UnfoldingChildKind::Neither: break;
            }
        }
        if (x_count != 1 || y_count != 1)
            v.diagnostics.push_back("unfolding node " + std::to_string(u) + " has " +
                                    std::to_string(x_count) + " x-children and " +
                                    std::to_string(y_count) + " y-children, expected one each");
    }
    v.accepted = v.diagnostics.empty();
    return v;
}

}  // namespace mucyclo
