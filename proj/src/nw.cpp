#include "mucyclo/nw.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace mucyclo {

namespace {

void note(NwCheckResult& r, int id, const std::string& msg) {
    r.diagnostics.push_back("node " + std::to_string(id) + ": " + msg);
}

bool sequent_equals(const AnnotatedSequent& a, const Sequent& b) { return a.bare() == b; }

void check_node(NwCheckResult& r, const Proof& proof, const ProofNode& n) {
    auto premise = [&](std::size_t k) -> const AnnotatedSequent& {
        return proof.node(n.children[k]).sequent;
    };
    for (const auto& af : n.sequent.items())
        if (!af.annotation.empty()) {
            note(r, n.id, "annotated formula in a plain cyclic proof");
            return;
        }
    switch (n.rule) {
        case Rule::Ax: {
            const Sequent bare = n.sequent.bare();
            const auto& fs = bare.formulas();
            bool ok = fs.size() == 2 && fs[0].is_literal() && fs[1].is_literal() &&
                      fs[0].name() == fs[1].name() && fs[0].negated() != fs[1].negated();
            if (!ok) note(r, n.id, "axiom must be exactly a complementary literal pair");
            break;
        }
        case Rule::Or: {
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::Or) {
                note(r, n.id, "principal of the disjunction rule is not a disjunction");
                break;
            }
            Sequent expect = n.sequent.bare()
                                 .without(p.formula)
                                 .with(p.formula.left())
                                 .with(p.formula.right());
            if (!sequent_equals(premise(0), expect))
                note(r, n.id, "premise is not the conclusion with the disjunction split");
            break;
        }
        case Rule::And: {
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::And) {
                note(r, n.id, "principal of the conjunction rule is not a conjunction");
                break;
            }
            Sequent ctx = n.sequent.bare().without(p.formula);
            if (!sequent_equals(premise(0), ctx.with(p.formula.left())))
                note(r, n.id, "left premise does not match the left conjunct");
            if (!sequent_equals(premise(1), ctx.with(p.formula.right())))
                note(r, n.id, "right premise does not match the right conjunct");
            break;
        }
        case Rule::Weak: {
            const AnnotatedFormula& p = n.principal_formula();
            if (!sequent_equals(premise(0), n.sequent.bare().without(p.formula)))
                note(r, n.id, "premise is not the conclusion minus the weakened formula");
            break;
        }
        case Rule::Box: {
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::Box) {
                note(r, n.id, "principal of the modal rule is not a box formula");
                break;
            }
            std::vector<Formula> stripped{p.formula.sub()};
            bool shape = true;
            for (const auto& af : n.sequent.items()) {
                if (af == p) continue;
                if (af.formula.kind() != FormulaKind::Dia) {
                    shape = false;
                    break;
                }
                stripped.push_back(af.formula.sub());
            }
            if (!shape) {
                note(r, n.id, "modal rule context must consist of diamond formulas only");
                break;
            }
            if (!sequent_equals(premise(0), Sequent(std::move(stripped))))
                note(r, n.id, "premise is not the conclusion with all modalities stripped");
            break;
        }
        case Rule::Mu:
        case Rule::Nu: {
            const AnnotatedFormula& p = n.principal_formula();
            FormulaKind want = n.rule == Rule::Mu ? FormulaKind::Mu : FormulaKind::Nu;
            if (p.formula.kind() != want) {
                note(r, n.id, "principal does not match the fixpoint rule");
                break;
            }
            Sequent expect = n.sequent.bare().without(p.formula).with(unfold(p.formula));
            if (!sequent_equals(premise(0), expect))
                note(r, n.id, "premise is not the conclusion with the fixpoint unfolded");
            break;
        }
        case Rule::Backedge: {
            if (!n.target) {
                note(r, n.id, "back-edge without a target");
                break;
            }
            if (!proof.has_node(*n.target) || !proof.is_strict_ancestor(*n.target, n.id)) {
                note(r, n.id, "back-edge target is not a strict ancestor");
                break;
            }
            if (!(proof.node(*n.target).sequent.bare() == n.sequent.bare()))
                note(r, n.id, "back-edge target sequent differs");
            break;
        }
        default:
            note(r, n.id, "rule " + rule_name(n.rule) + " is not part of this system");
    }
}

}  // namespace

std::string NwCheckResult::summary() const {
    if (accepted) return "accepted";
    std::ostringstream out;
    out << "rejected";
    for (const auto& d : diagnostics) out << "\n  " << d;
    return out.str();
}

NwCheckResult check_nw_local(const Proof& proof) {
    NwCheckResult r;
    if (proof.system != ProofSystem::Nw) {
        r.diagnostics.push_back("proof is not declared as a plain cyclic proof");
        return r;
    }
    r.diagnostics = validate_tree(proof);
    if (!r.diagnostics.empty()) return r;

    Sequent root = proof.node(proof.root).sequent.bare();
    ClosureSet clos = closure(root);
    for (const auto& [id, n] : proof.nodes) {
        const Sequent bare = n.sequent.bare();
        for (const auto& f : bare.formulas())
            if (!clos.contains(f))
                note(r, id, "formula outside the closure of the root sequent: " + f.str());
        try {
            check_node(r, proof, n);
        } catch (const std::exception& e) {
            note(r, id, e.what());
        }
    }
    r.accepted = r.diagnostics.empty();
    return r;
}

NwCheckResult check_nw(const Proof& proof) {
    NwCheckResult r = check_nw_local(proof);
    if (!r.accepted) return r;
    r.accepted = false;

    Sequent root = proof.node(proof.root).sequent.bare();
    auto clean = check_clean(root);
    if (!clean.clean) {
        r.diagnostics.push_back("root sequent is not clean: " + clean.detail);
        return r;
    }
    PriorityMap pm = priority_assignment(closure(root), subsumption_order(root));
    TraceGraph g = build_trace_graph(proof);
    r.trace = check_global_trace_condition(g, pm);
    switch (r.trace.verdict) {
        case TraceVerdict::Accept:
            r.accepted = true;
            break;
        case TraceVerdict::Reject:
            r.diagnostics.push_back("trace condition fails: " + r.trace.detail);
            break;
        case TraceVerdict::ResourceError:
            r.diagnostics.push_back("trace condition undecided: " + r.trace.detail);
            break;
    }
    return r;
}

std::string BranchStats::str() const {
    std::ostringstream out;
    out << "nodes " << nodes << ", back-edges " << back_edges << ", simple cycles "
        << simple_cycles << ", nontrivial sccs " << nontrivial_sccs;
    return out.str();
}

BranchStats branch_language_stats(const Proof& proof) {
    BranchStats s;
    s.nodes = proof.nodes.size();
    TraceGraph g = build_trace_graph(proof);
    for (const auto& [id, n] : proof.nodes)
        if (n.rule == Rule::Backedge) ++s.back_edges;

    std::map<int, std::vector<int>> adj;
    for (const auto& e : g.edges) adj[e.from].push_back(e.to);

    // nontrivial SCCs (a cycle passes through them) via Tarjan
    std::map<int, int> disc, low, comp;
    std::vector<int> stack;
    std::set<int> on_stack;
    int time = 0, ncomp = 0;
    std::function<void(int)> scc = [&](int v) {
        disc[v] = low[v] = time++;
        stack.push_back(v);
        on_stack.insert(v);
        for (int w : adj[v]) {
            if (!disc.count(w)) {
                scc(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.count(w)) {
                low[v] = std::min(low[v], disc[w]);
            }
        }
        if (low[v] == disc[v]) {
            std::vector<int> members;
            while (true) {
                int w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp[w] = ncomp;
                members.push_back(w);
                if (w == v) break;
            }
            ++ncomp;
            bool nontrivial = members.size() > 1;
            for (int m : members)
                for (int w : adj[m])
                    if (w == m) nontrivial = true;
            if (nontrivial) ++s.nontrivial_sccs;
        }
    };
    for (const auto& [id, _] : proof.nodes)
        if (!disc.count(id)) scc(id);

    // distinct simple cycles by DFS over simple paths
    std::set<std::vector<int>> cycles;
    std::vector<int> path{g.root};
    std::function<void(int)> dfs = [&](int v) {
        for (int w : adj[v]) {
            auto it = std::find(path.begin(), path.end(), w);
            if (it != path.end()) {
                std::vector<int> cyc(it, path.end());
                std::vector<int> best = cyc;
                for (std::size_t i = 1; i < cyc.size(); ++i) {
                    std::rotate(cyc.begin(), cyc.begin() + 1, cyc.end());
                    if (cyc < best) best = cyc;
                }
                cycles.insert(best);
            } else {
                path.push_back(w);
                dfs(w);
                path.pop_back();
            }
        }
    };
    dfs(g.root);
    s.simple_cycles = cycles.size();
    return s;
}

}  // namespace mucyclo
