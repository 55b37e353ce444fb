#include "mucyclo/search.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "mucyclo/semantics.hpp"

namespace mucyclo {

namespace {

AnnotatedSequent bare_sequent(const Sequent& s) {
    std::vector<AnnotatedFormula> items;
    for (const auto& f : s.formulas()) items.push_back({f, {}});
    return AnnotatedSequent(std::move(items));
}

int principal_index(const AnnotatedSequent& seq, const AnnotatedFormula& p) {
    const auto& items = seq.items();
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i] == p) return static_cast<int>(i);
    throw std::logic_error("principal not in sequent");
}

bool is_modal(const Formula& f) {
    return f.kind() == FormulaKind::Box || f.kind() == FormulaKind::Dia;
}

bool complementary(const Formula& a, const Formula& b) {
    return a.is_literal() && b.is_literal() && a.name() == b.name() &&
           a.negated() != b.negated();
}

bool has_axiom_pair(const Sequent& s) {
    const auto& fs = s.formulas();
    for (std::size_t i = 0; i < fs.size(); ++i)
        for (std::size_t j = i + 1; j < fs.size(); ++j)
            if (complementary(fs[i], fs[j])) return true;
    return false;
}

/// Renumber node ids to preorder so equal trees serialize identically.
void renumber_preorder(Proof& p) {
    std::map<int, int> remap;
    int counter = 0;
    std::function<void(int)> walk = [&](int id) {
        remap[id] = counter++;
        for (int c : p.node(id).children) walk(c);
    };
    walk(p.root);
    std::map<int, ProofNode> nodes;
    for (auto& [id, n] : p.nodes) {
        ProofNode m = std::move(n);
        m.id = remap.at(id);
        for (int& c : m.children) c = remap.at(c);
        if (m.target) m.target = remap.at(*m.target);
        nodes[m.id] = std::move(m);
    }
    p.nodes = std::move(nodes);
    p.root = remap.at(p.root);
}

// ---------------------------------------------------------------------------
// Cyclic-proof search and enumeration
// ---------------------------------------------------------------------------

struct NwMove {
    Rule rule = Rule::Open;
    std::optional<Formula> principal;
    std::vector<Sequent> premises;
    std::optional<int> target;
};

/// Deterministic alternatives at a bare sequent: Ax, Backedge (outermost
/// companion first), Or, And, Box, Nu, Mu, then Weak.
std::vector<NwMove> nw_moves(const Sequent& s,
                             const std::vector<std::pair<int, Sequent>>& path,
                             std::size_t max_sequent, bool liberal_weak) {
    std::vector<NwMove> out;
    const auto& fs = s.formulas();
    if (fs.size() == 2 && complementary(fs[0], fs[1]))
        out.push_back({Rule::Ax, std::nullopt, {}, std::nullopt});
    for (const auto& [id, seq] : path)
        if (seq == s) out.push_back({Rule::Backedge, std::nullopt, {}, id});
    auto push = [&](Rule r, const Formula& p, std::vector<Sequent> prem) {
        for (const auto& q : prem)
            if (q.size() > max_sequent) return;
        out.push_back({r, p, std::move(prem), std::nullopt});
    };
    for (const auto& f : fs)
        if (f.kind() == FormulaKind::Or)
            push(Rule::Or, f, {s.without(f).with(f.left()).with(f.right())});
    for (const auto& f : fs)
        if (f.kind() == FormulaKind::And)
            push(Rule::And, f, {s.without(f).with(f.left()), s.without(f).with(f.right())});
    for (const auto& f : fs) {
        if (f.kind() != FormulaKind::Box) continue;
        std::vector<Formula> stripped{f.sub()};
        bool ok = true;
        for (const auto& g : fs) {
            if (g == f) continue;
            if (g.kind() != FormulaKind::Dia) {
                ok = false;
                break;
            }
            stripped.push_back(g.sub());
        }
        if (ok) push(Rule::Box, f, {Sequent(std::move(stripped))});
    }
    for (const auto& f : fs)
        if (f.kind() == FormulaKind::Nu) push(Rule::Nu, f, {s.without(f).with(unfold(f))});
    for (const auto& f : fs)
        if (f.kind() == FormulaKind::Mu) push(Rule::Mu, f, {s.without(f).with(unfold(f))});
    if (liberal_weak) {
        if (fs.size() >= 2)
            for (const auto& f : fs) push(Rule::Weak, f, {s.without(f)});
    } else {
        std::set<Formula> weakened;
        if (has_axiom_pair(s))
            for (const auto& f : fs) {
                Sequent rest = s.without(f);
                if (has_axiom_pair(rest) && weakened.insert(f).second)
                    push(Rule::Weak, f, {rest});
            }
        bool box_present =
            std::any_of(fs.begin(), fs.end(),
                        [](const Formula& f) { return f.kind() == FormulaKind::Box; });
        if (box_present)
            for (const auto& f : fs)
                if (!is_modal(f) && weakened.insert(f).second)
                    push(Rule::Weak, f, {s.without(f)});
    }
    return out;
}

/// Backtracking enumerator over candidate cyclic proofs. `emit` is called on
/// every structurally complete candidate; enumeration continues until `halt`
/// reports the caller is satisfied or the space is exhausted.
struct NwEnumerator {
    std::size_t max_depth = 0;    // 0: unlimited (size cap governs instead)
    std::size_t max_sequent = 0;
    std::size_t size_cap = 0;     // 0: unlimited
    std::uint64_t node_budget = 0;
    bool liberal_weak = false;
    bool prune_invalid = false;

    Proof proof;
    SearchStats stats;
    std::set<Sequent> visited;
    std::vector<std::pair<int, Sequent>> path;
    std::map<Sequent, bool> validity_cache;
    int next_id = 0;
    bool budget_hit = false;
    bool cap_hit = false;
    bool depth_pruned = false;  // some branch was cut by max_depth

    std::function<bool()> halt;  // caller is satisfied, stop enumerating

    bool invalid(const Sequent& s) {
        auto it = validity_cache.find(s);
        if (it == validity_cache.end()) {
            Formula goal = s.formulas().front();
            for (std::size_t i = 1; i < s.size(); ++i)
                goal = Formula::disj(goal, s.formulas()[i]);
            CountermodelResult r = search_countermodel(goal, 3);
            it = validity_cache.emplace(s, r.status != CountermodelStatus::Found).first;
        }
        return !it->second;
    }

    /// Try every way to close the subtree at `id`; `done` runs once per
    /// structurally complete alternative.
    void close(int id, const Sequent& s, std::size_t depth,
               const std::function<void()>& done) {
        if (halt() || budget_hit) return;
        visited.insert(s);
        if (max_depth && depth > max_depth) {
            depth_pruned = true;
            return;
        }
        if (prune_invalid && !s.empty() && invalid(s)) return;
        auto moves = nw_moves(s, path, max_sequent, liberal_weak);
        for (const auto& m : moves) {
            if (++stats.expansions > node_budget) {
                budget_hit = true;
                return;
            }
            if (size_cap && proof.nodes.size() + m.premises.size() > size_cap) {
                cap_hit = true;
                continue;
            }
            ProofNode& n = proof.nodes[id];
            n.rule = m.rule;
            n.target = m.target;
            n.principal.reset();
            if (m.principal) n.principal = principal_index(n.sequent, {*m.principal, {}});
            n.children.clear();
            int saved = next_id;
            for (const auto& prem : m.premises) {
                ProofNode c;
                c.id = next_id++;
                c.sequent = bare_sequent(prem);
                n.children.push_back(c.id);
                proof.nodes[c.id] = std::move(c);
            }
            std::vector<int> kids = proof.nodes[id].children;
            path.push_back({id, s});
            close_children(kids, m.premises, 0, depth, done);
            path.pop_back();
            proof.nodes.erase(proof.nodes.lower_bound(saved), proof.nodes.end());
            next_id = saved;
            if (halt() || budget_hit) {
                proof.nodes[id].children.clear();
                return;
            }
        }
        proof.nodes[id].children.clear();
        proof.nodes[id].rule = Rule::Open;
    }

    /// Close children i.. in order; `done` runs once per complete combination.
    void close_children(const std::vector<int>& kids, const std::vector<Sequent>& prems,
                        std::size_t i, std::size_t depth,
                        const std::function<void()>& done) {
        if (halt() || budget_hit) return;
        if (i == kids.size()) {
            done();
            return;
        }
        close(kids[i], prems[i], depth + 1,
              [&, i] { close_children(kids, prems, i + 1, depth, done); });
    }
};

std::string nw_fragment(const SearchBounds& b) {
    std::ostringstream out;
    out << "cut-free cyclic derivations; weakening only toward an axiom or to clear "
           "non-modal formulas ahead of the modal rule; depth <= "
        << b.max_depth << ", sequent size <= " << b.max_sequent << ", budget "
        << b.node_budget;
    return out.str();
}

}  // namespace

std::string SearchOutcome::summary() const {
    std::ostringstream out;
    switch (status) {
        case SearchStatus::Found: out << "found"; break;
        case SearchStatus::ExhaustedWithinBounds: out << "exhausted within bounds"; break;
        case SearchStatus::BudgetExceeded: out << "budget exceeded"; break;
    }
    out << " (" << stats.expansions << " expansions, " << stats.distinct_states
        << " distinct states; fragment: " << fragment << ")";
    return out.str();
}

SearchOutcome search_nw(const Sequent& sequent, const SearchBounds& bounds) {
    auto clean = check_clean(sequent);
    if (!clean.clean)
        throw std::invalid_argument("sequent is not clean: " + clean.detail);

    // Iterative deepening keeps the first find minimal and avoids wandering
    // through deep rejected subtrees before shallow accepted ones.
    SearchOutcome out;
    out.fragment = nw_fragment(bounds);
    std::optional<Proof> found;
    std::set<Sequent> visited;
    std::uint64_t spent = 0;
    bool budget_hit = false;
    for (std::size_t d = 1; d <= bounds.max_depth; ++d) {
        NwEnumerator e;
        e.max_depth = d;
        e.max_sequent = bounds.max_sequent;
        e.node_budget = bounds.node_budget - spent;
        e.liberal_weak = false;
        e.prune_invalid = false;
        e.proof.system = ProofSystem::Nw;
        e.proof.root = 0;
        ProofNode root;
        root.id = 0;
        root.sequent = bare_sequent(sequent);
        e.proof.nodes[0] = std::move(root);
        e.next_id = 1;

        e.halt = [&] { return found.has_value(); };
        e.close(0, sequent, 0, [&] {
            Proof cand = e.proof;
            renumber_preorder(cand);
            if (check_nw(cand).accepted) found = std::move(cand);
        });

        spent += e.stats.expansions;
        visited.insert(e.visited.begin(), e.visited.end());
        budget_hit = e.budget_hit;
        if (found || budget_hit) break;
        if (!e.depth_pruned) break;  // deeper rounds would explore the same space
    }

    out.stats.expansions = spent;
    out.stats.distinct_states = visited.size();
    if (found) {
        out.status = SearchStatus::Found;
        out.proof = std::move(found);
    } else {
        out.status = budget_hit ? SearchStatus::BudgetExceeded
                                : SearchStatus::ExhaustedWithinBounds;
    }
    return out;
}

EnumerationResult enumerate_nw_proofs(const Sequent& sequent, std::size_t size_cap,
                                      std::uint64_t node_budget) {
    auto clean = check_clean(sequent);
    if (!clean.clean)
        throw std::invalid_argument("sequent is not clean: " + clean.detail);

    NwEnumerator e;
    e.max_sequent = sequent.size() + closure(sequent).members.size();  // effectively off
    e.size_cap = size_cap;
    e.node_budget = node_budget;
    e.liberal_weak = true;
    e.prune_invalid = true;
    e.proof.system = ProofSystem::Nw;
    e.proof.root = 0;
    ProofNode root;
    root.id = 0;
    root.sequent = bare_sequent(sequent);
    e.proof.nodes[0] = std::move(root);
    e.next_id = 1;

    EnumerationResult result;
    std::set<std::string> emitted;
    e.halt = [] { return false; };
    e.close(0, sequent, 0, [&] {
        Proof cand = e.proof;
        renumber_preorder(cand);
        if (!check_nw(cand).accepted) return;
        if (emitted.insert(proof_to_json_text(cand)).second)
            result.proofs.push_back(std::move(cand));
    });

    result.stats = e.stats;
    result.stats.distinct_states = e.visited.size();
    result.truncated = e.cap_hit || e.budget_hit;
    return result;
}

// ---------------------------------------------------------------------------
// Annotated-proof search
// ---------------------------------------------------------------------------

namespace {

/// Rewrite branch-local discharge tokens to preorder indices so that tokens
/// are globally unique in the emitted proof.
void renumber_tokens(Proof& p) {
    unsigned counter = 0;
    std::function<void(int, std::map<Name, Name>)> walk = [&](int id,
                                                              std::map<Name, Name> scope) {
        ProofNode& n = p.nodes.at(id);
        std::optional<Formula> principal_formula;
        if (n.principal) principal_formula = n.principal_formula().formula;
        std::vector<AnnotatedFormula> items = n.sequent.items();
        for (auto& af : items)
            for (auto& name : af.annotation) {
                auto it = scope.find(name);
                if (it != scope.end()) name = it->second;
            }
        n.sequent = AnnotatedSequent(std::move(items));
        if (n.principal) {
            const auto& canon = n.sequent.items();
            for (std::size_t i = 0; i < canon.size(); ++i)
                if (canon[i].formula == *principal_formula) {
                    n.principal = static_cast<int>(i);
                    break;
                }
        }
        if (n.rule == Rule::Clo && n.token) {
            Name fresh{n.token->variable, counter++};
            scope[*n.token] = fresh;
            n.token = fresh;
        } else if (n.rule == Rule::Discharge && n.token) {
            n.token = scope.at(*n.token);
        }
        for (int c : n.children) walk(c, scope);
    };
    walk(p.root, {});
}

struct CloSearcher {
    SearchBounds bounds;
    SubsumptionOrder order;
    Proof proof;
    SearchStats stats;
    std::set<std::string> visited;
    std::map<std::string, std::size_t> fail_memo;  // key -> largest fruitless remaining depth
    struct Companion {
        int node_id = 0;
        Name token;
        AnnotatedSequent required;
    };
    std::vector<Companion> companions;
    int next_id = 0;
    bool budget_hit = false;

    std::string state_key(const AnnotatedSequent& s) const {
        std::ostringstream k;
        k << s.str() << " |";
        for (const auto& c : companions)
            k << " " << c.token.str() << ":{" << c.required.str() << "}";
        return k.str();
    }

    bool tick() {
        if (++stats.expansions > bounds.node_budget) budget_hit = true;
        return !budget_hit;
    }

    bool leaf(int id, Rule rule, std::optional<int> target, std::optional<Name> token) {
        ProofNode& n = proof.nodes.at(id);
        n.rule = rule;
        n.target = target;
        n.token = std::move(token);
        n.principal.reset();
        n.children.clear();
        return true;
    }

    bool expand(int id, Rule rule, const std::optional<AnnotatedFormula>& principal,
                const std::vector<AnnotatedSequent>& premises, std::size_t depth,
                std::optional<Name> token = std::nullopt) {
        if (depth + 1 > bounds.max_depth) return false;
        for (const auto& q : premises)
            if (q.size() > bounds.max_sequent) return false;
        if (!tick()) return false;
        ProofNode& n = proof.nodes.at(id);
        n.rule = rule;
        n.token = std::move(token);
        n.target.reset();
        n.principal.reset();
        if (principal) n.principal = principal_index(n.sequent, *principal);
        n.children.clear();
        int saved = next_id;
        for (const auto& prem : premises) {
            ProofNode c;
            c.id = next_id++;
            c.sequent = prem;
            n.children.push_back(c.id);
            proof.nodes[c.id] = std::move(c);
        }
        std::vector<int> kids = proof.nodes.at(id).children;
        bool ok = true;
        for (std::size_t i = 0; i < kids.size(); ++i)
            if (!prove(kids[i], premises[i], depth + 1)) {
                ok = false;
                break;
            }
        if (!ok) {
            proof.nodes.erase(proof.nodes.lower_bound(saved), proof.nodes.end());
            proof.nodes.at(id).children.clear();
            next_id = saved;
        }
        return ok;
    }

    bool prove(int id, const AnnotatedSequent& s, std::size_t depth) {
        if (budget_hit) return false;
        std::size_t remaining = bounds.max_depth - depth;
        std::string key = state_key(s);
        visited.insert(key);
        auto memo = fail_memo.find(key);
        if (memo != fail_memo.end() && memo->second >= remaining) return false;
        bool ok = try_moves(id, s, depth);
        if (!ok && !budget_hit) {
            auto [it, fresh] = fail_memo.emplace(std::move(key), remaining);
            if (!fresh) it->second = std::max(it->second, remaining);
        }
        return ok;
    }

    bool try_moves(int id, const AnnotatedSequent& s, std::size_t depth) {
        const auto& items = s.items();

        if (items.size() == 2 && items[0].annotation.empty() && items[1].annotation.empty() &&
            complementary(items[0].formula, items[1].formula))
            return tick() && leaf(id, Rule::Ax, std::nullopt, std::nullopt);

        // discharge against the innermost matching companion
        for (auto it = companions.rbegin(); it != companions.rend(); ++it)
            if (it->required == s)
                return tick() && leaf(id, Rule::Discharge, it->node_id, it->token);

        // the unique annotation-shrinking step that realizes a pending discharge
        for (auto it = companions.rbegin(); it != companions.rend(); ++it) {
            const auto& req = it->required.items();
            if (req.size() != items.size() || it->required == s) continue;
            bool fits = true;
            for (std::size_t i = 0; i < req.size(); ++i)
                if (!(req[i].formula == items[i].formula) ||
                    !subword(req[i].annotation, items[i].annotation)) {
                    fits = false;
                    break;
                }
            if (!fits) continue;
            if (depth + 1 > bounds.max_depth) continue;
            if (!tick()) return false;
            ProofNode& n = proof.nodes.at(id);
            n.rule = Rule::Exp;
            n.target.reset();
            n.token.reset();
            n.principal.reset();
            n.children.clear();
            ProofNode c;
            c.id = next_id++;
            c.sequent = it->required;
            c.rule = Rule::Discharge;
            c.target = it->node_id;
            c.token = it->token;
            n.children.push_back(c.id);
            proof.nodes[c.id] = std::move(c);
            return true;
        }

        for (const auto& f : items)
            if (f.formula.kind() == FormulaKind::Or &&
                expand(id, Rule::Or, f,
                       {s.without(f)
                            .with({f.formula.left(), f.annotation})
                            .with({f.formula.right(), f.annotation})},
                       depth))
                return true;
        for (const auto& f : items)
            if (f.formula.kind() == FormulaKind::And &&
                expand(id, Rule::And, f,
                       {s.without(f).with({f.formula.left(), f.annotation}),
                        s.without(f).with({f.formula.right(), f.annotation})},
                       depth))
                return true;
        for (const auto& f : items) {
            if (f.formula.kind() != FormulaKind::Box) continue;
            std::vector<AnnotatedFormula> stripped{{f.formula.sub(), f.annotation}};
            bool ok = true;
            for (const auto& g : items) {
                if (g == f) continue;
                if (g.formula.kind() != FormulaKind::Dia) {
                    ok = false;
                    break;
                }
                stripped.push_back({g.formula.sub(), g.annotation});
            }
            if (ok &&
                expand(id, Rule::Box, f, {AnnotatedSequent(std::move(stripped))}, depth))
                return true;
        }

        // discharge-introducing rule ahead of the plain unfolding, so that
        // trivial cycles close immediately
        if (companions.size() < bounds.max_clo)
            for (const auto& f : items) {
                if (f.formula.kind() != FormulaKind::Nu ||
                    !annotation_leq_var(f.annotation, f.formula.name(), order))
                    continue;
                Name token{f.formula.name(), static_cast<unsigned>(companions.size())};
                Annotation extended = f.annotation;
                extended.push_back(token);
                AnnotatedSequent premise =
                    s.without(f).with({unfold(f.formula), extended});
                AnnotatedSequent required = s.without(f).with({f.formula, extended});
                companions.push_back({id, token, std::move(required)});
                bool ok = expand(id, Rule::Clo, f, {std::move(premise)}, depth, token);
                companions.pop_back();
                if (ok) return true;
            }
        for (const auto& f : items)
            if (f.formula.kind() == FormulaKind::Nu &&
                annotation_leq_var(f.annotation, f.formula.name(), order) &&
                expand(id, Rule::Nu, f,
                       {s.without(f).with({unfold(f.formula), f.annotation})}, depth))
                return true;
        for (const auto& f : items)
            if (f.formula.kind() == FormulaKind::Mu &&
                annotation_leq_var(f.annotation, f.formula.name(), order) &&
                expand(id, Rule::Mu, f,
                       {s.without(f).with({unfold(f.formula), f.annotation})}, depth))
                return true;

        // weakening: toward an axiom, or ahead of the modal rule
        std::set<AnnotatedFormula> weakened;
        auto bare_axiom_pair = [](const AnnotatedSequent& q) {
            const auto& qs = q.items();
            for (std::size_t i = 0; i < qs.size(); ++i)
                for (std::size_t j = i + 1; j < qs.size(); ++j)
                    if (qs[i].annotation.empty() && qs[j].annotation.empty() &&
                        complementary(qs[i].formula, qs[j].formula))
                        return true;
            return false;
        };
        if (bare_axiom_pair(s))
            for (const auto& f : items) {
                AnnotatedSequent rest = s.without(f);
                if (bare_axiom_pair(rest) && weakened.insert(f).second &&
                    expand(id, Rule::Weak, f, {std::move(rest)}, depth))
                    return true;
            }
        bool box_present = std::any_of(items.begin(), items.end(), [](const auto& f) {
            return f.formula.kind() == FormulaKind::Box;
        });
        if (box_present)
            for (const auto& f : items)
                if (!is_modal(f.formula) && weakened.insert(f).second &&
                    expand(id, Rule::Weak, f, {s.without(f)}, depth))
                    return true;

        return false;
    }
};

std::string clo_fragment(const SearchBounds& b) {
    std::ostringstream out;
    out << "cut-free annotated derivations; annotation-shrinking steps only to realize a "
           "pending discharge; weakening only toward an axiom or to clear non-modal "
           "formulas ahead of the modal rule; at most "
        << b.max_clo << " discharge-introducing nodes per branch; depth <= " << b.max_depth
        << ", sequent size <= " << b.max_sequent << ", budget " << b.node_budget;
    return out.str();
}

}  // namespace

SearchOutcome search_clo(const Sequent& sequent, const SearchBounds& bounds) {
    auto clean = check_clean(sequent);
    if (!clean.clean)
        throw std::invalid_argument("sequent is not clean: " + clean.detail);

    CloSearcher s;
    s.bounds = bounds;
    s.order = subsumption_order(sequent);
    s.proof.system = ProofSystem::Clo;
    s.proof.root = 0;
    ProofNode root;
    root.id = 0;
    root.sequent = bare_sequent(sequent);
    s.proof.nodes[0] = std::move(root);
    s.next_id = 1;

    bool ok = s.prove(0, s.proof.node(0).sequent, 0);

    SearchOutcome out;
    out.stats = s.stats;
    out.stats.distinct_states = s.visited.size();
    out.fragment = clo_fragment(bounds);
    if (ok) {
        renumber_preorder(s.proof);
        renumber_tokens(s.proof);
        CloCheckResult check = check_clo(s.proof);
        if (!check.accepted)
            throw std::logic_error("search produced a rejected derivation: " +
                                   check.summary());
        out.status = SearchStatus::Found;
        out.proof = std::move(s.proof);
    } else {
        out.status = s.budget_hit ? SearchStatus::BudgetExceeded
                                  : SearchStatus::ExhaustedWithinBounds;
    }
    return out;
}

}  // namespace mucyclo
