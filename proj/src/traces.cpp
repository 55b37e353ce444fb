#include "mucyclo/traces.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace mucyclo {

namespace {

[[noreturn]] void invalid(int node_id, const std::string& msg) {
    throw std::invalid_argument("node " + std::to_string(node_id) + ": " + msg);
}

}  // namespace

std::vector<TraceTriple> descendants(const Proof& proof, int node_id, std::size_t child_index) {
    const ProofNode& n = proof.node(node_id);
    std::vector<TraceTriple> out;
    auto identity_sides = [&](const AnnotatedFormula& skip) {
        for (const auto& af : n.sequent.items())
            if (!(af == skip)) out.push_back({af, af, std::nullopt});
    };

    switch (n.rule) {
        case Rule::Ax:
        case Rule::Open:
            invalid(node_id, "leaf rule has no premises");
        case Rule::Or: {
            if (child_index != 0) invalid(node_id, "Or has one premise");
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::Or) invalid(node_id, "Or principal not a disjunction");
            identity_sides(p);
            out.push_back({p, {p.formula.left(), p.annotation}, std::nullopt});
            out.push_back({p, {p.formula.right(), p.annotation}, std::nullopt});
            break;
        }
        case Rule::And: {
            if (child_index > 1) invalid(node_id, "And has two premises");
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::And)
                invalid(node_id, "And principal not a conjunction");
            identity_sides(p);
            Formula part = child_index == 0 ? p.formula.left() : p.formula.right();
            out.push_back({p, {part, p.annotation}, std::nullopt});
            break;
        }
        case Rule::Weak: {
            if (child_index != 0) invalid(node_id, "Weak has one premise");
            const AnnotatedFormula& p = n.principal_formula();
            identity_sides(p);  // weakened formula has no descendant
            break;
        }
        case Rule::Box: {
            if (child_index != 0) invalid(node_id, "Box has one premise");
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::Box) invalid(node_id, "Box principal not a box");
            out.push_back({p, {p.formula.sub(), p.annotation}, std::nullopt});
            for (const auto& af : n.sequent.items()) {
                if (af == p) continue;
                if (af.formula.kind() != FormulaKind::Dia)
                    invalid(node_id, "Box side formula not a diamond: " + af.formula.str());
                out.push_back({af, {af.formula.sub(), af.annotation}, std::nullopt});
            }
            break;
        }
        case Rule::Mu:
        case Rule::Nu: {
            if (child_index != 0) invalid(node_id, "fixpoint rule has one premise");
            const AnnotatedFormula& p = n.principal_formula();
            if (!p.formula.is_fixpoint()) invalid(node_id, "principal not a fixpoint formula");
            identity_sides(p);
            out.push_back({p, {unfold(p.formula), p.annotation}, p.formula.name()});
            break;
        }
        case Rule::Clo: {
            if (child_index != 0) invalid(node_id, "Clo has one premise");
            const AnnotatedFormula& p = n.principal_formula();
            if (p.formula.kind() != FormulaKind::Nu) invalid(node_id, "Clo principal not a nu formula");
            if (!n.token) invalid(node_id, "Clo node without token");
            identity_sides(p);
            Annotation extended = p.annotation;
            extended.push_back(*n.token);
            out.push_back({p, {unfold(p.formula), extended}, p.formula.name()});
            break;
        }
        case Rule::Exp: {
            if (child_index != 0) invalid(node_id, "Exp has one premise");
            if (n.children.empty()) invalid(node_id, "Exp without premise");
            const ProofNode& child = proof.node(n.children[0]);
            // canonical pairing: both sequents are sorted by (formula,
            // annotation); the i-th occurrence of a bare formula pairs with
            // the i-th occurrence on the other side
            const auto& con = n.sequent.items();
            const auto& pre = child.sequent.items();
            if (con.size() != pre.size()) invalid(node_id, "Exp changes the sequent size");
            for (std::size_t i = 0; i < con.size(); ++i) {
                if (!(con[i].formula == pre[i].formula))
                    invalid(node_id, "Exp changes the bare formula multiset");
                out.push_back({con[i], pre[i], std::nullopt});
            }
            break;
        }
        case Rule::Cut: {
            if (child_index > 1) invalid(node_id, "Cut has two premises");
            for (const auto& af : n.sequent.items()) out.push_back({af, af, std::nullopt});
            break;
        }
        case Rule::Backedge: {
            if (child_index != 0 || !n.target) invalid(node_id, "Backedge without target");
            for (const auto& af : n.sequent.items()) out.push_back({af, af, std::nullopt});
            break;
        }
        case Rule::Discharge: {
            if (child_index != 0 || !n.target) invalid(node_id, "Discharge without companion");
            const ProofNode& comp = proof.node(*n.target);
            for (const auto& af : n.sequent.items())
                for (const auto& cf : comp.sequent.items())
                    if (af.formula == cf.formula) out.push_back({af, cf, std::nullopt});
            break;
        }
    }
    return out;
}

TraceGraph build_trace_graph(const Proof& proof) {
    TraceGraph g;
    g.root = proof.root;
    for (const auto& [id, n] : proof.nodes) {
        std::vector<Formula> fs;
        for (const auto& af : n.sequent.items()) fs.push_back(af.formula);
        std::sort(fs.begin(), fs.end());
        fs.erase(std::unique(fs.begin(), fs.end()), fs.end());
        g.node_formulas[id] = std::move(fs);
    }
    for (const auto& [id, n] : proof.nodes) {
        if (n.rule == Rule::Cut)
            throw std::invalid_argument("trace graph: Cut nodes are not supported");
        std::vector<std::pair<std::size_t, int>> premises;
        if (n.rule == Rule::Backedge || n.rule == Rule::Discharge) {
            premises.push_back({0, *n.target});
        } else {
            for (std::size_t k = 0; k < n.children.size(); ++k)
                premises.push_back({k, n.children[k]});
        }
        for (auto [k, to] : premises) {
            TraceGraphEdge e;
            e.from = id;
            e.to = to;
            std::set<std::tuple<Formula, Formula, std::optional<std::string>>> steps;
            for (const auto& t : descendants(proof, id, k))
                steps.insert({t.from.formula, t.to.formula, t.unfolded_variable});
            e.steps.assign(steps.begin(), steps.end());
            g.edges.push_back(std::move(e));
        }
    }
    return g;
}

unsigned PriorityMap::at(const std::string& var) const {
    auto it = priority.find(var);
    if (it == priority.end())
        throw std::invalid_argument("no priority for variable '" + var + "'");
    return it->second;
}

PriorityMap priority_assignment(const ClosureSet& clos, const SubsumptionOrder& order) {
    // binder variables occurring in the closure, with their fixpoint kind
    std::map<std::string, bool> is_nu;  // var -> nu?
    std::function<void(const Formula&)> walk = [&](const Formula& f) {
        switch (f.kind()) {
            case FormulaKind::Or:
            case FormulaKind::And:
                walk(f.left());
                walk(f.right());
                break;
            case FormulaKind::Dia:
            case FormulaKind::Box:
                walk(f.sub());
                break;
            case FormulaKind::Mu:
            case FormulaKind::Nu:
                is_nu[f.name()] = f.kind() == FormulaKind::Nu;
                walk(f.body());
                break;
            default:
                break;
        }
    };
    for (const auto& f : clos.members) walk(f);

    PriorityMap pm;
    std::set<std::string> pending;
    for (const auto& [v, _] : is_nu) pending.insert(v);
    unsigned counter = 0;
    while (!pending.empty()) {
        // lexicographically least subsumption-minimal pending variable
        std::string pick;
        for (const auto& v : pending) {
            bool minimal = true;
            for (const auto& u : pending)
                if (u != v && order.contains(u) && order.contains(v) && order.leq(u, v))
                    minimal = false;
            if (minimal) {
                pick = v;
                break;
            }
        }
        if (pick.empty()) pick = *pending.begin();  // cycle: arbitrary but deterministic
        unsigned p = counter;
        for (const auto& [u, prio] : pm.priority)
            if (order.contains(u) && order.contains(pick) && order.leq(u, pick))
                p = std::max(p, prio);
        bool want_even = is_nu.at(pick);
        if ((p % 2 == 0) != want_even) ++p;
        pm.priority[pick] = p;
        counter = p + 1;
        pending.erase(pick);
    }
    return pm;
}

// ---------------------------------------------------------------------------
// Good-trace automaton and language inclusion via profile saturation.
//
// States per graph node: (formula, layer) where layer 0 tracks a trace before
// the guess and layer 1+i asserts "from here on every unfolded priority is
// >= e_i, and e_i itself recurs" for the i-th even priority. A path is good
// iff some run reaches accepting transitions (priority == e_i) infinitely
// often, i.e. iff the trace's minimal infinitely-often unfolded priority is
// even. Traces with finitely many unfoldings accept in no layer.

namespace {

struct Automaton {
    std::vector<int> nodes;                       // graph node ids
    std::map<int, std::size_t> node_index;
    std::map<int, std::map<Formula, std::size_t>> formula_index;
    std::vector<unsigned> evens;
    std::size_t layers = 1;
    std::vector<std::size_t> states_per_node;  // formulas * layers + 1 idle

    std::size_t state(int node, std::size_t formula, std::size_t layer) const {
        return formula * layers + layer;
    }
    // a trace may start anywhere on a branch; idle waits for that point
    std::size_t idle(int node) const {
        return states_per_node[node_index.at(node)] - 1;
    }
};

Automaton make_automaton(const TraceGraph& g, const PriorityMap& pm) {
    Automaton a;
    std::set<unsigned> evens;
    for (const auto& [v, p] : pm.priority)
        if (p % 2 == 0) evens.insert(p);
    a.evens.assign(evens.begin(), evens.end());
    a.layers = 1 + a.evens.size();
    for (const auto& [id, fs] : g.node_formulas) {
        a.node_index[id] = a.nodes.size();
        a.nodes.push_back(id);
        auto& fi = a.formula_index[id];
        for (std::size_t i = 0; i < fs.size(); ++i) fi[fs[i]] = i;
        a.states_per_node.push_back(fs.size() * a.layers + 1);
    }
    return a;
}

// Profile of a path segment: per (source state, target state) the best run
// value: 0 none, 1 run, 2 run visiting an accepting transition.
struct Profile {
    std::size_t rows = 0, cols = 0;
    std::vector<std::uint8_t> v;

    std::uint8_t at(std::size_t r, std::size_t c) const { return v[r * cols + c]; }
    void bump(std::size_t r, std::size_t c, std::uint8_t val) {
        auto& cell = v[r * cols + c];
        cell = std::max(cell, val);
    }
    auto operator<=>(const Profile&) const = default;
};

Profile compose(const Profile& a, const Profile& b) {
    Profile out;
    out.rows = a.rows;
    out.cols = b.cols;
    out.v.assign(out.rows * out.cols, 0);
    for (std::size_t r = 0; r < a.rows; ++r)
        for (std::size_t s = 0; s < a.cols; ++s) {
            std::uint8_t x = a.at(r, s);
            if (!x) continue;
            for (std::size_t c = 0; c < b.cols; ++c) {
                std::uint8_t y = b.at(s, c);
                if (!y) continue;
                out.bump(r, c, std::max(x, y));
            }
        }
    return out;
}

Profile edge_profile(const Automaton& a, const TraceGraph& g, const PriorityMap& pm,
                     const TraceGraphEdge& e) {
    const auto& to_fs = g.node_formulas.at(e.to);
    Profile p;
    p.rows = a.states_per_node[a.node_index.at(e.from)];
    p.cols = a.states_per_node[a.node_index.at(e.to)];
    p.v.assign(p.rows * p.cols, 0);
    const auto& fi = a.formula_index.at(e.from);
    const auto& ti = a.formula_index.at(e.to);
    // keep waiting, or start a trace at the target in any layer
    p.bump(a.idle(e.from), a.idle(e.to), 1);
    for (std::size_t i = 0; i < to_fs.size(); ++i)
        for (std::size_t l = 0; l < a.layers; ++l)
            p.bump(a.idle(e.from), a.state(e.to, i, l), 1);
    for (const auto& [f, t, var] : e.steps) {
        std::size_t fs = fi.at(f), ts = ti.at(t);
        std::optional<unsigned> prio;
        if (var) prio = pm.at(*var);
        // base layer follows the trace without acceptance
        p.bump(a.state(e.from, fs, 0), a.state(e.to, ts, 0), 1);
        for (std::size_t li = 0; li < a.evens.size(); ++li) {
            unsigned even = a.evens[li];
            bool allowed = !prio || *prio >= even;
            if (!allowed) continue;
            std::uint8_t val = (prio && *prio == even) ? 2 : 1;
            // jump into the layer or stay in it
            p.bump(a.state(e.from, fs, 0), a.state(e.to, ts, 1 + li), val);
            p.bump(a.state(e.from, fs, 1 + li), a.state(e.to, ts, 1 + li), val);
        }
    }
    return p;
}

}  // namespace

TraceCheckResult check_global_trace_condition(const TraceGraph& graph, const PriorityMap& pm,
                                              std::uint64_t profile_budget) {
    TraceCheckResult result;
    Automaton a = make_automaton(graph, pm);

    // generators: per-edge profiles, grouped by source node
    std::map<int, std::vector<std::pair<int, Profile>>> out_edges;
    for (const auto& e : graph.edges)
        out_edges[e.from].push_back({e.to, edge_profile(a, graph, pm, e)});

    using Key = std::pair<std::pair<int, int>, Profile>;
    std::set<Key> seen;
    std::vector<Key> worklist;
    auto add = [&](int u, int v, Profile p) -> bool {
        Key k{{u, v}, std::move(p)};
        if (seen.insert(k).second) {
            worklist.push_back(std::move(k));
            return true;
        }
        return true;
    };
    for (const auto& [u, outs] : out_edges)
        for (const auto& [v, p] : outs) add(u, v, p);

    auto initial_states = [&]() {
        // traces may start at the root directly or anywhere later (idle)
        std::vector<std::size_t> init;
        const auto& root_fs = graph.node_formulas.at(graph.root);
        for (std::size_t i = 0; i < root_fs.size(); ++i)
            init.push_back(a.state(graph.root, i, 0));
        init.push_back(a.idle(graph.root));
        return init;
    }();

    auto init_reach = [&](const Profile& f) {
        std::vector<bool> reach(f.cols, false);
        for (std::size_t q0 : initial_states)
            for (std::size_t c = 0; c < f.cols; ++c)
                if (f.at(q0, c)) reach[c] = true;
        return reach;
    };

    // root-anchored reachability sets and idempotent loop profiles, tested
    // incrementally as the saturation proceeds
    std::map<int, std::vector<std::vector<bool>>> root_reach;  // u -> reach sets
    std::map<int, std::vector<Profile>> loops;                 // u -> idempotents

    {
        // implicit empty prefix at the root
        std::vector<bool> reach(a.states_per_node[a.node_index.at(graph.root)], false);
        for (std::size_t q0 : initial_states) reach[q0] = true;
        root_reach[graph.root].push_back(std::move(reach));
    }

    // Does the path "stem then loop forever" carry a good trace? The loop
    // point may be taken after any number of loop passes; with g idempotent
    // one pass covers them all, so advance the stem's reach set through g and
    // look for a state that loops back to itself with an accepting step.
    auto compatible = [](const std::vector<bool>& reach, const Profile& g) {
        for (std::size_t q = 0; q < g.cols; ++q) {
            if (g.at(q, q) != 2) continue;
            for (std::size_t r = 0; r < g.rows && r < reach.size(); ++r)
                if (reach[r] && g.at(r, q)) return true;
        }
        return false;
    };

    while (!worklist.empty()) {
        if (seen.size() > profile_budget) {
            result.verdict = TraceVerdict::ResourceError;
            result.detail = "profile budget exceeded (" + std::to_string(profile_budget) + ")";
            result.profiles = seen.size();
            return result;
        }
        Key k = std::move(worklist.back());
        worklist.pop_back();
        auto [uv, p] = std::move(k);
        auto [u, v] = uv;

        if (u == graph.root) {
            auto reach = init_reach(p);
            // test against known loops at v
            for (const auto& loop : loops[v]) {
                if (!compatible(reach, loop)) {
                    result.verdict = TraceVerdict::Reject;
                    result.detail = "infinite branch through node " + std::to_string(v) +
                                    " without a good trace";
                    result.profiles = seen.size();
                    return result;
                }
            }
            root_reach[v].push_back(std::move(reach));
        }
        if (u == v && compose(p, p) == p) {
            for (const auto& reach : root_reach[u]) {
                if (!compatible(reach, p)) {
                    result.verdict = TraceVerdict::Reject;
                    result.detail = "infinite branch through node " + std::to_string(u) +
                                    " without a good trace";
                    result.profiles = seen.size();
                    return result;
                }
            }
            loops[u].push_back(p);
        }

        for (const auto& [w, ep] : out_edges[v]) add(u, w, compose(p, ep));
    }

    result.verdict = TraceVerdict::Accept;
    result.profiles = seen.size();
    return result;
}

// ---------------------------------------------------------------------------
// Lasso oracle

namespace {

// Does the infinite repetition of this edge cycle carry a good trace? A trace
// may start anywhere, so only closed trace walks over the cycle matter.
bool cycle_has_good_trace(const TraceGraph& g, const PriorityMap& pm,
                          const std::vector<const TraceGraphEdge*>& cycle,
                          const std::vector<unsigned>& evens) {
    std::size_t m = cycle.size();
    // product vertices: (position, formula index at source of cycle[pos])
    std::vector<std::size_t> offset(m + 1, 0);
    for (std::size_t i = 0; i < m; ++i)
        offset[i + 1] = offset[i] + g.node_formulas.at(cycle[i]->from).size();
    std::size_t total = offset[m];

    struct Edge {
        std::size_t from, to;
        std::optional<unsigned> prio;
    };
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < m; ++i) {
        const auto& fi = g.node_formulas.at(cycle[i]->from);
        const auto& ti = g.node_formulas.at(cycle[(i + 1) % m]->from);
        // node formula lists need not be sorted; steps whose endpoints are
        // missing from them relate no present formulas and carry no trace
        auto index_of = [](const std::vector<Formula>& fs, const Formula& f) {
            return static_cast<std::size_t>(std::find(fs.begin(), fs.end(), f) -
                                            fs.begin());
        };
        for (const auto& [f, t, var] : cycle[i]->steps) {
            std::size_t fidx = index_of(fi, f), tidx = index_of(ti, t);
            if (fidx == fi.size() || tidx == ti.size()) continue;
            Edge e;
            e.from = offset[i] + fidx;
            e.to = offset[(i + 1) % m] + tidx;
            if (var) e.prio = pm.at(*var);
            edges.push_back(e);
        }
    }

    for (unsigned even : evens) {
        // keep edges with no unfolding or priority >= even; look for a cycle
        // (SCC) containing an edge of priority exactly even
        std::vector<std::vector<std::size_t>> adj(total);
        std::vector<Edge> kept;
        for (const auto& e : edges) {
            if (e.prio && *e.prio < even) continue;
            adj[e.from].push_back(e.to);
            kept.push_back(e);
        }
        // iterative Tarjan
        std::vector<int> comp(total, -1), low(total, 0), disc(total, -1);
        std::vector<std::size_t> st;
        std::vector<bool> on_stack(total, false);
        int time = 0, ncomp = 0;
        for (std::size_t s0 = 0; s0 < total; ++s0) {
            if (disc[s0] != -1) continue;
            std::vector<std::pair<std::size_t, std::size_t>> call{{s0, 0}};
            while (!call.empty()) {
                auto& [v, ci] = call.back();
                if (ci == 0) {
                    disc[v] = low[v] = time++;
                    st.push_back(v);
                    on_stack[v] = true;
                }
                if (ci < adj[v].size()) {
                    std::size_t w = adj[v][ci++];
                    if (disc[w] == -1) {
                        call.push_back({w, 0});
                    } else if (on_stack[w]) {
                        low[v] = std::min(low[v], disc[w]);
                    }
                } else {
                    if (low[v] == disc[v]) {
                        while (true) {
                            std::size_t w = st.back();
                            st.pop_back();
                            on_stack[w] = false;
                            comp[w] = ncomp;
                            if (w == v) break;
                        }
                        ++ncomp;
                    }
                    std::size_t vv = v;
                    call.pop_back();
                    if (!call.empty())
                        low[call.back().first] = std::min(low[call.back().first], low[vv]);
                }
            }
        }
        // an accepting edge inside one SCC (incl. self-loops) lies on a cycle
        for (const auto& e : kept)
            if (e.prio && *e.prio == even && comp[e.from] == comp[e.to]) return true;
    }
    return false;
}

}  // namespace

TraceCheckResult lasso_oracle(const TraceGraph& graph, const PriorityMap& pm,
                              std::uint64_t node_cap) {
    TraceCheckResult result;
    if (graph.node_formulas.size() > node_cap) {
        result.verdict = TraceVerdict::ResourceError;
        result.detail = "node cap exceeded";
        return result;
    }
    std::vector<unsigned> evens;
    for (const auto& [v, p] : pm.priority)
        if (p % 2 == 0) evens.push_back(p);
    std::sort(evens.begin(), evens.end());
    evens.erase(std::unique(evens.begin(), evens.end()), evens.end());

    std::map<int, std::vector<const TraceGraphEdge*>> out_edges;
    for (const auto& e : graph.edges) out_edges[e.from].push_back(&e);

    std::set<std::vector<const TraceGraphEdge*>> checked_cycles;

    // DFS over simple paths from the root; a repeated node closes a lasso.
    std::vector<const TraceGraphEdge*> path;
    std::vector<int> path_nodes{graph.root};
    bool reject = false;
    std::string detail;

    std::function<void(int)> dfs = [&](int node) {
        if (reject) return;
        for (const TraceGraphEdge* e : out_edges[node]) {
            auto it = std::find(path_nodes.begin(), path_nodes.end(), e->to);
            if (it != path_nodes.end()) {
                // cycle from the first occurrence of e->to
                std::size_t idx = static_cast<std::size_t>(it - path_nodes.begin());
                std::vector<const TraceGraphEdge*> cycle(path.begin() + idx, path.end());
                cycle.push_back(e);
                // canonical rotation for dedup
                std::vector<const TraceGraphEdge*> best = cycle;
                for (std::size_t r = 1; r < cycle.size(); ++r) {
                    std::rotate(cycle.begin(), cycle.begin() + 1, cycle.end());
                    if (cycle < best) best = cycle;
                }
                if (checked_cycles.insert(best).second) {
                    ++result.lassos_checked;
                    if (!cycle_has_good_trace(graph, pm, best, evens)) {
                        reject = true;
                        detail = "simple lasso through node " + std::to_string(e->to) +
                                 " has no good trace";
                        return;
                    }
                }
            } else {
                path.push_back(e);
                path_nodes.push_back(e->to);
                dfs(e->to);
                path.pop_back();
                path_nodes.pop_back();
                if (reject) return;
            }
        }
    };
    dfs(graph.root);

    result.verdict = reject ? TraceVerdict::Reject : TraceVerdict::Accept;
    result.detail = detail;
    return result;
}

std::string dump_trace_automaton(const TraceGraph& graph, const PriorityMap& pm) {
    Automaton a = make_automaton(graph, pm);
    std::ostringstream out;
    out << "# good-trace automaton: states (node, formula, layer)\n";
    for (const auto& [id, fs] : graph.node_formulas) {
        for (std::size_t i = 0; i < fs.size(); ++i) {
            out << "state " << id << " " << fs[i].str() << " base\n";
            for (unsigned e : a.evens)
                out << "state " << id << " " << fs[i].str() << " layer" << e << "\n";
        }
    }
    for (const auto& e : graph.edges) {
        for (const auto& [f, t, var] : e.steps) {
            out << "edge " << e.from << " -> " << e.to << " : " << f.str() << " => " << t.str();
            if (var) out << " unfolds " << *var << " prio " << pm.at(*var);
            out << "\n";
        }
    }
    return out.str();
}

}  // namespace mucyclo
