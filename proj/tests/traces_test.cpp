#include "mucyclo/traces.hpp"

#include <random>

#include "doctest.h"

using namespace mucyclo;

namespace {

AnnotatedSequent seq(std::initializer_list<const char*> fs) {
    std::vector<AnnotatedFormula> items;
    for (const char* s : fs) items.push_back({parse_formula(s), {}});
    return AnnotatedSequent(std::move(items));
}

int principal_of(const AnnotatedSequent& s, const char* text) {
    Formula f = parse_formula(text);
    const auto& items = s.items();
    for (std::size_t i = 0; i < items.size(); ++i)
        if (items[i].formula == f) return static_cast<int>(i);
    throw std::logic_error("principal not found");
}

// one-node graph with a self-loop carrying the given steps
TraceGraph loop_graph(std::vector<std::tuple<Formula, Formula, std::optional<std::string>>> steps) {
    TraceGraph g;
    g.root = 0;
    std::set<Formula> fs;
    for (const auto& [a, b, v] : steps) {
        fs.insert(a);
        fs.insert(b);
    }
    g.node_formulas[0] = std::vector<Formula>(fs.begin(), fs.end());
    g.edges.push_back({0, 0, std::move(steps)});
    return g;
}

}  // namespace

TEST_CASE("descendants of a disjunction step") {
    const char* kChi = "[](nu x. <>(~p & ([]x | <>(nu y. [](p & ([]x | <>y)))))) "
                       "| <>(nu y. [](p & ([](nu x. <>(~p & ([]x | <>y))) | <>y)))";
    // chi as one formula next to a side formula q
    Proof p;
    p.system = ProofSystem::Nw;
    p.root = 0;
    ProofNode n0;
    n0.id = 0;
    n0.sequent = seq({kChi, "q"});
    n0.rule = Rule::Or;
    n0.principal = principal_of(n0.sequent, kChi);
    n0.children = {1};
    Formula chi = parse_formula(kChi);
    ProofNode n1;
    n1.id = 1;
    n1.sequent = AnnotatedSequent(
        {{chi.left(), {}}, {chi.right(), {}}, {parse_formula("q"), {}}});
    n1.rule = Rule::Open;
    p.nodes[0] = n0;
    p.nodes[1] = n1;

    auto ds = descendants(p, 0, 0);
    REQUIRE(ds.size() == 3);
    int to_left = 0, to_right = 0, identity = 0;
    for (const auto& t : ds) {
        CHECK_FALSE(t.unfolded_variable.has_value());
        if (t.from.formula == chi && t.to.formula == chi.left()) ++to_left;
        if (t.from.formula == chi && t.to.formula == chi.right()) ++to_right;
        if (t.from.formula == parse_formula("q") && t.to.formula == parse_formula("q")) ++identity;
    }
    CHECK(to_left == 1);
    CHECK(to_right == 1);
    CHECK(identity == 1);
}

TEST_CASE("weakened formulas have no descendants") {
    Proof p;
    p.system = ProofSystem::Nw;
    p.root = 0;
    ProofNode n0;
    n0.id = 0;
    n0.sequent = seq({"p", "q"});
    n0.rule = Rule::Weak;
    n0.principal = principal_of(n0.sequent, "p");
    n0.children = {1};
    ProofNode n1;
    n1.id = 1;
    n1.sequent = seq({"q"});
    n1.rule = Rule::Open;
    p.nodes[0] = n0;
    p.nodes[1] = n1;

    auto ds = descendants(p, 0, 0);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].from.formula == parse_formula("q"));
    CHECK(ds[0].to.formula == parse_formula("q"));
}

TEST_CASE("fixpoint steps record the unfolded variable") {
    Proof p;
    p.system = ProofSystem::Nw;
    p.root = 0;
    ProofNode n0;
    n0.id = 0;
    n0.sequent = seq({"nu z. <>z"});
    n0.rule = Rule::Nu;
    n0.principal = 0;
    n0.children = {1};
    ProofNode n1;
    n1.id = 1;
    n1.sequent = seq({"<> nu z. <>z"});
    n1.rule = Rule::Open;
    p.nodes[0] = n0;
    p.nodes[1] = n1;

    auto ds = descendants(p, 0, 0);
    REQUIRE(ds.size() == 1);
    CHECK(ds[0].to.formula == unfold(parse_formula("nu z. <>z")));
    REQUIRE(ds[0].unfolded_variable.has_value());
    CHECK(*ds[0].unfolded_variable == "z");
}

TEST_CASE("modal rule steps under the modalities") {
    Proof p;
    p.system = ProofSystem::Nw;
    p.root = 0;
    ProofNode n0;
    n0.id = 0;
    n0.sequent = seq({"[]p", "<>q", "<>r"});
    n0.rule = Rule::Box;
    n0.principal = principal_of(n0.sequent, "[]p");
    n0.children = {1};
    ProofNode n1;
    n1.id = 1;
    n1.sequent = seq({"p", "q", "r"});
    n1.rule = Rule::Open;
    p.nodes[0] = n0;
    p.nodes[1] = n1;

    auto ds = descendants(p, 0, 0);
    REQUIRE(ds.size() == 3);
    for (const auto& t : ds) {
        CHECK(t.from.formula.sub() == t.to.formula);
        CHECK_FALSE(t.unfolded_variable.has_value());
    }

    // a non-diamond side formula is an invalid instance
    Proof bad = p;
    bad.nodes[0].sequent = seq({"[]p", "q"});
    bad.nodes[0].principal = principal_of(bad.nodes[0].sequent, "[]p");
    CHECK_THROWS(descendants(bad, 0, 0));
}

TEST_CASE("back-edges resolve to their target in the trace graph") {
    Proof p;
    p.system = ProofSystem::Nw;
    p.root = 0;
    ProofNode n0;
    n0.id = 0;
    n0.sequent = seq({"nu z. <>z"});
    n0.rule = Rule::Nu;
    n0.principal = 0;
    n0.children = {1};
    ProofNode n1;
    n1.id = 1;
    n1.sequent = seq({"<> nu z. <>z"});
    n1.rule = Rule::Backedge;
    n1.target = 0;  // not a valid proof, but a fine graph
    p.nodes[0] = n0;
    p.nodes[1] = n1;

    TraceGraph g = build_trace_graph(p);
    REQUIRE(g.edges.size() == 2);
    bool has_back = false;
    for (const auto& e : g.edges)
        if (e.from == 1 && e.to == 0) has_back = true;
    CHECK(has_back);
}

TEST_CASE("priority assignment invariants") {
    SUBCASE("single nu variable") {
        Sequent s({parse_formula("nu x. x")});
        PriorityMap pm = priority_assignment(closure(s), subsumption_order(s));
        CHECK(pm.at("x") % 2 == 0);
        CHECK(pm.at("x") == 0);
    }
    SUBCASE("mu under nu") {
        Sequent s({parse_formula("mu a. nu b. (a | b)")});
        PriorityMap pm = priority_assignment(closure(s), subsumption_order(s));
        CHECK(pm.at("a") == 1);
        CHECK(pm.at("b") == 2);
    }
    SUBCASE("the two-nu sequent from the disjunction example") {
        Formula phi = parse_formula("nu x. <>(~p & ([]x | <>(nu y. [](p & ([]x | <>y)))))");
        // the inner y-binder with x re-closed by the full x-formula
        Formula inner = phi.body().sub().right().right().sub();
        Formula psi = substitute(inner, "x", phi);
        Sequent s({phi, psi});
        SubsumptionOrder ord = subsumption_order(s);
        PriorityMap pm = priority_assignment(closure(s), ord);
        CHECK(pm.at("x") % 2 == 0);
        CHECK(pm.at("y") % 2 == 0);
        CHECK(pm.at("x") <= pm.at("y"));  // x <= y in the subsumption order
        CHECK(pm.at("x") == 0);
        CHECK(pm.at("y") == 2);
    }
}

TEST_CASE("self-loop graphs: parity decides") {
    Formula a = parse_formula("p");
    SUBCASE("odd unfolding forever is rejected") {
        TraceGraph g = loop_graph({{a, a, "x"}});
        PriorityMap pm;
        pm.priority["x"] = 1;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Reject);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Reject);
    }
    SUBCASE("even unfolding forever is accepted") {
        TraceGraph g = loop_graph({{a, a, "x"}});
        PriorityMap pm;
        pm.priority["x"] = 2;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Accept);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Accept);
    }
    SUBCASE("a trace that stops unfolding is not good") {
        TraceGraph g = loop_graph({{a, a, std::nullopt}});
        PriorityMap pm;
        pm.priority["x"] = 2;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Reject);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Reject);
    }
    SUBCASE("minimal recurring priority decides, not the maximal one") {
        Formula b = parse_formula("q");
        TraceGraph g = loop_graph({{a, b, "x"}, {b, a, "y"}});
        PriorityMap pm;
        pm.priority["x"] = 1;
        pm.priority["y"] = 2;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Reject);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Reject);
    }
    SUBCASE("two parallel traces: one good trace suffices") {
        Formula b = parse_formula("q");
        TraceGraph g = loop_graph({{a, a, "x"}, {b, b, "y"}});
        PriorityMap pm;
        pm.priority["x"] = 1;
        pm.priority["y"] = 2;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Accept);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Accept);
    }
}

TEST_CASE("every infinite branch must carry a good trace") {
    Formula a = parse_formula("p");
    TraceGraph g;
    g.root = 0;
    g.node_formulas[0] = {a};
    g.node_formulas[1] = {a};
    g.node_formulas[2] = {a};
    g.edges.push_back({0, 1, {{a, a, std::nullopt}}});
    g.edges.push_back({0, 2, {{a, a, std::nullopt}}});
    g.edges.push_back({1, 1, {{a, a, std::string("good")}}});
    g.edges.push_back({2, 2, {{a, a, std::string("bad")}}});
    PriorityMap pm;
    pm.priority["good"] = 2;
    pm.priority["bad"] = 1;
    auto r = check_global_trace_condition(g, pm);
    CHECK(r.verdict == TraceVerdict::Reject);
    CHECK(r.detail.find("2") != std::string::npos);
    CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Reject);

    // repair the bad loop
    g.edges[3].steps = {{a, a, std::string("good")}};
    CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Accept);
    CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Accept);
}

TEST_CASE("a trace may start in the middle of a branch") {
    // the root formula dies immediately, but a fresh trace begins at node 1
    Formula a = parse_formula("p");
    Formula b = parse_formula("q");
    TraceGraph g;
    g.root = 0;
    g.node_formulas[0] = {a};
    g.node_formulas[1] = {a, b};
    g.edges.push_back({0, 1, {{a, a, std::nullopt}}});
    g.edges.push_back({1, 1, {{b, b, std::string("x")}}});  // a has no continuation
    PriorityMap pm;
    pm.priority["x"] = 2;
    CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Accept);
    CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Accept);
}

TEST_CASE("verdicts are invariant across equivalent priority maps") {
    Formula a = parse_formula("p");
    Formula b = parse_formula("q");
    TraceGraph g = loop_graph({{a, b, "x"}, {b, a, "y"}});
    // same parities, same relative order, different numerals
    std::vector<std::map<std::string, unsigned>> maps = {
        {{"x", 1}, {"y", 2}}, {{"x", 3}, {"y", 4}}, {{"x", 1}, {"y", 6}}};
    for (const auto& m : maps) {
        PriorityMap pm;
        pm.priority = m;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Reject);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Reject);
    }
    std::vector<std::map<std::string, unsigned>> even_maps = {
        {{"x", 2}, {"y", 2}}, {{"x", 0}, {"y", 4}}, {{"x", 2}, {"y", 8}}};
    for (const auto& m : even_maps) {
        PriorityMap pm;
        pm.priority = m;
        CHECK(check_global_trace_condition(g, pm).verdict == TraceVerdict::Accept);
        CHECK(lasso_oracle(g, pm).verdict == TraceVerdict::Accept);
    }
}

TEST_CASE("profile check agrees with the lasso oracle on random functional graphs") {
    // each node has exactly one outgoing edge, so every infinite path is an
    // eventually-simple lasso and both deciders must coincide
    std::mt19937 rng(20260823);
    Formula fa = parse_formula("p");
    Formula fb = parse_formula("q");
    std::vector<Formula> fs = {fa, fb};
    int disagreements = 0;
    for (int trial = 0; trial < 200; ++trial) {
        int n = 2 + static_cast<int>(rng() % 4);
        TraceGraph g;
        g.root = 0;
        for (int i = 0; i < n; ++i) g.node_formulas[i] = fs;
        PriorityMap pm;
        pm.priority["u1"] = 1;
        pm.priority["u2"] = 2;
        pm.priority["u3"] = 3;
        pm.priority["u4"] = 4;
        std::vector<std::string> vars = {"u1", "u2", "u3", "u4"};
        for (int i = 0; i < n; ++i) {
            TraceGraphEdge e;
            e.from = i;
            e.to = static_cast<int>(rng() % n);
            int steps = 1 + static_cast<int>(rng() % 3);
            for (int s = 0; s < steps; ++s) {
                Formula from = fs[rng() % 2];
                Formula to = fs[rng() % 2];
                std::optional<std::string> var;
                if (rng() % 3) var = vars[rng() % 4];
                e.steps.push_back({from, to, var});
            }
            g.edges.push_back(std::move(e));
        }
        auto exact = check_global_trace_condition(g, pm);
        auto oracle = lasso_oracle(g, pm);
        REQUIRE(exact.verdict != TraceVerdict::ResourceError);
        REQUIRE(oracle.verdict != TraceVerdict::ResourceError);
        if (exact.verdict != oracle.verdict) ++disagreements;
    }
    CHECK(disagreements == 0);
}

TEST_CASE("resource limits surface as errors, not verdicts") {
    Formula a = parse_formula("p");
    TraceGraph g = loop_graph({{a, a, "x"}});
    PriorityMap pm;
    pm.priority["x"] = 2;
    auto r = check_global_trace_condition(g, pm, 0);
    CHECK(r.verdict == TraceVerdict::ResourceError);
    auto r2 = lasso_oracle(g, pm, 0);
    CHECK(r2.verdict == TraceVerdict::ResourceError);
}

TEST_CASE("automaton dump mentions every node and unfolding") {
    Formula a = parse_formula("p");
    TraceGraph g = loop_graph({{a, a, "x"}});
    PriorityMap pm;
    pm.priority["x"] = 2;
    std::string dump = dump_trace_automaton(g, pm);
    CHECK(dump.find("state 0") != std::string::npos);
    CHECK(dump.find("unfolds x") != std::string::npos);
    CHECK(dump.find("prio 2") != std::string::npos);
}
