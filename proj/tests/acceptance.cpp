// Acceptance gate: one line per criterion, exit code = number of failures.

#include <chrono>
#include <cstdlib>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "mucyclo/corpus.hpp"
#include "mucyclo/search.hpp"
#include "mucyclo/semantics.hpp"
#include "pi_builder.hpp"

using namespace mucyclo;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int number, const std::string& title, bool ok, const std::string& detail) {
    std::cout << (ok ? "PASS" : "FAIL") << "  criterion " << number << ": " << title
              << "  [" << detail << "]" << std::endl;
    if (!ok) ++failures;
}

Proof corpus_proof(const std::string& name) {
    const char* dir = std::getenv("MUCYCLO_CORPUS_DIR");
    if (!dir) throw std::runtime_error("MUCYCLO_CORPUS_DIR is not set");
    return load_proof_file(std::string(dir) + "/" + name + ".json");
}

// criterion 1: the checked-in cyclic proof is accepted, and both trace
// deciders confirm every cycle carries a good trace, in under a second
void criterion_1() {
    auto start = Clock::now();
    Proof pi = corpus_proof("pi");
    NwCheckResult r = check_nw(pi);
    ClosureSet clos = closure(testing::Phi());
    PriorityMap pm = priority_assignment(clos, subsumption_order(testing::Phi()));
    TraceCheckResult oracle = lasso_oracle(build_trace_graph(pi), pm);
    double t = seconds_since(start);
    bool ok = r.accepted && r.trace.verdict == TraceVerdict::Accept &&
              oracle.verdict == TraceVerdict::Accept && t < 1.0;
    std::ostringstream d;
    d << r.summary() << ", oracle "
      << (oracle.verdict == TraceVerdict::Accept ? "accept" : "reject") << ", " << t << " s";
    report(1, "the displayed cyclic proof is accepted with good traces on every cycle", ok,
           d.str());
}

// criterion 2: discharging the final repeat of the annotated derivation is
// rejected with a discharge-sequent mismatch at that leaf
void criterion_2() {
    auto start = Clock::now();
    CloCheckResult r = check_clo(testing::make_rho0(/*discharge_c=*/true));
    double t = seconds_since(start);
    bool mismatch = false;
    for (const auto& d : r.diagnostics)
        if (d.rfind("node 17:", 0) == 0 && d.find("discharge mismatch") != std::string::npos)
            mismatch = true;
    bool ok = !r.accepted && mismatch && t < 1.0;
    report(2, "the undischargeable repeat is rejected with a sequent mismatch", ok,
           std::to_string(r.diagnostics.size()) + " diagnostics, " + std::to_string(t) +
               " s");
}

// criterion 3: annotated search at default bounds exhausts its fragment on
// the two-nu sequent and describes the searched fragment
void criterion_3() {
    auto start = Clock::now();
    SearchOutcome out = search_clo(testing::Phi());
    double t = seconds_since(start);
    bool ok = out.status == SearchStatus::ExhaustedWithinBounds && t < 300.0 &&
              out.fragment.find("weakening") != std::string::npos &&
              out.fragment.find("discharge") != std::string::npos &&
              out.fragment.find("depth") != std::string::npos;
    report(3, "annotated search exhausts the default-bounded fragment", ok,
           out.summary().substr(0, 60) + "..., " + std::to_string(t) + " s");
}

// criterion 4: cyclic search proves the two-nu sequent quickly, and the
// proof's unfolding tree satisfies the one-x-node-one-y-node lemma
void criterion_4() {
    auto start = Clock::now();
    SearchOutcome out = search_nw(testing::Phi());
    double t = seconds_since(start);
    bool ok = out.status == SearchStatus::Found && t < 30.0 &&
              check_nw(*out.proof).accepted &&
              verify_children_lemma(*out.proof, testing::Phi()).accepted;
    report(4, "cyclic search finds an accepted proof satisfying the children lemma", ok,
           out.summary().substr(0, 40) + ", " + std::to_string(t) + " s");
}

// criterion 5: the three back-edge leaves classify as x-node, y-node, neither
void criterion_5() {
    Proof pi = corpus_proof("pi");
    Sequent target = testing::Phi();
    bool ok = classify_unfolding_child(0, 9, pi, target) == UnfoldingChildKind::XNode &&
              classify_unfolding_child(0, 14, pi, target) == UnfoldingChildKind::YNode &&
              classify_unfolding_child(0, 17, pi, target) == UnfoldingChildKind::Neither;
    report(5, "the three repeats classify as x-node, y-node, neither", ok,
           "children 9/14/17 of the root");
}

// criterion 6: the goal disjunction has no small countermodel and holds on
// 1000 random models, while each single fixpoint fails in a one-state model
void criterion_6() {
    auto start = Clock::now();
    Formula goal = Formula::disj(testing::phi_x(), testing::psi_y());
    bool no_small = search_countermodel(goal, 3).status == CountermodelStatus::NoneFound;

    std::mt19937 rng(20260823);
    int holds = 0;
    const int trials = 1000;
    for (int i = 0; i < trials; ++i) {
        KripkeModel m;
        m.num_states = 1 + rng() % 6;
        for (std::size_t s = 0; s < m.num_states; ++s)
            m.successors.push_back(static_cast<StateSet>(rng()) & m.all_states());
        m.valuation["p"] = static_cast<StateSet>(rng()) & m.all_states();
        if (holds_everywhere(goal, m)) ++holds;
    }

    bool phi_fails = search_countermodel(testing::phi_x(), 1).status ==
                     CountermodelStatus::Found;
    bool psi_fails = search_countermodel(testing::psi_y(), 1).status ==
                     CountermodelStatus::Found;
    double t = seconds_since(start);
    bool ok = no_small && holds == trials && phi_fails && psi_fails && t < 120.0;
    report(6, "the goal is valid at desk scale but neither fixpoint alone is", ok,
           std::to_string(holds) + "/" + std::to_string(trials) + " random models, " +
               std::to_string(t) + " s");
}

// criterion 7: every annotated proof in the corpus and 100+ searched ones
// translate into accepted cyclic proofs
void criterion_7() {
    int total = 0, translated = 0;

    for (const auto& name : artifact_names()) {
        Artifact a = get_artifact(name);
        if (!a.proof || a.proof->system != ProofSystem::Clo) continue;
        if (!check_clo(*a.proof).accepted) continue;  // the rejected derivation stays out
        ++total;
        if (check_nw(translate_clo_to_nw(*a.proof)).accepted) ++translated;
    }

    std::vector<std::string> atoms = {"p", "q", "r", "s"};
    std::vector<Sequent> goals;
    for (const auto& a : atoms) goals.push_back(parse_sequent(a + " | ~" + a));
    for (const auto& a : atoms)
        for (const auto& b : atoms) {
            std::string ta = "(" + a + " | ~" + a + ")", tb = "(" + b + " | ~" + b + ")";
            goals.push_back(parse_sequent(ta + " & " + tb));
            goals.push_back(parse_sequent(ta + ", " + tb));
            goals.push_back(parse_sequent("[]" + ta + " | <>" + tb + ", " + ta));
            goals.push_back(parse_sequent("nu x. (x | " + tb + ")"));
            goals.push_back(parse_sequent("[](" + ta + " & " + tb + ")"));
            goals.push_back(parse_sequent(ta + " | " + tb));
            goals.push_back(parse_sequent("[]" + ta + ", " + tb));
            goals.push_back(parse_sequent("nu x. []x, " + ta));
        }
    for (const auto& g : goals) {
        SearchOutcome out = search_clo(g);
        if (out.status != SearchStatus::Found) continue;
        ++total;
        if (check_nw(translate_clo_to_nw(*out.proof)).accepted) ++translated;
    }

    bool ok = total >= 100 && translated == total;
    report(7, "translated annotated proofs are always accepted cyclic proofs", ok,
           std::to_string(translated) + "/" + std::to_string(total));
}

// criterion 8: the two-nu sequent fails adisjunctivity with the inner
// disjunction as witness, while control sequents pass
void criterion_8() {
    AdisjunctivityVerdict v = is_adisjunctive(testing::Phi());
    bool reject_ok = !v.adisjunctive && v.disjunction && *v.disjunction == testing::chi();
    int controls = 0;
    for (const char* text : {"p, q", "nu x. []x", "mu x. <>x, p & q"})
        if (is_adisjunctive(parse_sequent(text)).adisjunctive) ++controls;
    bool ok = reject_ok && controls == 3;
    report(8, "adisjunctivity rejects the goal with the inner disjunction as witness", ok,
           std::string(reject_ok ? "witness matches" : "witness wrong") + ", " +
               std::to_string(controls) + "/3 controls");
}

// criterion 9: the automata-inclusion trace check and the brute-force lasso
// oracle agree on 500 random functional proof graphs with at most 8 nodes
// (out-degree one, so every infinite path is eventually a simple cycle and
// the oracle is complete)
void criterion_9() {
    std::mt19937 rng(493);
    std::vector<Formula> fs = {parse_formula("p"), parse_formula("q"),
                               parse_formula("~p")};
    std::vector<std::string> vars = {"u1", "u2", "u3", "u4"};
    PriorityMap pm;
    pm.priority = {{"u1", 1}, {"u2", 2}, {"u3", 3}, {"u4", 4}};

    int agree = 0;
    const int trials = 500;
    for (int trial = 0; trial < trials; ++trial) {
        int n = 2 + static_cast<int>(rng() % 7);  // 2..8 nodes
        TraceGraph g;
        g.root = 0;
        for (int i = 0; i < n; ++i)
            g.node_formulas[i] = {fs[rng() % fs.size()], fs[rng() % fs.size()]};
        for (int i = 0; i < n; ++i) {
            TraceGraphEdge e;
            e.from = i;
            e.to = static_cast<int>(rng() % n);
            int steps = 1 + static_cast<int>(rng() % 3);
            for (int s = 0; s < steps; ++s) {
                std::optional<std::string> var;
                if (rng() % 3) var = vars[rng() % vars.size()];
                e.steps.push_back({g.node_formulas[i][rng() % 2],
                                   g.node_formulas[e.to][rng() % 2], var});
            }
            g.edges.push_back(std::move(e));
        }
        TraceCheckResult exact = check_global_trace_condition(g, pm);
        TraceCheckResult oracle = lasso_oracle(g, pm);
        if (exact.verdict != TraceVerdict::ResourceError &&
            exact.verdict == oracle.verdict)
            ++agree;
    }
    bool ok = agree == trials;
    report(9, "the exact trace check agrees with the lasso oracle on random graphs", ok,
           std::to_string(agree) + "/" + std::to_string(trials));
}

// criterion 10: closure sizes are exact, cross-checked against a naive
// iterate-to-fixpoint oracle implemented here
void criterion_10() {
    auto oracle = [](const Sequent& s) {
        std::set<Formula> out(s.formulas().begin(), s.formulas().end());
        bool changed = true;
        while (changed) {
            changed = false;
            std::set<Formula> next = out;
            for (const auto& f : out) {
                switch (f.kind()) {
                    case FormulaKind::Or:
                    case FormulaKind::And:
                        next.insert(f.left());
                        next.insert(f.right());
                        break;
                    case FormulaKind::Dia:
                    case FormulaKind::Box:
                        next.insert(f.sub());
                        break;
                    case FormulaKind::Mu:
                    case FormulaKind::Nu:
                        next.insert(unfold(f));
                        break;
                    default:
                        break;
                }
            }
            if (next.size() != out.size()) {
                out = std::move(next);
                changed = true;
            }
        }
        return out;
    };
    std::set<Formula> phi_oracle = oracle(testing::Phi());
    ClosureSet phi_lib = closure(testing::Phi());
    ClosureSet self_lib = closure(parse_sequent("nu x. x"));
    bool ok = phi_lib.members == phi_oracle && phi_lib.members.size() == 11 &&
              self_lib.members.size() == 1;
    report(10, "closure sizes are exact and match the naive fixpoint oracle", ok,
           std::to_string(phi_lib.members.size()) + " and " +
               std::to_string(self_lib.members.size()) + " members");
}

// criterion 11: disabling any single side condition flips at least one
// reproduction-suite item
void criterion_11() {
    auto flips = [](SuiteOptions o) {
        SuiteReport r = run_paper_suite(o);
        return !r.all_passed();
    };
    SuiteOptions o;
    bool baseline = run_paper_suite().all_passed();
    o.check.check_eta_annotation = false;
    bool eta = flips(o);
    o = {};
    o.check.check_exp_subword = false;
    bool exp = flips(o);
    o = {};
    o.check.check_clo_freshness = false;
    bool fresh = flips(o);
    o = {};
    o.check.check_discharge_equality = false;
    bool discharge = flips(o);
    bool ok = baseline && eta && exp && fresh && discharge;
    report(11, "every annotation side condition is load-bearing", ok,
           std::string("baseline ") + (baseline ? "pass" : "FAIL") + ", 4/4 conditions flip");
}

}  // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    criterion_11();
    std::cout << (failures == 0 ? "all criteria passed" : "criteria FAILED") << std::endl;
    return failures;
}
