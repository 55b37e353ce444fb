#include "mucyclo/corpus.hpp"

#include <cstdlib>
#include <functional>
#include <future>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mucyclo/nw.hpp"
#include "mucyclo/semantics.hpp"

namespace mucyclo {

namespace {

Formula corpus_phi_x() {
    return parse_formula("nu x. <>(~p & ([]x | <>(nu y. [](p & ([]x | <>y)))))");
}

Formula corpus_psi_y() {
    Formula phi = corpus_phi_x();
    Formula inner = phi.body().sub().right().right().sub();  // the y-binder, x free
    return substitute(inner, "x", phi);
}

Formula corpus_chi() {
    return Formula::disj(Formula::box(corpus_phi_x()), Formula::dia(corpus_psi_y()));
}

Sequent corpus_Phi() { return Sequent({corpus_phi_x(), corpus_psi_y()}); }

ProofNode node(int id, std::vector<AnnotatedFormula> fs, Rule rule,
               std::optional<AnnotatedFormula> principal, std::vector<int> children,
               std::optional<int> target = std::nullopt,
               std::optional<Name> token = std::nullopt) {
    ProofNode n;
    n.id = id;
    n.sequent = AnnotatedSequent(std::move(fs));
    n.rule = rule;
    if (principal) {
        const auto& canon = n.sequent.items();
        for (std::size_t i = 0; i < canon.size(); ++i)
            if (canon[i] == *principal) n.principal = static_cast<int>(i);
    }
    n.children = std::move(children);
    n.target = target;
    n.token = token;
    return n;
}

ProofNode bare(int id, std::vector<Formula> fs, Rule rule, std::optional<Formula> principal,
               std::vector<int> children, std::optional<int> target = std::nullopt) {
    std::vector<AnnotatedFormula> items;
    for (auto& f : fs) items.push_back({f, {}});
    std::optional<AnnotatedFormula> p;
    if (principal) p = AnnotatedFormula{*principal, {}};
    return node(id, std::move(items), rule, p, std::move(children), target);
}

/// The cyclic proof with three back-edges to the root.
Proof corpus_pi() {
    Formula phi = corpus_phi_x(), psi = corpus_psi_y(), c = corpus_chi();
    Formula ufx = unfold(phi), ufy = unfold(psi);
    Formula p = parse_formula("p"), np = parse_formula("~p");
    Formula pandchi = ufy.sub(), npandchi = ufx.sub();
    Formula boxphi = c.left(), diapsi = c.right();

    Proof pr;
    pr.system = ProofSystem::Nw;
    pr.root = 0;
    auto add = [&](ProofNode n) { pr.nodes[n.id] = std::move(n); };
    add(bare(0, {phi, psi}, Rule::Nu, phi, {1}));
    add(bare(1, {ufx, psi}, Rule::Nu, psi, {2}));
    add(bare(2, {ufx, ufy}, Rule::Box, ufy, {3}));
    add(bare(3, {npandchi, pandchi}, Rule::And, pandchi, {4, 10}));
    add(bare(4, {npandchi, p}, Rule::And, npandchi, {5, 6}));
    add(bare(5, {np, p}, Rule::Ax, std::nullopt, {}));
    add(bare(6, {c, p}, Rule::Or, c, {7}));
    add(bare(7, {boxphi, diapsi, p}, Rule::Weak, p, {8}));
    add(bare(8, {boxphi, diapsi}, Rule::Box, boxphi, {9}));
    add(bare(9, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    add(bare(10, {npandchi, c}, Rule::And, npandchi, {11, 15}));
    add(bare(11, {np, c}, Rule::Or, c, {12}));
    add(bare(12, {np, boxphi, diapsi}, Rule::Weak, np, {13}));
    add(bare(13, {boxphi, diapsi}, Rule::Box, boxphi, {14}));
    add(bare(14, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    add(bare(15, {c}, Rule::Or, c, {16}));
    add(bare(16, {boxphi, diapsi}, Rule::Box, boxphi, {17}));
    add(bare(17, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    return pr;
}

/// Variant where the right conjunct branch weakens the whole conjunction away.
Proof corpus_pi_weak_1() {
    Formula phi = corpus_phi_x(), psi = corpus_psi_y(), c = corpus_chi();
    Formula ufx = unfold(phi), ufy = unfold(psi);
    Formula p = parse_formula("p"), np = parse_formula("~p");
    Formula pandchi = ufy.sub(), npandchi = ufx.sub();
    Formula boxphi = c.left(), diapsi = c.right();

    Proof pr;
    pr.system = ProofSystem::Nw;
    pr.root = 0;
    auto add = [&](ProofNode n) { pr.nodes[n.id] = std::move(n); };
    add(bare(0, {phi, psi}, Rule::Nu, phi, {1}));
    add(bare(1, {ufx, psi}, Rule::Nu, psi, {2}));
    add(bare(2, {ufx, ufy}, Rule::Box, ufy, {3}));
    add(bare(3, {npandchi, pandchi}, Rule::And, pandchi, {4, 10}));
    add(bare(4, {npandchi, p}, Rule::And, npandchi, {5, 6}));
    add(bare(5, {np, p}, Rule::Ax, std::nullopt, {}));
    add(bare(6, {c, p}, Rule::Or, c, {7}));
    add(bare(7, {boxphi, diapsi, p}, Rule::Weak, p, {8}));
    add(bare(8, {boxphi, diapsi}, Rule::Box, boxphi, {9}));
    add(bare(9, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    add(bare(10, {npandchi, c}, Rule::Weak, npandchi, {11}));
    add(bare(11, {c}, Rule::Or, c, {12}));
    add(bare(12, {boxphi, diapsi}, Rule::Box, boxphi, {13}));
    add(bare(13, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    return pr;
}

/// Symmetric variant: the other conjunction is split first.
Proof corpus_pi_weak_2() {
    Formula phi = corpus_phi_x(), psi = corpus_psi_y(), c = corpus_chi();
    Formula ufx = unfold(phi), ufy = unfold(psi);
    Formula p = parse_formula("p"), np = parse_formula("~p");
    Formula pandchi = ufy.sub(), npandchi = ufx.sub();
    Formula boxphi = c.left(), diapsi = c.right();

    Proof pr;
    pr.system = ProofSystem::Nw;
    pr.root = 0;
    auto add = [&](ProofNode n) { pr.nodes[n.id] = std::move(n); };
    add(bare(0, {phi, psi}, Rule::Nu, phi, {1}));
    add(bare(1, {ufx, psi}, Rule::Nu, psi, {2}));
    add(bare(2, {ufx, ufy}, Rule::Box, ufy, {3}));
    add(bare(3, {npandchi, pandchi}, Rule::And, npandchi, {4, 10}));
    add(bare(4, {np, pandchi}, Rule::And, pandchi, {5, 6}));
    add(bare(5, {np, p}, Rule::Ax, std::nullopt, {}));
    add(bare(6, {np, c}, Rule::Or, c, {7}));
    add(bare(7, {np, boxphi, diapsi}, Rule::Weak, np, {8}));
    add(bare(8, {boxphi, diapsi}, Rule::Box, boxphi, {9}));
    add(bare(9, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    add(bare(10, {c, pandchi}, Rule::Weak, pandchi, {11}));
    add(bare(11, {c}, Rule::Or, c, {12}));
    add(bare(12, {boxphi, diapsi}, Rule::Box, boxphi, {13}));
    add(bare(13, {phi, psi}, Rule::Backedge, std::nullopt, {}, 0));
    return pr;
}

/// The annotated derivation as displayed: the left repeat discharged after an
/// annotation-shrinking step, the final repeat open (it cannot be discharged),
/// the rightmost branch elided as an open leaf.
Proof corpus_rho0(bool discharge_final = false) {
    Formula phi = corpus_phi_x(), psi = corpus_psi_y(), c = corpus_chi();
    Formula ufx = unfold(phi), ufy = unfold(psi);
    Formula p = parse_formula("p"), np = parse_formula("~p");
    Formula pandchi = ufy.sub(), npandchi = ufx.sub();
    Formula boxphi = c.left(), diapsi = c.right();
    Name dx{"x", 0}, dy{"y", 1};
    Annotation ax{dx}, ay{dy};

    Proof pr;
    pr.system = ProofSystem::Clo;
    pr.root = 0;
    auto add = [&](ProofNode n) { pr.nodes[n.id] = std::move(n); };
    add(node(0, {{phi, {}}, {psi, {}}}, Rule::Clo, AnnotatedFormula{phi, {}}, {1},
             std::nullopt, dx));
    add(node(1, {{ufx, ax}, {psi, {}}}, Rule::Clo, AnnotatedFormula{psi, {}}, {2},
             std::nullopt, dy));
    add(node(2, {{ufx, ax}, {ufy, ay}}, Rule::Box, AnnotatedFormula{ufy, ay}, {3}));
    add(node(3, {{npandchi, ax}, {pandchi, ay}}, Rule::And, AnnotatedFormula{pandchi, ay},
             {4, 11}));
    add(node(4, {{npandchi, ax}, {p, ay}}, Rule::And, AnnotatedFormula{npandchi, ax},
             {5, 6}));
    add(node(5, {{np, ax}, {p, ay}}, Rule::Ax, std::nullopt, {}));
    add(node(6, {{c, ax}, {p, ay}}, Rule::Or, AnnotatedFormula{c, ax}, {7}));
    add(node(7, {{boxphi, ax}, {diapsi, ax}, {p, ay}}, Rule::Weak, AnnotatedFormula{p, ay},
             {8}));
    add(node(8, {{boxphi, ax}, {diapsi, ax}}, Rule::Box, AnnotatedFormula{boxphi, ax}, {9}));
    add(node(9, {{phi, ax}, {psi, ax}}, Rule::Exp, std::nullopt, {10}));
    add(node(10, {{phi, ax}, {psi, {}}}, Rule::Discharge, std::nullopt, {}, 0, dx));
    add(node(11, {{npandchi, ax}, {c, ay}}, Rule::And, AnnotatedFormula{npandchi, ax},
             {12, 18}));
    add(node(12, {{np, ax}, {c, ay}}, Rule::Or, AnnotatedFormula{c, ay}, {13}));
    add(node(13, {{np, ax}, {boxphi, ay}, {diapsi, ay}}, Rule::Weak,
             AnnotatedFormula{np, ax}, {14}));
    add(node(14, {{boxphi, ay}, {diapsi, ay}}, Rule::Box, AnnotatedFormula{boxphi, ay},
             {15}));
    add(node(15, {{phi, ay}, {psi, ay}}, Rule::Nu, AnnotatedFormula{phi, ay}, {16}));
    add(node(16, {{ufx, ay}, {psi, ay}}, Rule::Exp, std::nullopt, {17}));
    if (discharge_final)
        add(node(17, {{ufx, {}}, {psi, ay}}, Rule::Discharge, std::nullopt, {}, 1, dy));
    else
        add(node(17, {{ufx, {}}, {psi, ay}}, Rule::Open, std::nullopt, {}));
    add(node(18, {{c, ax}, {c, ay}}, Rule::Open, std::nullopt, {}));
    return pr;
}

Proof corpus_nu_self() {
    Formula f = parse_formula("nu x. x");
    Name dx{"x", 0};
    Proof pr;
    pr.system = ProofSystem::Clo;
    pr.root = 0;
    pr.nodes[0] = node(0, {{f, {}}}, Rule::Clo, AnnotatedFormula{f, {}}, {1}, std::nullopt,
                       dx);
    pr.nodes[1] = node(1, {{f, {dx}}}, Rule::Discharge, std::nullopt, {}, 0, dx);
    return pr;
}

Proof corpus_mu_self() {
    Formula f = parse_formula("mu x. x");
    Proof pr;
    pr.system = ProofSystem::Nw;
    pr.root = 0;
    pr.nodes[0] = bare(0, {f}, Rule::Mu, f, {1});
    pr.nodes[1] = bare(1, {unfold(f)}, Rule::Backedge, std::nullopt, {}, 0);
    return pr;
}

Artifact make_artifact(const std::string& name) {
    Artifact a;
    a.name = name;
    if (name == "phi_x") {
        a.kind = "formula";
        a.formula = corpus_phi_x();
        a.expected = {{"one_state_countermodel", "found"}};
    } else if (name == "psi_y") {
        a.kind = "formula";
        a.formula = corpus_psi_y();
        a.expected = {{"one_state_countermodel", "found"}};
    } else if (name == "chi") {
        a.kind = "formula";
        a.formula = corpus_chi();
        a.expected = {{"valid_up_to_3_states", "no countermodel"}};
    } else if (name == "Phi") {
        a.kind = "sequent";
        a.sequent = corpus_Phi();
        a.expected = {{"check_clean", "clean"},
                      {"closure_size", "11"},
                      {"is_adisjunctive", "rejected"},
                      {"valid_up_to_3_states", "no countermodel"}};
    } else if (name == "pi") {
        a.kind = "nw-proof";
        a.proof = corpus_pi();
        a.expected = {{"check_nw", "accepted"}};
    } else if (name == "pi_weak_1") {
        a.kind = "nw-proof";
        a.proof = corpus_pi_weak_1();
        a.expected = {{"check_nw", "accepted"}};
    } else if (name == "pi_weak_2") {
        a.kind = "nw-proof";
        a.proof = corpus_pi_weak_2();
        a.expected = {{"check_nw", "accepted"}};
    } else if (name == "rho0") {
        a.kind = "clo-derivation";
        a.proof = corpus_rho0();
        a.expected = {{"check_clo", "rejected"}};
    } else if (name == "nu_self") {
        a.kind = "clo-derivation";
        a.proof = corpus_nu_self();
        a.expected = {{"check_clo", "accepted"}, {"translate_then_check_nw", "accepted"}};
    } else if (name == "mu_self") {
        a.kind = "nw-proof";
        a.proof = corpus_mu_self();
        a.expected = {{"check_nw", "rejected"}};
    } else {
        throw std::invalid_argument("unknown artifact '" + name + "'");
    }
    return a;
}

std::string evaluate(const Artifact& a, const std::string& op, const SuiteOptions& options) {
    if (op == "check_nw") {
        bool ok = options.stub_trace_accept ? check_nw_local(*a.proof).accepted
                                            : check_nw(*a.proof).accepted;
        return ok ? "accepted" : "rejected";
    }
    if (op == "check_clo")
        return check_clo(*a.proof, options.check).accepted ? "accepted" : "rejected";
    if (op == "translate_then_check_nw") {
        try {
            Proof nw = translate_clo_to_nw(*a.proof);
            bool ok = options.stub_trace_accept ? check_nw_local(nw).accepted
                                                : check_nw(nw).accepted;
            return ok ? "accepted" : "rejected";
        } catch (const std::exception&) {
            return "rejected";
        }
    }
    if (op == "check_clean")
        return check_clean(*a.sequent).clean ? "clean" : "not clean";
    if (op == "closure_size")
        return std::to_string(closure(*a.sequent).members.size());
    if (op == "is_adisjunctive") {
        Sequent s = a.sequent ? *a.sequent : Sequent({*a.formula});
        return is_adisjunctive(s).adisjunctive ? "adisjunctive" : "rejected";
    }
    if (op == "one_state_countermodel")
        return search_countermodel(*a.formula, 1).status == CountermodelStatus::Found
                   ? "found"
                   : "none";
    if (op == "valid_up_to_3_states") {
        Formula goal = a.formula ? *a.formula : [&] {
            const auto& fs = a.sequent->formulas();
            Formula g = fs.front();
            for (std::size_t i = 1; i < fs.size(); ++i) g = Formula::disj(g, fs[i]);
            return g;
        }();
        return search_countermodel(goal, 3).status == CountermodelStatus::Found
                   ? "countermodel"
                   : "no countermodel";
    }
    throw std::logic_error("unknown operation '" + op + "'");
}

bool has_diagnostic(const CloCheckResult& r, int node_id, const std::string& needle) {
    std::string prefix = "node " + std::to_string(node_id) + ":";
    for (const auto& d : r.diagnostics)
        if (d.rfind(prefix, 0) == 0 && d.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

std::string Artifact::payload_text() const {
    if (formula) return formula->str() + "\n";
    if (sequent) return sequent->str() + "\n";
    std::string text = proof_to_json_text(*proof);
    if (text.empty() || text.back() != '\n') text += '\n';
    return text;
}

const std::vector<std::string>& artifact_names() {
    static const std::vector<std::string> names = {
        "phi_x", "psi_y", "chi",  "Phi",     "pi",
        "rho0",  "pi_weak_1", "pi_weak_2", "nu_self", "mu_self"};
    return names;
}

Artifact get_artifact(const std::string& name) { return make_artifact(name); }

std::optional<Sequent> artifact_sequent(const std::string& name) {
    for (const auto& known : artifact_names())
        if (known == name) {
            Artifact a = get_artifact(name);
            if (a.sequent) return a.sequent;
            if (a.formula) return Sequent({*a.formula});
            return std::nullopt;
        }
    return std::nullopt;
}

bool SuiteReport::all_passed() const {
    for (const auto& item : items)
        if (!item.passed) return false;
    return true;
}

std::string SuiteReport::str() const {
    std::ostringstream out;
    for (const auto& item : items)
        out << (item.passed ? "PASS" : "FAIL") << "  " << item.name
            << (item.detail.empty() ? "" : "  [" + item.detail + "]") << "\n";
    out << (all_passed() ? "all checks passed" : "some checks FAILED") << "\n";
    return out.str();
}

SuiteReport run_paper_suite(const SuiteOptions& options) {
    using Thunk = std::function<SuiteItem()>;
    std::vector<Thunk> thunks;

    auto add = [&](std::string name, std::function<std::pair<bool, std::string>()> fn) {
        thunks.push_back([name = std::move(name), fn = std::move(fn)]() {
            SuiteItem item;
            item.name = name;
            try {
                auto [ok, detail] = fn();
                item.passed = ok;
                item.detail = std::move(detail);
            } catch (const std::exception& e) {
                item.passed = false;
                item.detail = std::string("error: ") + e.what();
            }
            return item;
        });
    };

    // unfolding shape of the two fixpoints
    add("the first fixpoint unfolds to a diamond conjunction", [] {
        Formula want =
            Formula::dia(Formula::conj(parse_formula("~p"), corpus_chi()));
        bool ok = unfold(corpus_phi_x()) == want;
        return std::make_pair(ok, unfold(corpus_phi_x()).str());
    });
    add("the second fixpoint unfolds to a box conjunction", [] {
        Formula want = Formula::box(Formula::conj(parse_formula("p"), corpus_chi()));
        bool ok = unfold(corpus_psi_y()) == want;
        return std::make_pair(ok, unfold(corpus_psi_y()).str());
    });
    add("the adisjunctivity witness is the inner disjunction", [] {
        AdisjunctivityVerdict v = is_adisjunctive(corpus_Phi());
        bool ok = !v.adisjunctive && v.disjunction && *v.disjunction == corpus_chi();
        return std::make_pair(ok, v.adisjunctive ? "adisjunctive" : "witness found");
    });

    // pinned verdicts of every artifact
    for (const auto& name : artifact_names()) {
        Artifact a = get_artifact(name);
        for (const auto& [op, want] : a.expected)
            add(name + ": " + op, [name, op, want, &options] {
                Artifact inner = get_artifact(name);
                std::string got = evaluate(inner, op, options);
                return std::make_pair(got == want, got);
            });
    }

    // fine-grained reproduction of the displayed annotated derivation
    add("the displayed axiom carries annotations and is reported", [&options] {
        CloCheckResult r = check_clo(corpus_rho0(), options.check);
        return std::make_pair(has_diagnostic(r, 5, "empty annotations"),
                              std::to_string(r.diagnostics.size()) + " diagnostics");
    });
    add("the fixpoint step on a foreign annotation is reported", [&options] {
        CloCheckResult r = check_clo(corpus_rho0(), options.check);
        return std::make_pair(has_diagnostic(r, 15, "not below variable 'x'"),
                              std::to_string(r.diagnostics.size()) + " diagnostics");
    });
    add("discharging the final repeat is rejected with a sequent mismatch", [&options] {
        CloCheckResult r = check_clo(corpus_rho0(/*discharge_final=*/true), options.check);
        return std::make_pair(has_diagnostic(r, 17, "discharge mismatch"),
                              std::to_string(r.diagnostics.size()) + " diagnostics");
    });
    add("a reordered annotation is rejected by the shrinking rule", [&options] {
        Formula f = parse_formula("nu x. nu y. (x & y)");
        Name dx{"x", 0}, dy{"y", 1};
        Proof pr;
        pr.system = ProofSystem::Clo;
        pr.root = 0;
        pr.nodes[0] = node(0, {{f, {dx, dy}}}, Rule::Exp, std::nullopt, {1});
        pr.nodes[1] = node(1, {{f, {dy, dx}}}, Rule::Ax, std::nullopt, {});
        CloCheckResult r = check_clo(pr, options.check);
        return std::make_pair(has_diagnostic(r, 0, "subword"), "checked");
    });
    add("a stale token is rejected by the discharge-introducing rule", [&options] {
        Formula f = parse_formula("nu x. (x & x)");
        Formula g = parse_formula("nu y. (y | y)");
        Name dx{"x", 0};
        Proof pr;
        pr.system = ProofSystem::Clo;
        pr.root = 0;
        pr.nodes[0] = node(0, {{f, {}}, {g, {dx}}}, Rule::Clo, AnnotatedFormula{f, {}}, {1},
                           std::nullopt, dx);
        pr.nodes[1] = node(1, {{unfold(f), {dx}}, {g, {dx}}}, Rule::Open, std::nullopt, {});
        CloCheckResult r = check_clo(pr, options.check);
        return std::make_pair(has_diagnostic(r, 0, "already appears"), "checked");
    });
    add("the cut rule stays disabled", [&options] {
        Formula p = parse_formula("p"), np = parse_formula("~p");
        Formula q = parse_formula("q"), nq = parse_formula("~q");
        Proof pr;
        pr.system = ProofSystem::Clo;
        pr.root = 0;
        pr.nodes[0] = bare(0, {p, np}, Rule::Cut, std::nullopt, {1, 3});
        pr.nodes[1] = bare(1, {p, np, q}, Rule::Weak, q, {2});
        pr.nodes[2] = bare(2, {p, np}, Rule::Ax, std::nullopt, {});
        pr.nodes[3] = bare(3, {p, np, nq}, Rule::Weak, nq, {4});
        pr.nodes[4] = bare(4, {p, np}, Rule::Ax, std::nullopt, {});
        CloCheckResult r = check_clo(pr, options.check);
        return std::make_pair(!r.accepted, r.accepted ? "accepted" : "rejected");
    });

    SuiteReport report;
    unsigned workers = 1;
    if (const char* env = std::getenv("MUCYCLO_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v > 1) workers = static_cast<unsigned>(v);
    }
    if (workers <= 1) {
        for (auto& t : thunks) report.items.push_back(t());
    } else {
        std::vector<std::future<SuiteItem>> futures;
        futures.reserve(thunks.size());
        for (auto& t : thunks) futures.push_back(std::async(std::launch::async, t));
        for (auto& f : futures) report.items.push_back(f.get());
    }
    return report;
}

}  // namespace mucyclo
