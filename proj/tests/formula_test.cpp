#include "mucyclo/formula.hpp"

#include <random>

#include "doctest.h"

using namespace mucyclo;

namespace {

const char* kPhiX = "nu x. <>(~p & ([]x | <> nu y. [](p & ([]x | <>y))))";

Formula phi_x() { return parse_formula(kPhiX); }

// nu y.psi as a closed formula: substitute x in the inner binder of phi_x.
Formula psi_y() {
    Formula f = phi_x();
    // inner binder: body of phi_x is <>(~p & ([]x | <>(nu y. ...)))
    const Formula& and_f = f.body().sub();
    const Formula& or_f = and_f.right();
    const Formula& inner = or_f.right().sub();
    REQUIRE(inner.kind() == FormulaKind::Nu);
    return substitute(inner, "x", f);
}

Formula chi() { return Formula::disj(Formula::box(phi_x()), Formula::dia(psi_y())); }

Sequent Phi() { return Sequent({phi_x(), psi_y()}); }

// Independent closure oracle: naive iteration to fixpoint, recomputing the
// full one-step image of the whole set each round.
std::set<Formula> closure_oracle(const Sequent& s) {
    std::set<Formula> cur(s.formulas().begin(), s.formulas().end());
    while (true) {
        std::set<Formula> next = cur;
        for (const auto& f : cur) {
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
        if (next == cur) return cur;
        cur = std::move(next);
    }
}

// Small random closed formula generator for property tests.
Formula random_formula(std::mt19937& rng, int depth, std::vector<std::string>& scope, int& binder_counter) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    switch (pick(rng)) {
        case 0:
            return Formula::lit(rng() % 2 ? "p" : "q", rng() % 2 == 0);
        case 1:
            if (!scope.empty()) return Formula::var(scope[rng() % scope.size()]);
            return Formula::lit("p", false);
        case 2:
            return Formula::disj(random_formula(rng, depth - 1, scope, binder_counter),
                                 random_formula(rng, depth - 1, scope, binder_counter));
        case 3:
            return Formula::conj(random_formula(rng, depth - 1, scope, binder_counter),
                                 random_formula(rng, depth - 1, scope, binder_counter));
        case 4:
            return Formula::dia(random_formula(rng, depth - 1, scope, binder_counter));
        case 5:
            return Formula::box(random_formula(rng, depth - 1, scope, binder_counter));
        default: {
            std::string v = "v" + std::to_string(binder_counter++);
            scope.push_back(v);
            Formula body = random_formula(rng, depth - 1, scope, binder_counter);
            scope.pop_back();
            return pick(rng) % 2 ? Formula::mu(v, body) : Formula::nu(v, body);
        }
    }
}

Sequent random_sequent(std::mt19937& rng) {
    int binder_counter = 0;
    std::vector<std::string> scope;
    std::vector<Formula> fs;
    int n = 1 + rng() % 3;
    for (int i = 0; i < n; ++i) fs.push_back(random_formula(rng, 3, scope, binder_counter));
    return Sequent(std::move(fs));
}

}  // namespace

TEST_CASE("parse basics") {
    Formula f = parse_formula("p | ~p");
    CHECK(f.kind() == FormulaKind::Or);
    CHECK(f.left() == Formula::lit("p", false));
    CHECK(f.right() == Formula::lit("p", true));

    Formula self = parse_formula("mu x. x");
    CHECK(self == Formula::mu("x", Formula::var("x")));

    Formula phi = phi_x();
    CHECK(phi.kind() == FormulaKind::Nu);
    CHECK(phi.name() == "x");
    CHECK(phi.body().kind() == FormulaKind::Dia);
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse_formula("p |"), ParseError);
    CHECK_THROWS_AS(parse_formula("(p"), ParseError);
    CHECK_THROWS_AS(parse_formula("p & nu p. p"), ParseError);
    CHECK_THROWS_AS(parse_formula("mu x. ~x"), ParseError);

    // rebinding parses (nearest binder wins); incompatible binders are a
    // cleanliness reject, not a parse error
    Formula shadows = parse_formula("mu x. mu x. x");
    CHECK_FALSE(check_clean(Sequent({shadows})).clean);
}

TEST_CASE("print-parse round trip") {
    std::mt19937 rng(20240817);
    for (int i = 0; i < 300; ++i) {
        int counter = 0;
        std::vector<std::string> scope;
        Formula f = random_formula(rng, 4, scope, counter);
        CAPTURE(f.str());
        CHECK(parse_formula(f.str()) == f);
    }
    CHECK(parse_formula(phi_x().str()) == phi_x());
}

TEST_CASE("cleanliness") {
    CHECK(check_clean(Phi()).clean);
    CHECK(check_clean(parse_sequent("nu x. x")).clean);

    // two incompatible binders of x
    Sequent clash({parse_formula("nu x. x | p"), parse_formula("nu x. x | q")});
    auto v = check_clean(clash);
    CHECK_FALSE(v.clean);
    CHECK(v.offending_variable == "x");
}

TEST_CASE("subsumption order") {
    SubsumptionOrder ord = subsumption_order(Phi());
    CHECK(ord.leq("x", "y"));
    CHECK_FALSE(ord.leq("y", "x"));
    CHECK(ord.leq("x", "x"));
    CHECK(ord.leq("y", "y"));

    SubsumptionOrder single = subsumption_order(parse_sequent("nu x. x"));
    CHECK(single.leq("x", "x"));
    CHECK(single.variables().size() == 1);

    SubsumptionOrder ab = subsumption_order(parse_sequent("mu a. nu b. (a | b)"));
    CHECK(ab.leq("a", "b"));
    CHECK_FALSE(ab.leq("b", "a"));
}

TEST_CASE("unfolding identities from the Phi family") {
    Formula expected_phi_unf = Formula::dia(Formula::conj(Formula::lit("p", true), chi()));
    CHECK(unfold(phi_x()) == expected_phi_unf);

    Formula expected_psi_unf = Formula::box(Formula::conj(Formula::lit("p", false), chi()));
    CHECK(unfold(psi_y()) == expected_psi_unf);

    Formula self = parse_formula("nu x. x");
    CHECK(unfold(self) == self);

    CHECK_THROWS(unfold(parse_formula("p | q")));
}

TEST_CASE("closure") {
    ClosureSet c1 = closure(parse_sequent("nu x. x"));
    CHECK(c1.members.size() == 1);

    ClosureSet c2 = closure(parse_sequent("p | q"));
    CHECK(c2.members == std::set<Formula>{parse_formula("p | q"), parse_formula("p"),
                                          parse_formula("q")});

    ClosureSet cphi = closure(Phi());
    CHECK(cphi.members.size() == 11);
    std::set<Formula> expected = {
        phi_x(),
        unfold(phi_x()),
        Formula::conj(Formula::lit("p", true), chi()),
        Formula::lit("p", true),
        chi(),
        Formula::box(phi_x()),
        Formula::dia(psi_y()),
        psi_y(),
        unfold(psi_y()),
        Formula::conj(Formula::lit("p", false), chi()),
        Formula::lit("p", false),
    };
    CHECK(cphi.members == expected);
}

TEST_CASE("closure worklist agrees with naive oracle on random sequents") {
    std::mt19937 rng(991);
    int checked = 0;
    while (checked < 100) {
        Sequent s = random_sequent(rng);
        ClosureSet c = closure(s);
        if (c.members.size() > 200) continue;  // keep the oracle cheap
        CHECK(c.members == closure_oracle(s));
        ++checked;
    }
}

TEST_CASE("unfold stays in the generating closure") {
    ClosureSet c = closure(Phi());
    for (const auto& f : c.members)
        if (f.is_fixpoint()) CHECK(c.contains(unfold(f)));
}

TEST_CASE("diamond sequent") {
    CHECK(diamond_sequent(Sequent()) == Sequent());
    CHECK(diamond_sequent(parse_sequent("p")) == parse_sequent("<>p"));
    CHECK(diamond_sequent(Phi()) ==
          Sequent({Formula::dia(phi_x()), Formula::dia(psi_y())}));
}

TEST_CASE("negate") {
    CHECK(negate(parse_formula("p")) == parse_formula("~p"));
    CHECK(negate(parse_formula("nu x. <>x")) == parse_formula("mu x. []x"));
    CHECK(negate(negate(phi_x())) == phi_x());

    std::mt19937 rng(7);
    for (int i = 0; i < 100; ++i) {
        int counter = 0;
        std::vector<std::string> scope;
        Formula f = random_formula(rng, 4, scope, counter);
        CHECK(negate(negate(f)) == f);
    }
}

TEST_CASE("negate maps closures bijectively") {
    std::mt19937 rng(13);
    for (int i = 0; i < 50; ++i) {
        Sequent s = random_sequent(rng);
        ClosureSet c = closure(s);
        if (c.members.size() > 100) continue;
        std::vector<Formula> negs;
        for (const auto& f : s.formulas()) negs.push_back(negate(f));
        ClosureSet cn = closure(Sequent(std::move(negs)));
        std::set<Formula> image;
        for (const auto& f : c.members) image.insert(negate(f));
        CHECK(image == cn.members);
    }
}

TEST_CASE("subsumption order is a partial order on clean sequents") {
    std::mt19937 rng(23);
    int checked = 0;
    while (checked < 60) {
        Sequent s = random_sequent(rng);
        if (!check_clean(s).clean) continue;
        SubsumptionOrder ord = subsumption_order(s);
        for (const auto& x : ord.variables()) {
            CHECK(ord.leq(x, x));
            for (const auto& y : ord.variables()) {
                if (x != y && ord.leq(x, y)) CHECK_FALSE(ord.leq(y, x));
                for (const auto& z : ord.variables())
                    if (ord.leq(x, y) && ord.leq(y, z)) CHECK(ord.leq(x, z));
            }
        }
        ++checked;
    }
}

TEST_CASE("adisjunctivity") {
    auto v = is_adisjunctive(Phi());
    CHECK_FALSE(v.adisjunctive);
    REQUIRE(v.nu_formula.has_value());
    REQUIRE(v.disjunction.has_value());
    CHECK(*v.nu_formula == phi_x());
    CHECK(*v.disjunction == chi());

    CHECK(is_adisjunctive(parse_sequent("nu x. <>x")).adisjunctive);
    CHECK(is_adisjunctive(parse_sequent("nu x. (p | <>x)")).adisjunctive);
}
