#include "support.hh"

#include <casp/cdcl.hh>
#include <casp/compile.hh>
#include <casp/semantics.hh>

#include <doctest.h>

using namespace Casp;

namespace {

//! Solutions of the compiled nogoods projected to the program atoms.
auto models(GroundProgram const &prg) -> std::set<BoolAssignment> {
    auto compiled = completion_nogoods(prg);
    Solver solver{compiled.num_atoms};
    std::set<BoolAssignment> out;
    for (auto const &ng : compiled.nogoods) {
        solver.add_nogood(ng);
    }
    solver.solve([&](Solver &s) {
        auto m = s.model();
        m.resize(prg.num_atoms());
        out.insert(m);
        return true;
    });
    return out;
}

//! Brute-force solutions of a nogood set over n atoms.
auto brute(std::vector<Nogood> const &ngs, std::size_t n) -> std::set<BoolAssignment> {
    std::set<BoolAssignment> out;
    for (std::uint32_t bits = 0; bits < (1U << n); ++bits) {
        BoolAssignment a(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = ((bits >> i) & 1U) != 0;
        }
        bool ok = std::none_of(ngs.begin(), ngs.end(), [&](Nogood const &ng) {
            return std::all_of(ng.begin(), ng.end(), [&](Literal l) { return a[l.atom()] == l.sign(); });
        });
        if (ok) {
            out.insert(a);
        }
    }
    return out;
}

auto named(GroundProgram const &prg, std::set<BoolAssignment> const &ms) -> std::set<std::set<std::string>> {
    std::set<std::set<std::string>> out;
    for (auto const &m : ms) {
        std::set<std::string> atoms;
        for (atom_t a = 0; a < prg.num_atoms(); ++a) {
            if (m[a]) {
                atoms.insert(prg.atom_name(a));
            }
        }
        out.insert(atoms);
    }
    return out;
}

} // namespace

TEST_CASE("fact") {
    auto prg = ground_text("a.");
    auto compiled = completion_nogoods(prg);
    auto a = *prg.find_atom("a");
    auto fa = Nogood::make({Literal::neg(a)});
    CHECK(std::find(compiled.nogoods.begin(), compiled.nogoods.end(), *fa) != compiled.nogoods.end());
    CHECK(named(prg, models(prg)) == std::set<std::set<std::string>>{{"a"}});
}

TEST_CASE("single rule is an equivalence") {
    auto prg = ground_text("{b}. a :- b.");
    CHECK(named(prg, models(prg)) == std::set<std::set<std::string>>{{}, {"a", "b"}});
}

TEST_CASE("nogood solutions") {
    auto a = Literal::pos(0);
    auto b = Literal::pos(1);
    std::vector<Nogood> ngs{*Nogood::make({a, b}), *Nogood::make({~a, ~b})};
    auto sols = brute(ngs, 2);
    CHECK(sols == std::set<BoolAssignment>{{true, false}, {false, true}});
    Solver solver{2};
    for (auto const &ng : ngs) {
        solver.add_nogood(ng);
    }
    std::set<BoolAssignment> found;
    solver.solve([&](Solver &s) {
        found.insert(s.model());
        return true;
    });
    CHECK(found == sols);
}

TEST_CASE("cardinality") {
    auto exactly = ground_text("1{a;b}1.");
    CHECK(named(exactly, models(exactly)) == std::set<std::set<std::string>>{{"a"}, {"b"}});
    auto vacuous = ground_text("0{a}1.");
    CHECK(models(vacuous).size() == 2);
    auto team = ground_text("person(adam;smith;lea;john). 1{team(A,B) : person(B) : B != A}1 :- person(A), A == adam.");
    CHECK(models(team).size() == 3);
    auto two = ground_text("2{a;b;c;d}3 :- e. {e}.");
    CHECK(models(two).size() == 1 + 6 + 4);
    CHECK_THROWS_AS(static_cast<void>(completion_nogoods(ground_text("2{a;b}1."))), GroundError);
    auto none = ground_text("3{a;b}3.");
    CHECK(models(none).empty());
}

TEST_CASE("body atoms are shared") {
    auto prg = ground_text("{c;d}. a :- c, d. b :- c, d. e :- d, c. f :- c, not d.");
    auto compiled = completion_nogoods(prg);
    CHECK(compiled.num_body_atoms == 2);
}

TEST_CASE("completion matches answer sets on random tight programs") {
    std::mt19937 rng{11};
    Test::ProgramShape shape;
    shape.vars = 0;
    shape.atoms = 8;
    shape.rules = 9;
    int checked = 0;
    for (int i = 0; i < 400; ++i) {
        auto prg = ground_text(Test::random_program(rng, shape));
        tightness_check(prg);
        auto expected = brute_force_answer_sets(prg);
        auto got = models(prg);
        CHECK(got == expected);
        ++checked;
    }
    CHECK(checked == 400);
}

TEST_CASE("solutions of compiled nogoods match brute force") {
    std::mt19937 rng{5};
    Test::ProgramShape shape;
    shape.vars = 0;
    shape.atoms = 5;
    shape.rules = 5;
    for (int i = 0; i < 100; ++i) {
        auto prg = ground_text(Test::random_program(rng, shape));
        auto compiled = completion_nogoods(prg);
        if (compiled.num_atoms > 14) {
            continue;
        }
        Solver solver{compiled.num_atoms};
        for (auto const &ng : compiled.nogoods) {
            solver.add_nogood(ng);
        }
        std::set<BoolAssignment> found;
        solver.solve([&](Solver &s) {
            found.insert(s.model());
            return true;
        });
        CHECK(found == brute(compiled.nogoods, compiled.num_atoms));
    }
}
