#include "support.hh"

#include <casp/frontend.hh>

#include <doctest.h>

using namespace Casp;
using Test::HOUSE;

namespace {

auto lines(std::string const &text) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::string line;
    for (char c : text) {
        if (c == '\n') {
            out.push_back(line);
            line.clear();
        }
        else {
            line += c;
        }
    }
    return out;
}

} // namespace

TEST_CASE("parse domain and facts") {
    auto prg = parse("$domain(0..10). a.");
    REQUIRE(prg.domains.size() == 1);
    CHECK(prg.domains[0].lower == 0);
    CHECK(prg.domains[0].upper == 10);
    REQUIRE(prg.rules.size() == 1);
    CHECK(std::get<Ast::Atom>(prg.rules[0].head).term.to_string() == "a");
}

TEST_CASE("parse constraint head") {
    auto prg = parse("work(A) $+ work(B) $> 6 :- team(A,B).");
    REQUIRE(prg.rules.size() == 1);
    auto const &head = std::get<Ast::TheoryAtom>(prg.rules[0].head);
    CHECK(head.rel == Relation::GT);
    CHECK(head.lhs.kind == Ast::TheoryExpr::Kind::Add);
    CHECK(prg.rules[0].body.size() == 1);
}

TEST_CASE("parse errors carry positions") {
    try {
        static_cast<void>(parse("a :- b\nc."));
        FAIL("expected a parse error");
    }
    catch (ParseError const &e) {
        CHECK(e.line() == 2);
        CHECK(e.column() == 1);
    }
    CHECK_THROWS_AS(static_cast<void>(parse("a $foo b.")), ParseError);
    CHECK_THROWS_AS(static_cast<void>(parse("a :- b ? c.")), ParseError);
    CHECK_THROWS_AS(static_cast<void>(parse("%* open")), ParseError);
}

TEST_CASE("comments") {
    auto prg = parse("% line\na. %* block\n b. *% c.");
    CHECK(prg.rules.size() == 2);
}

TEST_CASE("ranges and rules") {
    auto g = ground_text("p(1..2). q(X) :- p(X).");
    CHECK(g.to_string() == "p(1).\np(2).\nq(1).\nq(2).\n");
}

TEST_CASE("grounding of the team rule") {
    auto g = ground_text(HOUSE);
    auto text = g.to_string();
    auto ls = lines(text);
    std::vector<std::string> gt6;
    for (auto const &l : ls) {
        if (l.find("$>6") != std::string::npos) {
            gt6.push_back(l);
        }
    }
    CHECK(gt6 == std::vector<std::string>{
                     ":- team(adam,smith), not work(adam)$+work(smith)$>6.",
                     ":- team(adam,lea), not work(adam)$+work(lea)$>6.",
                     ":- team(adam,john), not work(adam)$+work(john)$>6.",
                 });
    REQUIRE(g.counts.size() == 1);
    auto names = g.names();
    std::vector<std::string> elems;
    for (auto const &e : g.counts[0].elements) {
        elems.push_back(e.to_string(names));
    }
    CHECK(elems == std::vector<std::string>{"work(adam)$==8", "work(smith)$==8", "work(lea)$==8",
                                            "work(john)$==8"});
    CHECK(g.counts[0].bound.to_string(names) == "fulltime");
    CHECK(g.counts[0].rel == Relation::EQ);
    REQUIRE(g.objectives.size() == 1);
    CHECK(g.objectives[0].sense == Sense::Maximize);
    CHECK(g.objectives[0].terms.size() == 4);
    REQUIRE(g.choices.size() == 2);
    CHECK(g.choices[0].heads.size() == 3);
    CHECK(g.choices[0].lower == 1);
    CHECK(g.choices[0].upper == 1);
    CHECK_NOTHROW(tightness_check(g));
}

TEST_CASE("ground programs round-trip") {
    auto g = ground_text(HOUSE);
    auto again = ground_text(g.to_string());
    CHECK(again.to_string() == g.to_string());
    CHECK(again.num_atoms() == g.num_atoms());
    CHECK(again.gamma.size() == g.gamma.size());
}

TEST_CASE("complement constraints share an atom") {
    auto g = ground_text("$domain(0..3). a :- x $< 2. b :- x $>= 2.");
    CHECK(g.gamma.size() == 1);
    REQUIRE(g.rules.size() == 2);
    CHECK(g.rules[0].body[0] == ~g.rules[1].body[0]);
}

TEST_CASE("theory heads move to the body") {
    auto g = ground_text("$domain(0..3). x $> 1 :- a. {a}.");
    REQUIRE(g.rules.size() == 1);
    CHECK_FALSE(g.rules[0].head.has_value());
    CHECK(g.rules[0].body.size() == 2);
    CHECK(g.to_string() == "$domain(0..3).\n:- a, not x$>1.\n{a}.\n");
}

TEST_CASE("certain atoms are simplified away") {
    auto g = ground_text("p(1). q :- p(1), not r. r :- not q.");
    CHECK(g.to_string() == "p(1).\nq :- not r.\nr :- not q.\n");
    auto h = ground_text("p. q :- not p. s :- p.");
    CHECK(h.to_string() == "p.\ns.\n");
}

TEST_CASE("constant constraints are evaluated") {
    auto g = ground_text("a :- 1 $< 2. b :- 2 $< 1. c :- not 2 $< 1.");
    CHECK(g.to_string() == "a.\nc.\n");
    CHECK(g.gamma.size() == 0);
}

TEST_CASE("instances multiply over binding domains") {
    auto g = ground_text("n(1..4). m(a;b;c). r(X,Y) :- n(X), m(Y), X != 2.");
    std::size_t count = 0;
    for (auto const &rule : g.rules) {
        if (rule.head && g.atom_name(*rule.head).starts_with("r(")) {
            ++count;
        }
    }
    CHECK(count == 3 * 3);
}

TEST_CASE("distinct and pools") {
    auto g = ground_text("$domain(1..3). c(1;2;3). $distinct{v(C) : c(C)}. $distinct{y}.");
    REQUIRE(g.distincts.size() == 1);
    CHECK(g.distincts[0].exprs.size() == 3);
    CHECK(g.to_string() == "$domain(1..3).\nc(1).\nc(2).\nc(3).\n$distinct{v(1),v(2),v(3)}.\n");
}

TEST_CASE("ground errors") {
    CHECK_THROWS_AS(static_cast<void>(ground_text("p(X).")), GroundError);
    CHECK_THROWS_AS(static_cast<void>(ground_text("p(X) :- not q(X).")), GroundError);
    CHECK_THROWS_AS(static_cast<void>(ground_text("{a}. $distinct{x;y} :- a.")), GroundError);
    CHECK_THROWS_AS(static_cast<void>(ground_text("p(1..100000000).")), GroundError);
    CHECK_THROWS_AS(static_cast<void>(ground_text("$domain(0..1). $domain(0..2).")), GroundError);
}

TEST_CASE("undeclared domain warns") {
    std::vector<std::string> warnings;
    auto g = ground_text("a :- x $> 3.", &warnings);
    CHECK(warnings.size() == 1);
    CHECK(g.domain.lower == -(val_t{1} << 20));
    CHECK(g.domain.upper == val_t{1} << 20);
}

TEST_CASE("tightness") {
    auto loop = ground_text("{c}. a :- c. a :- b. b :- a.");
    try {
        tightness_check(loop);
        FAIL("expected a tightness error");
    }
    catch (GroundError const &e) {
        std::string msg = e.what();
        CHECK(msg.find('a') != std::string::npos);
        CHECK(msg.find('b') != std::string::npos);
    }
    CHECK_NOTHROW(tightness_check(ground_text("a :- not b. b :- not a.")));
}

TEST_CASE("grounding is idempotent on random programs") {
    std::mt19937 rng{7};
    for (int i = 0; i < 300; ++i) {
        auto g = ground_text(Test::random_program(rng, {}));
        CHECK(ground_text(g.to_string()).to_string() == g.to_string());
    }
}
