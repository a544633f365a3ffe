#include <casp/space.hh>

#include <doctest.h>

#include <algorithm>
#include <random>
#include <variant>

using namespace Casp;

namespace {

using Any = std::variant<ArithConstraint, CountConstraint, DistinctConstraint>;

auto var(var_t v) -> Expr { return Expr::variable(v); }
auto num(val_t v) -> Expr { return Expr::constant(v); }

auto holds(Any const &c, std::span<val_t const> values) -> bool {
    if (auto const *a = std::get_if<ArithConstraint>(&c)) {
        return a->evaluate(values);
    }
    if (auto const *k = std::get_if<CountConstraint>(&c)) {
        val_t n = 0;
        for (auto const &e : k->elements) {
            n += e.evaluate(values) ? 1 : 0;
        }
        return Casp::holds(n, k->rel, k->bound.evaluate(values));
    }
    auto const &d = std::get<DistinctConstraint>(c);
    for (std::size_t i = 0; i < d.exprs.size(); ++i) {
        for (std::size_t j = i + 1; j < d.exprs.size(); ++j) {
            if (d.exprs[i].evaluate(values) == d.exprs[j].evaluate(values)) {
                return false;
            }
        }
    }
    return true;
}

void post(Space &s, Any const &c) {
    std::visit([&](auto const &x) { s.post(x); }, c);
}

auto random_expr(std::mt19937 &rng, std::size_t vars, int depth) -> Expr {
    auto pick = [&](unsigned n) { return rng() % n; };
    if (depth == 0 || pick(3) == 0) {
        return pick(4) == 0 ? num(static_cast<val_t>(pick(7)) - 2) : var(static_cast<var_t>(pick(vars)));
    }
    switch (pick(5)) {
        case 0: return Expr::add({random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)});
        case 1: return Expr::sub(random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1));
        case 2: return Expr::mul({random_expr(rng, vars, depth - 1), random_expr(rng, vars, depth - 1)});
        case 3: return Expr::neg(random_expr(rng, vars, depth - 1));
        default: return Expr::abs(random_expr(rng, vars, depth - 1));
    }
}

auto random_arith(std::mt19937 &rng, std::size_t vars) -> ArithConstraint {
    auto rel = static_cast<Relation>(rng() % 6);
    return {random_expr(rng, vars, 2), rel, random_expr(rng, vars, 1)};
}

auto random_any(std::mt19937 &rng, std::size_t vars) -> Any {
    switch (rng() % 6) {
        case 0: {
            CountConstraint c;
            auto n = 1 + rng() % 3;
            for (unsigned i = 0; i < n; ++i) {
                c.elements.push_back(random_arith(rng, vars));
            }
            c.rel = static_cast<Relation>(rng() % 6);
            c.bound = rng() % 2 == 0 ? var(static_cast<var_t>(rng() % vars)) : num(static_cast<val_t>(rng() % 3));
            return c;
        }
        case 1: {
            DistinctConstraint d;
            auto n = 2 + rng() % 2;
            for (unsigned i = 0; i < n; ++i) {
                d.exprs.push_back(rng() % 3 == 0 ? random_expr(rng, vars, 1) : var(static_cast<var_t>(rng() % vars)));
            }
            return d;
        }
        default: return random_arith(rng, vars);
    }
}

//! Calls f on every assignment inside the current domains.
template <class F> void each_assignment(std::vector<Domain> const &doms, F const &f) {
    std::vector<std::vector<val_t>> values;
    for (auto const &d : doms) {
        values.push_back(d.values());
        if (values.back().empty()) {
            return;
        }
    }
    std::vector<std::size_t> idx(doms.size(), 0);
    std::vector<val_t> a(doms.size());
    for (;;) {
        for (std::size_t i = 0; i < doms.size(); ++i) {
            a[i] = values[i][idx[i]];
        }
        f(std::span<val_t const>{a});
        std::size_t i = 0;
        while (i < idx.size() && ++idx[i] == values[i].size()) {
            idx[i++] = 0;
        }
        if (i == idx.size()) {
            return;
        }
    }
}

auto subset(Domain const &a, Domain const &b) -> bool {
    auto c = a;
    c.intersect(b);
    return c == a;
}

} // namespace

TEST_CASE("posting and propagation") {
    SUBCASE("fixing a variable") {
        Space s{1, Domain{0, 10}};
        s.post(ArithConstraint{var(0), Relation::EQ, num(3)});
        CHECK(s.propagate());
        CHECK(s.domain(0) == Domain{3, 3});
    }
    SUBCASE("equal and differ by one") {
        Space s{2, Domain{0, 10}};
        s.post(ArithConstraint{var(0), Relation::EQ, var(1)});
        CHECK(s.propagate());
        s.post(ArithConstraint{Expr::sub(var(0), var(1)), Relation::EQ, num(1)});
        CHECK_FALSE(s.propagate());
        CHECK(s.failed());
    }
    SUBCASE("square bound") {
        Space s{1, Domain{1, 100}};
        s.post(ArithConstraint{Expr::mul({var(0), var(0)}), Relation::GE, num(25)});
        CHECK(s.propagate());
        CHECK(s.domain(0) == Domain{5, 100});
    }
    SUBCASE("sum projection") {
        Space s{2, Domain{0, 10}};
        s.narrow(1, {0, 0});
        s.post(ArithConstraint{Expr::add({var(0), var(1)}), Relation::GT, num(6)});
        CHECK(s.propagate());
        CHECK(s.domain(0) == Domain{7, 10});
    }
    SUBCASE("distinct value elimination") {
        Space s{3, Domain{1, 3}};
        s.narrow(0, {1, 1});
        s.post(DistinctConstraint{{var(0), var(1), var(2)}});
        CHECK(s.propagate());
        CHECK(s.domain(1) == Domain{2, 3});
        CHECK(s.domain(2) == Domain{2, 3});
    }
    SUBCASE("count bound") {
        Space s{5, Domain{0, 10}};
        CountConstraint c;
        for (var_t v = 0; v < 4; ++v) {
            c.elements.push_back({var(v), Relation::EQ, num(8)});
        }
        c.bound = var(4);
        s.post(c);
        CHECK(s.propagate());
        CHECK(s.domain(4) == Domain{0, 4});
    }
    SUBCASE("count forcing") {
        Space s{3, Domain{0, 10}};
        CountConstraint c;
        c.elements.push_back({var(0), Relation::EQ, num(8)});
        c.elements.push_back({var(1), Relation::EQ, num(8)});
        c.rel = Relation::GE;
        c.bound = num(2);
        s.post(c);
        CHECK(s.propagate());
        CHECK(s.domain(0) == Domain{8, 8});
        CHECK(s.domain(1) == Domain{8, 8});
    }
    SUBCASE("holes from not equal") {
        Space s{1, Domain{0, 1000}};
        s.post(ArithConstraint{Expr::mul({num(2), var(0)}), Relation::NE, num(10)});
        CHECK(s.propagate());
        CHECK_FALSE(s.domain(0).contains(5));
        CHECK(s.domain(0).size() == 1000);
    }
    SUBCASE("unknown variable") {
        Space s{1, Domain{0, 1}};
        CHECK_THROWS_AS(s.post(ArithConstraint{var(3), Relation::EQ, num(0)}), InternalError);
    }
}

TEST_CASE("entailment") {
    Space s{2, Domain{0, 10}};
    s.post(ArithConstraint{var(0), Relation::EQ, num(0)});
    REQUIRE(s.propagate());
    CHECK(s.entail(ArithConstraint{Expr::sub(var(0), var(1)), Relation::EQ, num(1)}) == Truth::False);
    CHECK(s.entail(ArithConstraint{var(1), Relation::LE, num(10)}) == Truth::True);
    CHECK(s.entail(ArithConstraint{var(1), Relation::EQ, num(5)}) == Truth::Unknown);

    Space t{2, Domain{0, 10}};
    t.post(ArithConstraint{var(0), Relation::EQ, var(1)});
    REQUIRE(t.propagate());
    auto c = ArithConstraint{Expr::sub(var(0), var(1)), Relation::EQ, num(1)};
    CHECK(t.entail(c) == Truth::Unknown);
    CHECK(t.probe_entail(c) == Truth::False);
    CHECK(t.probe_entail(c.complement()) == Truth::True);
}

TEST_CASE("rebuild") {
    Space base{2, Domain{0, 10}};
    std::size_t counter = 0;
    auto empty = rebuild({}, base, &counter);
    CHECK_FALSE(empty.failed());
    CHECK(empty.domain(0) == Domain{0, 10});
    CHECK(counter == 0);
    auto bad = rebuild({{var(0), Relation::EQ, var(1)}, {Expr::sub(var(0), var(1)), Relation::EQ, num(1)}}, base,
                       &counter);
    CHECK(bad.failed());
    CHECK(counter == 1);
}

TEST_CASE("search") {
    SUBCASE("minimum value first") {
        Space s{1, Domain{1, 100}};
        s.post(ArithConstraint{Expr::mul({var(0), var(0)}), Relation::GE, num(25)});
        auto sol = search(s);
        REQUIRE(sol);
        CHECK((*sol)[0] == 5);
    }
    SUBCASE("single value") {
        auto sol = search(Space{1, Domain{0, 0}});
        REQUIRE(sol);
        CHECK((*sol)[0] == 0);
    }
    SUBCASE("pigeonhole") {
        Space s{3, Domain{1, 2}};
        s.post(DistinctConstraint{{var(0), var(1), var(2)}});
        CHECK_FALSE(search(s));
    }
    SUBCASE("deadline") {
        Space s{12, Domain{0, 11}};
        SearchLimits limits{std::chrono::steady_clock::now()};
        std::vector<Expr> vs;
        for (var_t v = 0; v < 12; ++v) {
            vs.push_back(Expr::mul({num(2), var(v)}));
        }
        s.post(ArithConstraint{Expr::add(vs), Relation::EQ, num(101)});
        CHECK_THROWS_AS(static_cast<void>(search(s, limits)), Timeout);
    }
}

TEST_CASE("branch and bound") {
    SUBCASE("minimize square") {
        Space s{1, Domain{1, 100}};
        s.post(ArithConstraint{Expr::mul({var(0), var(0)}), Relation::GE, num(25)});
        auto sol = branch_and_bound(s, {{Sense::Minimize, var(0)}});
        REQUIRE(sol);
        CHECK((*sol)[0] == 5);
    }
    SUBCASE("fixed") {
        auto sol = branch_and_bound(Space{1, Domain{3, 3}}, {{Sense::Minimize, var(0)}});
        REQUIRE(sol);
        CHECK((*sol)[0] == 3);
    }
    SUBCASE("lexicographic") {
        Space s{2, Domain{0, 5}};
        s.post(ArithConstraint{Expr::add({var(0), var(1)}), Relation::LE, num(6)});
        auto sol = branch_and_bound(s, {{Sense::Maximize, var(0)}, {Sense::Maximize, var(1)}});
        REQUIRE(sol);
        CHECK((*sol)[0] == 5);
        CHECK((*sol)[1] == 1);
    }
    SUBCASE("lex bound propagator") {
        Space s{2, Domain{0, 5}};
        s.post(LexBound{{{Sense::Minimize, var(0)}, {Sense::Maximize, var(1)}}, {2, -3}, true});
        REQUIRE(s.propagate());
        CHECK(s.domain(0) == Domain{0, 2});
        s.narrow(0, {2, 2});
        REQUIRE(s.propagate());
        CHECK(s.domain(1) == Domain{4, 5});
    }
}

TEST_CASE("propagation against brute force") {
    std::mt19937 rng{7};
    for (int round = 0; round < 600; ++round) {
        auto n = 2 + rng() % 3;
        std::vector<Any> cs;
        auto k = 1 + rng() % 3;
        for (unsigned i = 0; i < k; ++i) {
            cs.push_back(random_any(rng, n));
        }
        Space initial{n, Domain{0, 6}};
        Space s = initial;
        std::vector<Domain> before = s.domains();
        bool ok = true;
        for (auto const &c : cs) {
            post(s, c);
            ok = s.propagate();
            if (!ok) {
                break;
            }
            // monotone
            for (var_t v = 0; v < n; ++v) {
                CHECK(subset(s.domain(v), before[v]));
            }
            before = s.domains();
        }
        // every solution survives
        std::size_t solutions = 0;
        each_assignment(initial.domains(), [&](std::span<val_t const> a) {
            if (!std::all_of(cs.begin(), cs.end(), [&](Any const &c) { return holds(c, a); })) {
                return;
            }
            ++solutions;
            REQUIRE(ok);
            for (var_t v = 0; v < n; ++v) {
                CHECK(s.domain(v).contains(a[v]));
            }
        });
        if (!ok) {
            continue;
        }
        // entailment against the box
        for (int j = 0; j < 4; ++j) {
            auto c = random_arith(rng, n);
            auto truth = s.entail(c);
            auto probe = s.probe_entail(c);
            each_assignment(s.domains(), [&](std::span<val_t const> a) {
                if (truth == Truth::True) {
                    CHECK(c.evaluate(a));
                }
                if (truth == Truth::False) {
                    CHECK_FALSE(c.evaluate(a));
                }
                bool solution = std::all_of(cs.begin(), cs.end(), [&](Any const &x) { return holds(x, a); });
                if (solution && probe == Truth::True) {
                    CHECK(c.evaluate(a));
                }
                if (solution && probe == Truth::False) {
                    CHECK_FALSE(c.evaluate(a));
                }
            });
        }
        // order independence
        auto perm = cs;
        std::shuffle(perm.begin(), perm.end(), rng);
        Space p = initial;
        for (auto const &c : perm) {
            post(p, c);
        }
        REQUIRE(p.propagate());
        CHECK(p.domains() == s.domains());
        // search agrees with brute force
        auto sol = search(s);
        CHECK(sol.has_value() == (solutions > 0));
        if (sol) {
            CHECK(std::all_of(cs.begin(), cs.end(), [&](Any const &c) { return holds(c, *sol); }));
        }
    }
}

TEST_CASE("determinism") {
    std::mt19937 rng{11};
    for (int round = 0; round < 100; ++round) {
        std::vector<Any> cs;
        for (int i = 0; i < 3; ++i) {
            cs.push_back(random_any(rng, 3));
        }
        Space a{3, Domain{0, 6}};
        Space b{3, Domain{0, 6}};
        for (auto const &c : cs) {
            post(a, c);
            post(b, c);
        }
        CHECK(a.propagate() == b.propagate());
        CHECK(a.domains() == b.domains());
    }
}
