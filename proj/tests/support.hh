#ifndef CASP_TESTS_SUPPORT_HH
#define CASP_TESTS_SUPPORT_HH

#include <casp/driver.hh>
#include <casp/frontend.hh>

#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace Casp::Test {

//! The team scheduling program.
inline constexpr char const *HOUSE = R"($domain(0..10).
person(adam;smith;lea;john).
1{team(A,B) : person(B) : B != A}1 :- person(A), A == adam.
{friday}.

work(A) $+ work(B) $> 6 :- team(A,B).
work(B) $- work(adam) $== 1 :- friday, team(adam,B).
:- team(adam,lea), not work(lea) $== work(adam).
work(B) $== 0 :- person(B), not team(adam,B), B != adam.

$count[work(A) $== 8 : person(A)] $== fulltime.

$maximize{work(A) : person(A)}.
)";

//! Knobs of the random program generator.
struct ProgramShape {
    int atoms{6};
    int vars{2};
    int rules{6};
    val_t lower{0};
    val_t upper{3};
    bool globals{true};
};

inline auto random_constraint(std::mt19937 &rng, int vars) -> std::string {
    static char const *const rels[] = {"$==", "$!=", "$<", "$<=", "$>", "$>="};
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    auto var = [&] { return "x" + std::to_string(pick(vars)); };
    auto rel = rels[pick(6)];
    auto k = std::to_string(pick(5));
    switch (pick(6)) {
        case 0: return var() + rel + k;
        case 1: return var() + "$+" + var() + rel + k;
        case 2: return var() + rel + var();
        case 3: return var() + "$-" + var() + rel + k;
        case 4: return "2$*" + var() + rel + var() + "$+" + k;
        default: return "$abs(" + var() + "$-" + var() + ")" + rel + k;
    }
}

//! A random tight program: positive body atoms always have a smaller index
//! than the head.
inline auto random_program(std::mt19937 &rng, ProgramShape const &shape) -> std::string {
    auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<unsigned>(n)); };
    std::ostringstream out;
    out << "$domain(" << shape.lower << ".." << shape.upper << ").\n";
    auto atom = [](int i) { return "p" + std::to_string(i); };
    auto body = [&](int head) {
        std::vector<std::string> lits;
        int n = pick(3);
        for (int i = 0; i < n; ++i) {
            int kind = pick(shape.vars > 0 ? 4 : 3);
            if (kind == 0 && head > 0) {
                lits.push_back(atom(pick(head)));
            }
            else if (kind == 1) {
                lits.push_back("not " + atom(pick(shape.atoms)));
            }
            else if (kind == 3) {
                lits.push_back((pick(2) == 0 ? "not " : "") + random_constraint(rng, shape.vars));
            }
        }
        std::string text;
        for (std::size_t i = 0; i < lits.size(); ++i) {
            text += (i == 0 ? " :- " : ", ") + lits[i];
        }
        return text;
    };
    for (int r = 0; r < shape.rules; ++r) {
        int kind = pick(8);
        int head = pick(shape.atoms);
        if (kind == 0) {
            auto b = body(shape.atoms);
            out << (b.empty() ? ":- " + atom(pick(shape.atoms)) : b) << ".\n";
        }
        else if (kind == 1) {
            int a = pick(shape.atoms);
            int c = pick(shape.atoms);
            out << "{" << atom(a) << ";" << atom(c) << "}" << body(std::min(a, c)) << ".\n";
        }
        else if (kind == 2) {
            int a = pick(shape.atoms);
            int c = pick(shape.atoms);
            int d = pick(shape.atoms);
            int lo = pick(2);
            out << lo << "{" << atom(a) << ";" << atom(c) << ";" << atom(d) << "}" << lo + pick(2)
                << body(std::min({a, c, d})) << ".\n";
        }
        else if (kind == 3 && shape.vars > 0) {
            out << random_constraint(rng, shape.vars) << body(shape.atoms) << ".\n";
        }
        else {
            out << atom(head) << body(head) << ".\n";
        }
    }
    if (shape.globals && shape.vars >= 2) {
        if (pick(4) == 0) {
            out << "$distinct{x0;x1}.\n";
        }
        if (pick(4) == 0) {
            out << "$count[x0$==1;x1$==1] " << (pick(2) == 0 ? "$==" : "$<=") << " " << pick(3) << ".\n";
        }
    }
    // mention every variable so that witnesses are total
    for (int v = 0; v < shape.vars; ++v) {
        out << "q" << v << " :- x" << v << " $>= " << shape.lower << ".\n";
    }
    return out.str();
}

//! The six filters of the reason/conflict matrix.
inline auto matrix_filters() -> std::vector<Filter> {
    return {Filter::Simple, Filter::Forward, Filter::Backward, Filter::Range, Filter::CC, Filter::CCRange};
}

//! Boolean parts of all models; repeated models are counted in `duplicates`.
inline auto model_set(GroundProgram const &prg, SolveOptions opts, std::size_t *duplicates = nullptr)
    -> std::set<BoolAssignment> {
    opts.models = 0;
    std::set<BoolAssignment> out;
    std::size_t dups = 0;
    static_cast<void>(solve(prg, opts, [&](Model const &m) {
        if (!out.insert(m.atoms).second) {
            ++dups;
        }
    }));
    if (duplicates != nullptr) {
        *duplicates = dups;
    }
    return out;
}

} // namespace Casp::Test

#endif
