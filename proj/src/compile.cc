#include "casp/compile.hh"

#include <algorithm>
#include <map>

namespace Casp {

void NogoodBuilder::add(std::vector<Literal> lits) {
    auto top = Literal::pos(out_.top);
    if (std::find(lits.begin(), lits.end(), ~top) != lits.end()) {
        return;
    }
    std::erase(lits, top);
    if (auto ng = Nogood::make(std::move(lits))) {
        out_.inconsistent = out_.inconsistent || ng->empty();
        out_.nogoods.push_back(std::move(*ng));
    }
}

namespace {

//! Introduces `r <-> a | (x & b)` and returns r; constants are folded.
auto disjunct(NogoodBuilder &nb, Literal a, Literal x, Literal b) -> Literal {
    auto top = nb.top();
    if (a == top || (x == top && b == top)) {
        return top;
    }
    if (x == ~top || b == ~top) {
        return a;
    }
    auto r = Literal::pos(nb.fresh());
    nb.add({r, ~a, ~x});
    nb.add({r, ~a, ~b});
    nb.add({~r, a});
    nb.add({~r, x, b});
    return r;
}

} // namespace

void cardinality_nogoods(NogoodBuilder &nb, std::optional<val_t> lower, std::optional<val_t> upper,
                         std::vector<Literal> const &elements, Literal condition) {
    auto n = static_cast<val_t>(elements.size());
    auto lo = std::max<val_t>(lower.value_or(0), 0);
    auto hi = upper.value_or(n);
    if (lower && upper && *lower > *upper) {
        throw GroundError("cardinality rule with lower bound " + std::to_string(*lower) + " above upper bound " +
                          std::to_string(*upper));
    }
    if (hi < 0 || lo > n) {
        nb.add({condition});
        return;
    }
    // counters up to the largest threshold that matters
    val_t k = std::max(lo, hi < n ? hi + 1 : 0);
    if (k == 0) {
        return;
    }
    auto top = nb.top();
    // row[j] stands for "at least j of the elements seen so far"
    std::vector<Literal> row(static_cast<std::size_t>(k) + 1, ~top);
    row[0] = top;
    for (auto x : elements) {
        for (auto j = static_cast<std::size_t>(k); j >= 1; --j) {
            row[j] = disjunct(nb, row[j], x, row[j - 1]);
        }
    }
    if (lo > 0) {
        nb.add({condition, ~row[static_cast<std::size_t>(lo)]});
    }
    if (hi < n) {
        nb.add({condition, row[static_cast<std::size_t>(hi + 1)]});
    }
}

auto completion_nogoods(GroundProgram const &prg) -> CompiledProgram {
    CompiledProgram out;
    out.num_program_atoms = prg.num_atoms();
    out.num_atoms = prg.num_atoms();
    NogoodBuilder nb{out};
    out.top = nb.fresh();
    nb.add({Literal::neg(out.top)});

    std::map<std::vector<Literal>, Literal> bodies;
    auto body_literal = [&](std::vector<Literal> body) -> Literal {
        std::sort(body.begin(), body.end());
        body.erase(std::unique(body.begin(), body.end()), body.end());
        if (body.empty()) {
            return nb.top();
        }
        if (body.size() == 1) {
            return body.front();
        }
        auto it = bodies.find(body);
        if (it != bodies.end()) {
            return it->second;
        }
        auto beta = Literal::pos(nb.fresh());
        ++out.num_body_atoms;
        bodies.emplace(body, beta);
        std::vector<Literal> all{~beta};
        for (auto lit : body) {
            nb.add({beta, ~lit});
            all.push_back(lit);
        }
        nb.add(std::move(all));
        return beta;
    };

    std::vector<std::vector<Literal>> support(prg.num_atoms());
    for (auto const &rule : prg.rules) {
        auto beta = body_literal(rule.body);
        if (rule.head) {
            nb.add({beta, Literal::neg(*rule.head)});
            support[*rule.head].push_back(beta);
        }
        else {
            nb.add({beta});
        }
    }
    for (auto const &choice : prg.choices) {
        auto beta = body_literal(choice.body);
        std::vector<Literal> elems;
        for (auto head : choice.heads) {
            support[head].push_back(beta);
            elems.push_back(Literal::pos(head));
        }
        if (choice.lower || choice.upper) {
            cardinality_nogoods(nb, choice.lower, choice.upper, elems, beta);
        }
    }
    for (atom_t atom = 0; atom < prg.num_atoms(); ++atom) {
        if (prg.atom_kind(atom) != AtomKind::Regular) {
            continue;
        }
        std::vector<Literal> ng{Literal::pos(atom)};
        for (auto beta : support[atom]) {
            ng.push_back(~beta);
        }
        nb.add(std::move(ng));
    }
    return out;
}

} // namespace Casp
