#include "casp/semantics.hh"

#include <stdexcept>

namespace Casp {

namespace {

auto body_holds(std::vector<Literal> const &body, BoolAssignment const &atoms) -> bool {
    for (auto lit : body) {
        if (atoms[lit.atom()] != lit.sign()) {
            return false;
        }
    }
    return true;
}

//! Reduct of a body w.r.t. the candidate set; nullopt if the rule is removed.
//! Constraint literals are evaluated, negative regular literals are checked
//! against the candidate, positive regular atoms are returned.
auto reduct_body(GroundProgram const &prg, std::vector<Literal> const &body, BoolAssignment const &atoms)
    -> std::optional<std::vector<atom_t>> {
    std::vector<atom_t> pos;
    for (auto lit : body) {
        if (prg.atom_kind(lit.atom()) == AtomKind::Constraint || !lit.sign()) {
            if (atoms[lit.atom()] != lit.sign()) {
                return std::nullopt;
            }
        }
        else {
            pos.push_back(lit.atom());
        }
    }
    return pos;
}

} // namespace

auto check_globals(GroundProgram const &prg, VarAssignment const &vars) -> bool {
    for (auto const &count : prg.counts) {
        val_t n = 0;
        for (auto const &c : count.elements) {
            n += c.evaluate(vars) ? 1 : 0;
        }
        if (!holds(n, count.rel, count.bound.evaluate(vars))) {
            return false;
        }
    }
    for (auto const &distinct : prg.distincts) {
        std::set<val_t> seen;
        for (auto const &e : distinct.exprs) {
            if (!seen.insert(e.evaluate(vars)).second) {
                return false;
            }
        }
    }
    return true;
}

auto check_constraint_answer_set(GroundProgram const &prg, BoolAssignment const &atoms, VarAssignment const &vars)
    -> bool {
    if (atoms.size() != prg.num_atoms() || vars.size() != prg.vars.size()) {
        throw std::invalid_argument("check_constraint_answer_set requires total assignments");
    }
    for (auto v : vars) {
        if (v < prg.domain.lower || v > prg.domain.upper) {
            return false;
        }
    }
    // step one: constraint atoms agree with the variable assignment
    for (auto atom : prg.gamma.atoms()) {
        if (prg.gamma.constraint(atom).evaluate(vars) != atoms[atom]) {
            return false;
        }
    }
    if (!check_globals(prg, vars)) {
        return false;
    }
    // integrity constraints and cardinality bounds
    for (auto const &rule : prg.rules) {
        if (!rule.head && body_holds(rule.body, atoms)) {
            return false;
        }
    }
    for (auto const &choice : prg.choices) {
        if (!body_holds(choice.body, atoms)) {
            continue;
        }
        val_t n = 0;
        for (auto h : choice.heads) {
            n += atoms[h] ? 1 : 0;
        }
        if ((choice.lower && n < *choice.lower) || (choice.upper && n > *choice.upper)) {
            return false;
        }
    }
    // step two: least model of the reduct equals the regular part
    std::vector<std::pair<atom_t, std::vector<atom_t>>> definite;
    for (auto const &rule : prg.rules) {
        if (!rule.head) {
            continue;
        }
        if (auto pos = reduct_body(prg, rule.body, atoms)) {
            definite.emplace_back(*rule.head, std::move(*pos));
        }
    }
    for (auto const &choice : prg.choices) {
        auto pos = reduct_body(prg, choice.body, atoms);
        if (!pos) {
            continue;
        }
        for (auto h : choice.heads) {
            if (atoms[h]) {
                definite.emplace_back(h, *pos);
            }
        }
    }
    BoolAssignment model(prg.num_atoms(), false);
    for (bool changed = true; changed;) {
        changed = false;
        for (auto const &[head, pos] : definite) {
            if (model[head]) {
                continue;
            }
            bool fire = true;
            for (auto a : pos) {
                if (!model[a]) {
                    fire = false;
                    break;
                }
            }
            if (fire) {
                model[head] = true;
                changed = true;
            }
        }
    }
    for (atom_t a = 0; a < prg.num_atoms(); ++a) {
        if (prg.atom_kind(a) == AtomKind::Regular && model[a] != atoms[a]) {
            return false;
        }
    }
    return true;
}

auto brute_force_answer_sets(GroundProgram const &prg, std::size_t max_checks) -> std::set<BoolAssignment> {
    std::vector<atom_t> regular;
    for (atom_t a = 0; a < prg.num_atoms(); ++a) {
        if (prg.atom_kind(a) == AtomKind::Regular) {
            regular.push_back(a);
        }
    }
    auto const width = static_cast<std::size_t>(prg.domain.upper - prg.domain.lower + 1);
    std::size_t var_combos = 1;
    for (std::size_t i = 0; i < prg.vars.size(); ++i) {
        var_combos *= width;
        if (var_combos > max_checks) {
            throw std::length_error("brute force enumeration too large");
        }
    }
    if (regular.size() >= 30 || (var_combos << regular.size()) > max_checks) {
        throw std::length_error("brute force enumeration too large");
    }
    std::set<BoolAssignment> result;
    VarAssignment vars(prg.vars.size(), prg.domain.lower);
    for (std::size_t combo = 0; combo < var_combos; ++combo) {
        auto rest = combo;
        for (auto &v : vars) {
            v = prg.domain.lower + static_cast<val_t>(rest % width);
            rest /= width;
        }
        BoolAssignment atoms(prg.num_atoms(), false);
        for (auto atom : prg.gamma.atoms()) {
            atoms[atom] = prg.gamma.constraint(atom).evaluate(vars);
        }
        if (!check_globals(prg, vars)) {
            continue;
        }
        for (std::size_t subset = 0; subset < (std::size_t{1} << regular.size()); ++subset) {
            for (std::size_t i = 0; i < regular.size(); ++i) {
                atoms[regular[i]] = ((subset >> i) & 1U) != 0;
            }
            if (!result.contains(atoms) && check_constraint_answer_set(prg, atoms, vars)) {
                result.insert(atoms);
            }
        }
    }
    return result;
}

} // namespace Casp
