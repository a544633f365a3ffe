#include "casp/program.hh"

#include <ostream>
#include <sstream>

namespace Casp {

void GammaMap::add(atom_t atom, ArithConstraint constraint) {
    inverse_.emplace(constraint.key(), atom);
    forward_.emplace(atom, std::move(constraint));
    atoms_.push_back(atom);
}

auto GammaMap::find(ArithConstraint const &constraint) const -> std::optional<Literal> {
    if (auto it = inverse_.find(constraint.key()); it != inverse_.end()) {
        return Literal::pos(it->second);
    }
    if (auto it = inverse_.find(constraint.complement().key()); it != inverse_.end()) {
        return Literal::neg(it->second);
    }
    return std::nullopt;
}

auto GammaMap::constraint(atom_t atom) const -> ArithConstraint const & {
    auto it = forward_.find(atom);
    if (it == forward_.end()) {
        throw MappingError("atom " + std::to_string(atom) + " is not a constraint atom");
    }
    return it->second;
}

auto GammaMap::gamma(Literal lit) const -> ArithConstraint {
    auto const &c = constraint(lit.atom());
    return lit.sign() ? c : c.complement();
}

auto GammaMap::gamma_inverse(ArithConstraint const &constraint) const -> Literal {
    if (auto lit = find(constraint)) {
        return *lit;
    }
    throw MappingError("constraint " + constraint.key() + " is not the image of a constraint literal");
}

auto Objective::expr() const -> Expr {
    if (terms.size() == 1) {
        return terms.front();
    }
    return Expr::add(terms);
}

auto GroundProgram::add_atom(std::string const &name) -> atom_t {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<atom_t>(names_.size()));
    if (inserted) {
        names_.push_back(name);
        kinds_.push_back(AtomKind::Regular);
    }
    return it->second;
}

auto GroundProgram::add_constraint(ArithConstraint const &constraint) -> Literal {
    auto names = this->names();
    auto canonical = constraint.canonical(names);
    if (auto lit = gamma.find(canonical)) {
        return *lit;
    }
    auto name = canonical.to_string(names);
    auto atom = static_cast<atom_t>(names_.size());
    ids_.emplace(name, atom);
    names_.push_back(std::move(name));
    kinds_.push_back(AtomKind::Constraint);
    gamma.add(atom, std::move(canonical));
    return Literal::pos(atom);
}

auto GroundProgram::find_atom(std::string const &name) const -> std::optional<atom_t> {
    if (auto it = ids_.find(name); it != ids_.end()) {
        return it->second;
    }
    return std::nullopt;
}

auto GroundProgram::literal_name(Literal lit) const -> std::string {
    return (lit.sign() ? "" : "not ") + names_[lit.atom()];
}

namespace {

void print_body(std::ostream &out, GroundProgram const &prg, std::vector<Literal> const &body,
                char const *prefix = " :- ") {
    if (body.empty()) {
        return;
    }
    out << prefix;
    bool first = true;
    for (auto lit : body) {
        if (!first) {
            out << ", ";
        }
        first = false;
        out << prg.literal_name(lit);
    }
}

template <class Seq, class F> void print_joined(std::ostream &out, Seq const &seq, F f) {
    bool first = true;
    for (auto const &x : seq) {
        if (!first) {
            out << ",";
        }
        first = false;
        f(x);
    }
}

} // namespace

void GroundProgram::print(std::ostream &out) const {
    auto names = this->names();
    if (domain.declared) {
        out << "$domain(" << domain.lower << ".." << domain.upper << ").\n";
    }
    for (auto const &rule : rules) {
        if (rule.head) {
            out << names_[*rule.head];
            print_body(out, *this, rule.body);
        }
        else {
            out << ":-";
            print_body(out, *this, rule.body, " ");
        }
        out << ".\n";
    }
    for (auto const &choice : choices) {
        if (choice.lower) {
            out << *choice.lower;
        }
        out << "{";
        bool first = true;
        for (auto atom : choice.heads) {
            if (!first) {
                out << ";";
            }
            first = false;
            out << names_[atom];
        }
        out << "}";
        if (choice.upper) {
            out << *choice.upper;
        }
        print_body(out, *this, choice.body);
        out << ".\n";
    }
    for (auto const &count : counts) {
        out << "$count[";
        print_joined(out, count.elements, [&](auto const &c) { out << c.to_string(names); });
        out << "]" << Casp::to_string(count.rel) << count.bound.to_string(names) << ".\n";
    }
    for (auto const &distinct : distincts) {
        out << "$distinct{";
        print_joined(out, distinct.exprs, [&](auto const &e) { out << e.to_string(names); });
        out << "}.\n";
    }
    for (auto const &objective : objectives) {
        out << (objective.sense == Sense::Minimize ? "$minimize{" : "$maximize{");
        print_joined(out, objective.terms, [&](auto const &e) { out << e.to_string(names); });
        out << "}.\n";
    }
}

auto GroundProgram::to_string() const -> std::string {
    std::ostringstream out;
    print(out);
    return out.str();
}

} // namespace Casp
