#include "casp/expr.hh"

#include <algorithm>

namespace Casp {

auto checked_add(val_t a, val_t b) -> val_t {
    val_t r{};
    if (__builtin_add_overflow(a, b, &r)) {
        throw OverflowError("integer overflow in addition");
    }
    return r;
}

auto checked_sub(val_t a, val_t b) -> val_t {
    val_t r{};
    if (__builtin_sub_overflow(a, b, &r)) {
        throw OverflowError("integer overflow in subtraction");
    }
    return r;
}

auto checked_mul(val_t a, val_t b) -> val_t {
    val_t r{};
    if (__builtin_mul_overflow(a, b, &r)) {
        throw OverflowError("integer overflow in multiplication");
    }
    return r;
}

auto checked_neg(val_t a) -> val_t { return checked_sub(0, a); }

auto holds(val_t lhs, Relation rel, val_t rhs) -> bool {
    switch (rel) {
        case Relation::EQ: return lhs == rhs;
        case Relation::NE: return lhs != rhs;
        case Relation::LT: return lhs < rhs;
        case Relation::LE: return lhs <= rhs;
        case Relation::GT: return lhs > rhs;
        case Relation::GE: return lhs >= rhs;
    }
    return false;
}

auto to_string(Relation rel) -> std::string_view {
    switch (rel) {
        case Relation::EQ: return "$==";
        case Relation::NE: return "$!=";
        case Relation::LT: return "$<";
        case Relation::LE: return "$<=";
        case Relation::GT: return "$>";
        case Relation::GE: return "$>=";
    }
    return "?";
}

auto VarTable::intern(std::string const &name) -> var_t {
    auto [it, inserted] = ids_.try_emplace(name, static_cast<var_t>(names_.size()));
    if (inserted) {
        names_.push_back(name);
    }
    return it->second;
}

auto VarTable::find(std::string const &name) const -> std::optional<var_t> {
    if (auto it = ids_.find(name); it != ids_.end()) {
        return it->second;
    }
    return std::nullopt;
}

auto names_of(VarTable const &table) -> NameLookup {
    return [&table](var_t var) { return table.name(var); };
}

auto Expr::constant(val_t value) -> Expr {
    Expr e;
    e.op_ = Op::Const;
    e.value_ = value;
    return e;
}

auto Expr::variable(var_t var) -> Expr {
    Expr e;
    e.op_ = Op::Var;
    e.value_ = var;
    return e;
}

auto Expr::add(std::vector<Expr> args) -> Expr {
    Expr e;
    e.op_ = Op::Add;
    e.args_ = std::move(args);
    return e;
}

auto Expr::sub(Expr lhs, Expr rhs) -> Expr {
    Expr e;
    e.op_ = Op::Sub;
    e.args_.push_back(std::move(lhs));
    e.args_.push_back(std::move(rhs));
    return e;
}

auto Expr::mul(std::vector<Expr> args) -> Expr {
    Expr e;
    e.op_ = Op::Mul;
    e.args_ = std::move(args);
    return e;
}

auto Expr::neg(Expr arg) -> Expr {
    Expr e;
    e.op_ = Op::Neg;
    e.args_.push_back(std::move(arg));
    return e;
}

auto Expr::abs(Expr arg) -> Expr {
    Expr e;
    e.op_ = Op::Abs;
    e.args_.push_back(std::move(arg));
    return e;
}

void Expr::collect_vars(std::set<var_t> &out) const {
    if (op_ == Op::Var) {
        out.insert(var());
    }
    for (auto const &arg : args_) {
        arg.collect_vars(out);
    }
}

auto Expr::vars() const -> std::set<var_t> {
    std::set<var_t> out;
    collect_vars(out);
    return out;
}

auto Expr::occurrences() const -> std::size_t {
    std::size_t n = op_ == Op::Var ? 1 : 0;
    for (auto const &arg : args_) {
        n += arg.occurrences();
    }
    return n;
}

auto Expr::evaluate(std::span<val_t const> assignment) const -> val_t {
    switch (op_) {
        case Op::Const: return value_;
        case Op::Var: return assignment[var()];
        case Op::Add: {
            val_t sum = 0;
            for (auto const &arg : args_) {
                sum = checked_add(sum, arg.evaluate(assignment));
            }
            return sum;
        }
        case Op::Sub: return checked_sub(args_[0].evaluate(assignment), args_[1].evaluate(assignment));
        case Op::Mul: {
            val_t prod = 1;
            for (auto const &arg : args_) {
                prod = checked_mul(prod, arg.evaluate(assignment));
            }
            return prod;
        }
        case Op::Neg: return checked_neg(args_[0].evaluate(assignment));
        case Op::Abs: {
            auto v = args_[0].evaluate(assignment);
            return v < 0 ? checked_neg(v) : v;
        }
    }
    return 0;
}

auto Expr::canonical(NameLookup const &names) const -> Expr {
    switch (op_) {
        case Op::Const:
        case Op::Var: return *this;
        case Op::Add:
        case Op::Mul: {
            bool is_add = op_ == Op::Add;
            val_t folded = is_add ? 0 : 1;
            std::vector<Expr> rest;
            auto absorb = [&](Expr const &arg, auto &self) -> void {
                if (arg.op_ == op_) {
                    for (auto const &sub : arg.args_) {
                        self(sub, self);
                    }
                }
                else if (arg.op_ == Op::Const) {
                    folded = is_add ? checked_add(folded, arg.value_) : checked_mul(folded, arg.value_);
                }
                else {
                    rest.push_back(arg);
                }
            };
            for (auto const &arg : args_) {
                auto c = arg.canonical(names);
                absorb(c, absorb);
            }
            if (!is_add && folded == 0) {
                return constant(0);
            }
            std::vector<std::pair<std::string, Expr>> keyed;
            keyed.reserve(rest.size());
            for (auto &arg : rest) {
                keyed.emplace_back(arg.to_string(names), std::move(arg));
            }
            std::stable_sort(keyed.begin(), keyed.end(),
                             [](auto const &a, auto const &b) { return a.first < b.first; });
            std::vector<Expr> out;
            bool keep_const = is_add ? folded != 0 : folded != 1;
            if (!is_add && keep_const) {
                out.push_back(constant(folded));
            }
            for (auto &[k, arg] : keyed) {
                out.push_back(std::move(arg));
            }
            if (is_add && keep_const) {
                out.push_back(constant(folded));
            }
            if (out.empty()) {
                return constant(folded);
            }
            if (out.size() == 1) {
                return out.front();
            }
            return is_add ? add(std::move(out)) : mul(std::move(out));
        }
        case Op::Sub: {
            auto lhs = args_[0].canonical(names);
            auto rhs = args_[1].canonical(names);
            if (lhs.is_constant() && rhs.is_constant()) {
                return constant(checked_sub(lhs.value_, rhs.value_));
            }
            if (rhs.is_constant() && rhs.value_ == 0) {
                return lhs;
            }
            return sub(std::move(lhs), std::move(rhs));
        }
        case Op::Neg: {
            auto arg = args_[0].canonical(names);
            if (arg.is_constant()) {
                return constant(checked_neg(arg.value_));
            }
            if (arg.op_ == Op::Neg) {
                return arg.args_[0];
            }
            return neg(std::move(arg));
        }
        case Op::Abs: {
            auto arg = args_[0].canonical(names);
            if (arg.is_constant()) {
                return constant(arg.value_ < 0 ? checked_neg(arg.value_) : arg.value_);
            }
            return abs(std::move(arg));
        }
    }
    return *this;
}

namespace {

auto precedence(Expr::Op op) -> int {
    switch (op) {
        case Expr::Op::Add:
        case Expr::Op::Sub: return 1;
        case Expr::Op::Mul: return 2;
        default: return 3;
    }
}

} // namespace

void Expr::write(std::string &out, NameLookup const &names, int parent_prec) const {
    int prec = precedence(op_);
    bool parens = prec < parent_prec;
    if (parens) {
        out += '(';
    }
    switch (op_) {
        case Op::Const: out += std::to_string(value_); break;
        case Op::Var: out += names(var()); break;
        case Op::Add: {
            bool first = true;
            for (auto const &arg : args_) {
                if (!first) {
                    out += "$+";
                }
                first = false;
                arg.write(out, names, 1);
            }
            break;
        }
        case Op::Sub:
            args_[0].write(out, names, 1);
            out += "$-";
            args_[1].write(out, names, 2);
            break;
        case Op::Mul: {
            bool first = true;
            for (auto const &arg : args_) {
                if (!first) {
                    out += "$*";
                }
                first = false;
                arg.write(out, names, 2);
            }
            break;
        }
        case Op::Neg:
            out += "$-";
            args_[0].write(out, names, 3);
            break;
        case Op::Abs:
            out += "$abs(";
            args_[0].write(out, names, 0);
            out += ')';
            break;
    }
    if (parens) {
        out += ')';
    }
}

auto Expr::to_string(NameLookup const &names) const -> std::string {
    std::string out;
    write(out, names, 0);
    return out;
}

void Expr::write_key(std::string &out) const {
    switch (op_) {
        case Op::Const:
            out += '#';
            out += std::to_string(value_);
            return;
        case Op::Var:
            out += 'v';
            out += std::to_string(value_);
            return;
        case Op::Add: out += "+("; break;
        case Op::Sub: out += "-("; break;
        case Op::Mul: out += "*("; break;
        case Op::Neg: out += "~("; break;
        case Op::Abs: out += "|("; break;
    }
    for (auto const &arg : args_) {
        arg.write_key(out);
        out += ',';
    }
    out += ')';
}

auto Expr::key() const -> std::string {
    std::string out;
    write_key(out);
    return out;
}

auto operator==(Expr const &a, Expr const &b) -> bool {
    return a.op_ == b.op_ && a.value_ == b.value_ && a.args_ == b.args_;
}

auto ArithConstraint::vars() const -> std::set<var_t> {
    auto out = lhs.vars();
    rhs.collect_vars(out);
    return out;
}

auto ArithConstraint::evaluate(std::span<val_t const> assignment) const -> bool {
    return holds(lhs.evaluate(assignment), rel, rhs.evaluate(assignment));
}

auto ArithConstraint::canonical(NameLookup const &names) const -> ArithConstraint {
    return {lhs.canonical(names), rel, rhs.canonical(names)};
}

auto ArithConstraint::to_string(NameLookup const &names) const -> std::string {
    return lhs.to_string(names) + std::string{Casp::to_string(rel)} + rhs.to_string(names);
}

auto ArithConstraint::key() const -> std::string {
    return lhs.key() + std::string{Casp::to_string(rel)} + rhs.key();
}

} // namespace Casp
