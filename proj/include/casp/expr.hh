#ifndef CASP_EXPR_HH
#define CASP_EXPR_HH

#include <casp/base.hh>

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

//! @file casp/expr.hh
//! Arithmetic expressions over constraint variables and the constraints
//! built from them.

namespace Casp {

//! Overflow-checked 64-bit arithmetic.
[[nodiscard]] auto checked_add(val_t a, val_t b) -> val_t;
[[nodiscard]] auto checked_sub(val_t a, val_t b) -> val_t;
[[nodiscard]] auto checked_mul(val_t a, val_t b) -> val_t;
[[nodiscard]] auto checked_neg(val_t a) -> val_t;

enum class Relation : std::uint8_t { EQ, NE, LT, LE, GT, GE };

//! EQ<->NE, LT<->GE, GT<->LE.
[[nodiscard]] constexpr auto complement(Relation rel) -> Relation {
    switch (rel) {
        case Relation::EQ: return Relation::NE;
        case Relation::NE: return Relation::EQ;
        case Relation::LT: return Relation::GE;
        case Relation::GE: return Relation::LT;
        case Relation::GT: return Relation::LE;
        case Relation::LE: return Relation::GT;
    }
    return rel;
}

//! The relation with swapped operands (a < b iff b > a).
[[nodiscard]] constexpr auto mirror(Relation rel) -> Relation {
    switch (rel) {
        case Relation::LT: return Relation::GT;
        case Relation::GT: return Relation::LT;
        case Relation::LE: return Relation::GE;
        case Relation::GE: return Relation::LE;
        default: return rel;
    }
}

[[nodiscard]] auto holds(val_t lhs, Relation rel, val_t rhs) -> bool;
//! Textual form with the theory prefix, e.g. `$<=`.
[[nodiscard]] auto to_string(Relation rel) -> std::string_view;

//! Bidirectional mapping between constraint variable names and dense ids.
class VarTable {
  public:
    //! Returns the id of the variable, creating it on first occurrence.
    auto intern(std::string const &name) -> var_t;
    [[nodiscard]] auto find(std::string const &name) const -> std::optional<var_t>;
    [[nodiscard]] auto name(var_t var) const -> std::string const & { return names_[var]; }
    [[nodiscard]] auto size() const -> std::size_t { return names_.size(); }

  private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, var_t> ids_;
};

using NameLookup = std::function<std::string(var_t)>;

//! Expression tree over integer constants and constraint variables.
class Expr {
  public:
    enum class Op : std::uint8_t { Const, Var, Add, Sub, Mul, Neg, Abs };

    Expr() = default;

    [[nodiscard]] static auto constant(val_t value) -> Expr;
    [[nodiscard]] static auto variable(var_t var) -> Expr;
    [[nodiscard]] static auto add(std::vector<Expr> args) -> Expr;
    [[nodiscard]] static auto sub(Expr lhs, Expr rhs) -> Expr;
    [[nodiscard]] static auto mul(std::vector<Expr> args) -> Expr;
    [[nodiscard]] static auto neg(Expr arg) -> Expr;
    [[nodiscard]] static auto abs(Expr arg) -> Expr;

    [[nodiscard]] auto op() const -> Op { return op_; }
    [[nodiscard]] auto value() const -> val_t { return value_; }
    [[nodiscard]] auto var() const -> var_t { return static_cast<var_t>(value_); }
    [[nodiscard]] auto args() const -> std::vector<Expr> const & { return args_; }
    [[nodiscard]] auto is_constant() const -> bool { return op_ == Op::Const; }

    //! Collect the variables of the expression.
    void collect_vars(std::set<var_t> &out) const;
    [[nodiscard]] auto vars() const -> std::set<var_t>;
    //! Number of variable occurrences (with repetitions).
    [[nodiscard]] auto occurrences() const -> std::size_t;

    //! Exact evaluation; throws OverflowError.
    [[nodiscard]] auto evaluate(std::span<val_t const> assignment) const -> val_t;

    //! Flattens nested sums/products, folds constants and sorts the operands
    //! of commutative operators by their printed form.
    [[nodiscard]] auto canonical(NameLookup const &names) const -> Expr;

    //! Printed form in input syntax, e.g. `work(adam)$+work(lea)`.
    [[nodiscard]] auto to_string(NameLookup const &names) const -> std::string;
    //! Name independent structural key.
    [[nodiscard]] auto key() const -> std::string;

    friend auto operator==(Expr const &a, Expr const &b) -> bool;

  private:
    void write(std::string &out, NameLookup const &names, int parent_prec) const;
    void write_key(std::string &out) const;

    Op op_{Op::Const};
    val_t value_{0};
    std::vector<Expr> args_;
};

//! A relation between two expressions, e.g. `work(adam) > 4`.
struct ArithConstraint {
    Expr lhs;
    Relation rel{Relation::EQ};
    Expr rhs;

    //! Same operands, complemented relation.
    [[nodiscard]] auto complement() const -> ArithConstraint { return {lhs, Casp::complement(rel), rhs}; }
    [[nodiscard]] auto vars() const -> std::set<var_t>;
    [[nodiscard]] auto evaluate(std::span<val_t const> assignment) const -> bool;
    [[nodiscard]] auto canonical(NameLookup const &names) const -> ArithConstraint;
    [[nodiscard]] auto to_string(NameLookup const &names) const -> std::string;
    [[nodiscard]] auto key() const -> std::string;

    friend auto operator==(ArithConstraint const &a, ArithConstraint const &b) -> bool = default;
};

using ConstraintList = std::vector<ArithConstraint>;

//! Name lookup backed by a variable table.
[[nodiscard]] auto names_of(VarTable const &table) -> NameLookup;

} // namespace Casp

#endif
