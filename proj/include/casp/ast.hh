#ifndef CASP_AST_HH
#define CASP_AST_HH

#include <casp/program.hh>

#include <optional>
#include <string>
#include <variant>
#include <vector>

//! @file casp/ast.hh
//! Non-ground programs as produced by the parser.

namespace Casp::Ast {

struct Location {
    int line{1};
    int column{1};
};

//! First-order term of the regular (non-theory) language.
struct Term {
    enum class Kind : std::uint8_t { Integer, Symbol, Variable, Function, Range, Pool, Binary, Negate };

    Kind kind{Kind::Integer};
    val_t value{0};
    std::string name; //!< symbol, variable or function name
    char op{0};       //!< operator of binary terms: + - * / backslash
    std::vector<Term> args;

    [[nodiscard]] static auto integer(val_t v) -> Term;
    [[nodiscard]] static auto symbol(std::string name) -> Term;
    [[nodiscard]] static auto variable(std::string name) -> Term;
    [[nodiscard]] static auto function(std::string name, std::vector<Term> args) -> Term;

    void collect_vars(std::vector<std::string> &out) const;
    [[nodiscard]] auto to_string() const -> std::string;
};

//! Expression over theory terms; leaves are regular terms that denote
//! integers or constraint variables after grounding.
struct TheoryExpr {
    enum class Kind : std::uint8_t { Leaf, Add, Sub, Mul, Neg, Abs };

    Kind kind{Kind::Leaf};
    Term leaf;
    std::vector<TheoryExpr> args;

    void collect_vars(std::vector<std::string> &out) const;
};

struct TheoryAtom {
    TheoryExpr lhs;
    Relation rel{Relation::EQ};
    TheoryExpr rhs;
};

//! Builtin comparison between regular terms, e.g. `B != A`.
struct Comparison {
    Term lhs;
    Relation rel{Relation::EQ};
    Term rhs;
};

struct Atom {
    Term term; //!< symbol, function or pool of those
};

struct Literal {
    bool negated{false};
    std::variant<Atom, TheoryAtom, Comparison> item;
    Location loc;
};

template <class T> struct Conditional {
    T item;
    std::vector<Literal> condition;
};

struct ChoiceHead {
    std::optional<Term> lower;
    std::optional<Term> upper;
    std::vector<Conditional<Atom>> elements;
};

struct CountHead {
    std::vector<Conditional<TheoryAtom>> elements;
    Relation rel{Relation::EQ};
    TheoryExpr bound;
};

struct DistinctHead {
    std::vector<Conditional<TheoryExpr>> elements;
};

struct OptimizeHead {
    Sense sense{Sense::Minimize};
    std::vector<Conditional<TheoryExpr>> elements;
};

using Head = std::variant<std::monostate, Atom, TheoryAtom, ChoiceHead, CountHead, DistinctHead, OptimizeHead>;

struct Rule {
    Head head;
    std::vector<Literal> body;
    Location loc;
};

struct DomainDecl {
    val_t lower{0};
    val_t upper{0};
    Location loc;
};

struct Program {
    std::vector<Rule> rules;
    std::vector<DomainDecl> domains;
};

} // namespace Casp::Ast

#endif
