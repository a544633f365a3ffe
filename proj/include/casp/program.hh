#ifndef CASP_PROGRAM_HH
#define CASP_PROGRAM_HH

#include <casp/expr.hh>

#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

//! @file casp/program.hh
//! Ground programs: regular and constraint atoms, rules, global constraints,
//! optimize statements, and the mapping between constraint atoms and
//! constraints.

namespace Casp {

enum class AtomKind : std::uint8_t { Regular, Constraint };

//! Maps constraint atoms to constraints and signed literals to constraints.
//!
//! `T a` maps to the registered constraint and `F a` to its complement. The
//! inverse accepts either form.
class GammaMap {
  public:
    //! Register a canonical constraint for an atom.
    void add(atom_t atom, ArithConstraint constraint);
    //! Literal whose image is the constraint, if any.
    [[nodiscard]] auto find(ArithConstraint const &constraint) const -> std::optional<Literal>;
    [[nodiscard]] auto contains(atom_t atom) const -> bool { return forward_.contains(atom); }
    [[nodiscard]] auto constraint(atom_t atom) const -> ArithConstraint const &;
    [[nodiscard]] auto atoms() const -> std::vector<atom_t> const & { return atoms_; }
    [[nodiscard]] auto size() const -> std::size_t { return atoms_.size(); }

    //! The constraint of a signed constraint literal.
    [[nodiscard]] auto gamma(Literal lit) const -> ArithConstraint;
    //! The signed literal whose image is the given constraint.
    [[nodiscard]] auto gamma_inverse(ArithConstraint const &constraint) const -> Literal;

  private:
    std::unordered_map<atom_t, ArithConstraint> forward_;
    std::unordered_map<std::string, atom_t> inverse_;
    std::vector<atom_t> atoms_;
};

struct GroundRule {
    std::optional<atom_t> head; //!< nullopt for integrity constraints
    std::vector<Literal> body;

    friend auto operator==(GroundRule const &, GroundRule const &) -> bool = default;
};

//! `L { heads } U :- body`; both bounds absent for plain choice rules.
struct ChoiceRule {
    std::vector<atom_t> heads;
    std::optional<val_t> lower;
    std::optional<val_t> upper;
    std::vector<Literal> body;
};

//! Number of satisfied elements related to a bound expression.
struct CountConstraint {
    std::vector<ArithConstraint> elements;
    Relation rel{Relation::EQ};
    Expr bound;
};

//! Pairwise distinct values.
struct DistinctConstraint {
    std::vector<Expr> exprs;
};

enum class Sense : std::uint8_t { Minimize, Maximize };

//! One optimization level: the sum of its terms is minimized or maximized.
struct Objective {
    Sense sense{Sense::Minimize};
    std::vector<Expr> terms;

    [[nodiscard]] auto expr() const -> Expr;
};

struct DomainDecl {
    val_t lower{-(val_t{1} << 20)};
    val_t upper{val_t{1} << 20};
    bool declared{false};
};

//! Variable-free program produced by the grounder.
class GroundProgram {
  public:
    //! Returns the regular atom with the given name, creating it if needed.
    auto add_atom(std::string const &name) -> atom_t;
    //! Returns the literal standing for the constraint; reuses an atom
    //! registered for the constraint or for its complement.
    auto add_constraint(ArithConstraint const &constraint) -> Literal;

    [[nodiscard]] auto find_atom(std::string const &name) const -> std::optional<atom_t>;
    [[nodiscard]] auto num_atoms() const -> std::size_t { return names_.size(); }
    [[nodiscard]] auto atom_name(atom_t atom) const -> std::string const & { return names_[atom]; }
    [[nodiscard]] auto atom_kind(atom_t atom) const -> AtomKind { return kinds_[atom]; }
    [[nodiscard]] auto literal_name(Literal lit) const -> std::string;

    [[nodiscard]] auto names() const -> NameLookup { return names_of(vars); }

    //! Print in the input grammar; the output grounds to an equal program.
    void print(std::ostream &out) const;
    [[nodiscard]] auto to_string() const -> std::string;

    std::vector<GroundRule> rules;
    std::vector<ChoiceRule> choices;
    std::vector<CountConstraint> counts;
    std::vector<DistinctConstraint> distincts;
    std::vector<Objective> objectives;
    DomainDecl domain;
    VarTable vars;
    GammaMap gamma;

  private:
    std::vector<std::string> names_;
    std::vector<AtomKind> kinds_;
    std::unordered_map<std::string, atom_t> ids_;
};

} // namespace Casp

#endif
