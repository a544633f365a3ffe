#ifndef CASP_BASE_HH
#define CASP_BASE_HH

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

//! @file casp/base.hh
//! Basic vocabulary shared by all modules: atoms, signed literals, nogoods
//! and the error hierarchy.

namespace Casp {

using atom_t = std::uint32_t;
using level_t = std::uint32_t;
using var_t = std::uint32_t;
using val_t = std::int64_t;

//! A signed literal `Ta` or `Fa` over an atom.
//!
//! Encoded as `2 * atom + (sign == F)`, so literals can index arrays directly.
class Literal {
  public:
    constexpr Literal() = default;
    constexpr Literal(atom_t atom, bool positive) : rep_{(atom << 1U) | (positive ? 0U : 1U)} {}

    [[nodiscard]] static constexpr auto pos(atom_t atom) -> Literal { return {atom, true}; }
    [[nodiscard]] static constexpr auto neg(atom_t atom) -> Literal { return {atom, false}; }
    [[nodiscard]] static constexpr auto from_index(std::uint32_t idx) -> Literal {
        Literal lit;
        lit.rep_ = idx;
        return lit;
    }

    [[nodiscard]] constexpr auto atom() const -> atom_t { return rep_ >> 1U; }
    //! True for `T`, false for `F`.
    [[nodiscard]] constexpr auto sign() const -> bool { return (rep_ & 1U) == 0; }
    [[nodiscard]] constexpr auto index() const -> std::uint32_t { return rep_; }
    //! The complement: flips `T` and `F`.
    [[nodiscard]] constexpr auto operator~() const -> Literal { return from_index(rep_ ^ 1U); }

    friend constexpr auto operator==(Literal, Literal) -> bool = default;
    friend constexpr auto operator<=>(Literal, Literal) = default;

  private:
    std::uint32_t rep_{0};
};

//! A set of signed literals no solution may contain.
//!
//! Literals are kept sorted and unique; a set with both signs of an atom is
//! vacuous and cannot be constructed through make().
class Nogood {
  public:
    Nogood() = default;

    //! Normalize the given literals; returns nullopt for vacuous sets.
    [[nodiscard]] static auto make(std::vector<Literal> lits) -> std::optional<Nogood>;

    [[nodiscard]] auto literals() const -> std::span<Literal const> { return lits_; }
    [[nodiscard]] auto size() const -> std::size_t { return lits_.size(); }
    [[nodiscard]] auto empty() const -> bool { return lits_.empty(); }
    [[nodiscard]] auto contains(Literal lit) const -> bool;
    [[nodiscard]] auto begin() const { return lits_.begin(); }
    [[nodiscard]] auto end() const { return lits_.end(); }

    friend auto operator==(Nogood const &, Nogood const &) -> bool = default;
    friend auto operator<=>(Nogood const &, Nogood const &) = default;

  private:
    std::vector<Literal> lits_;
};

//! Base class of all errors raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

//! Syntax errors carry a source position.
class ParseError : public Error {
  public:
    ParseError(std::string const &msg, int line, int column);
    [[nodiscard]] auto line() const -> int { return line_; }
    [[nodiscard]] auto column() const -> int { return column_; }

  private:
    int line_;
    int column_;
};

//! Unsafe rules, infinite ranges, non-fact global constraints, non-tight programs.
class GroundError : public Error {
  public:
    using Error::Error;
};

//! Lookups outside the constraint atom mapping.
class MappingError : public Error {
  public:
    using Error::Error;
};

//! 64-bit integer overflow during evaluation or propagation.
class OverflowError : public Error {
  public:
    using Error::Error;
};

//! Violated internal invariants (e.g. a propagation bug detected by a filter).
class InternalError : public Error {
  public:
    using Error::Error;
};

//! A time limit was reached inside the theory search.
class Timeout : public Error {
  public:
    using Error::Error;
};

} // namespace Casp

#endif
