#ifndef CASP_SEMANTICS_HH
#define CASP_SEMANTICS_HH

#include <casp/program.hh>

#include <set>
#include <vector>

//! @file casp/semantics.hh
//! Reference semantics of constraint logic programs by explicit reduction.
//! Exponential; meant for testing and for verifying solver output.

namespace Casp {

//! A total Boolean assignment indexed by atom.
using BoolAssignment = std::vector<bool>;
//! A total assignment of the constraint variables indexed by variable id.
using VarAssignment = std::vector<val_t>;

//! Checks whether the pair of assignments is a constraint answer set.
//!
//! Constraint atoms are evaluated under `vars` and must agree with `atoms`;
//! global constraints must hold and all values must lie in the domain. The
//! regular atoms must then form a stable model of the program reduced by the
//! constraint atoms' truth values (Gelfond-Lifschitz reduct and least model).
//! Throws std::invalid_argument on partial assignments.
[[nodiscard]] auto check_constraint_answer_set(GroundProgram const &prg, BoolAssignment const &atoms,
                                               VarAssignment const &vars) -> bool;

//! True if all global constraints of the program hold under `vars`.
[[nodiscard]] auto check_globals(GroundProgram const &prg, VarAssignment const &vars) -> bool;

//! Enumerates all Boolean assignments that form a constraint answer set
//! together with some variable assignment from the program's domain.
//! `max_checks` bounds the work; throws std::length_error when exceeded.
[[nodiscard]] auto brute_force_answer_sets(GroundProgram const &prg, std::size_t max_checks = 50'000'000)
    -> std::set<BoolAssignment>;

} // namespace Casp

#endif
