#ifndef CASP_FRONTEND_HH
#define CASP_FRONTEND_HH

#include <casp/ast.hh>
#include <casp/program.hh>

#include <string>
#include <string_view>
#include <vector>

//! @file casp/frontend.hh
//! Parsing and grounding of the input language.
//!
//! The language is the gringo 3 style subset with `$`-prefixed theory
//! operators: normal rules, integrity constraints, choice and cardinality
//! rules, pools `p(a;b)`, ranges `l..u`, builtin comparisons, constraint
//! atoms, `$domain`, `$count`, `$distinct`, `$minimize` and `$maximize`.

namespace Casp {

//! Parse program text; throws ParseError with line and column.
[[nodiscard]] auto parse(std::string_view text) -> Ast::Program;

//! Instantiate a program bottom-up; throws GroundError.
//!
//! Warnings (e.g. an undeclared domain) are appended to `warnings` if given.
[[nodiscard]] auto ground(Ast::Program const &program, std::vector<std::string> *warnings = nullptr)
    -> GroundProgram;

//! Convenience for parse followed by ground.
[[nodiscard]] auto ground_text(std::string_view text, std::vector<std::string> *warnings = nullptr)
    -> GroundProgram;

//! Rejects programs whose positive dependency graph has a cycle; the error
//! message names the atoms of one cycle.
void tightness_check(GroundProgram const &prg);

} // namespace Casp

#endif
