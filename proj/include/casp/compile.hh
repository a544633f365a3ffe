#ifndef CASP_COMPILE_HH
#define CASP_COMPILE_HH

#include <casp/program.hh>

#include <optional>
#include <vector>

//! @file casp/compile.hh
//! Translation of tight ground programs into nogoods.

namespace Casp {

//! Nogoods over the program atoms plus auxiliary atoms.
//!
//! Atoms `0..num_program_atoms-1` are the program's atoms. Auxiliary atoms
//! follow: the constant `top`, body atoms and cardinality counters.
struct CompiledProgram {
    std::size_t num_atoms{0};
    std::size_t num_program_atoms{0};
    std::size_t num_body_atoms{0};
    atom_t top{0};
    std::vector<Nogood> nogoods;
    bool inconsistent{false}; //!< an empty nogood was produced
};

//! Source of fresh atoms and sink of nogoods; simplifies literals over `top`.
class NogoodBuilder {
  public:
    NogoodBuilder(CompiledProgram &out) : out_{out} {}

    auto fresh() -> atom_t { return static_cast<atom_t>(out_.num_atoms++); }
    [[nodiscard]] auto top() const -> Literal { return Literal::pos(out_.top); }
    //! Adds the nogood, dropping `T top` and skipping nogoods with `F top`.
    void add(std::vector<Literal> lits);

  private:
    CompiledProgram &out_;
};

//! Clark completion of a tight program, including cardinality bounds of
//! choice rules. Constraint atoms get no support nogoods.
[[nodiscard]] auto completion_nogoods(GroundProgram const &prg) -> CompiledProgram;

//! Sequential counter enforcing `lower <= |{x in elements | x true}| <= upper`
//! whenever `condition` holds. Throws GroundError if lower > upper.
void cardinality_nogoods(NogoodBuilder &builder, std::optional<val_t> lower, std::optional<val_t> upper,
                         std::vector<Literal> const &elements, Literal condition);

} // namespace Casp

#endif
