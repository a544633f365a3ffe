#ifndef CASP_DRIVER_HH
#define CASP_DRIVER_HH

#include <casp/semantics.hh>
#include <casp/theory.hh>

#include <iosfwd>
#include <optional>
#include <string>

//! @file casp/driver.hh
//! Solving ground programs end to end: completion, CDCL search with theory
//! propagation, enumeration and optimization.

namespace Casp {

struct SolveOptions {
    TheoryOptions theory;
    bool lookahead{false};
    std::size_t models{1}; //!< 0 enumerates all; ignored when optimizing
    std::uint64_t seed{0};
    //! Initial objective bound in input sense, one value per level.
    std::optional<std::vector<val_t>> opt_values;
    std::optional<double> time_limit; //!< seconds
};

struct Model {
    BoolAssignment atoms; //!< program atoms
    VarAssignment vars;
    std::vector<val_t> objective; //!< values in input sense
};

enum class SolveStatus : std::uint8_t { Satisfiable, Unsatisfiable, Optimum, Unknown };

struct RunStats {
    std::uint64_t conflicts{0};
    std::uint64_t conflict_literals{0}; //!< summed sizes of learnt nogoods
    std::uint64_t decisions{0};
    std::uint64_t restarts{0};
    std::uint64_t models{0};
    std::uint64_t lookahead_nogoods{0};
    TheoryStats theory;
    double solve_seconds{0};
    bool timed_out{false};
    std::vector<val_t> optimum;

    [[nodiscard]] auto average_conflict_size() const -> double {
        return conflicts == 0 ? 0.0 : static_cast<double>(conflict_literals) / static_cast<double>(conflicts);
    }
};

struct SolveResult {
    SolveStatus status{SolveStatus::Unknown};
    std::vector<Model> models;
    RunStats stats;
};

//! Solve a tight ground program. `on_model` sees every model as found.
[[nodiscard]] auto solve(GroundProgram const &prg, SolveOptions const &options,
                         std::function<void(Model const &)> const &on_model = {}) -> SolveResult;

[[nodiscard]] auto to_string(SolveStatus status) -> std::string_view;

//! One line: true regular atoms, true constraint atoms, then `var=value`.
void print_model(std::ostream &out, GroundProgram const &prg, Model const &model);
[[nodiscard]] auto model_line(GroundProgram const &prg, Model const &model) -> std::string;
//! Inverse of model_line; throws Error on unknown names.
[[nodiscard]] auto parse_model_line(GroundProgram const &prg, std::string const &line) -> Model;

void print_stats(std::ostream &out, RunStats const &stats);

} // namespace Casp

#endif
