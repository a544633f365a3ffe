#ifndef CASP_THEORY_HH
#define CASP_THEORY_HH

#include <casp/cdcl.hh>
#include <casp/iis.hh>
#include <casp/program.hh>
#include <casp/space.hh>

#include <optional>
#include <set>

//! @file casp/theory.hh
//! Theory propagation: constraint literals assigned by the Boolean solver are
//! posted into a constraint space; entailed constraint atoms and conflicts
//! come back as (filtered) nogoods.

namespace Casp {

struct TheoryOptions {
    Filter conflict_filter{Filter::Simple};
    Filter reason_filter{Filter::Simple};
    //! 1: every call; n > 1: every n'th call; 0: total assignments only.
    unsigned delay{1};
    //! Restore spaces by rebuilding instead of per-level snapshots.
    bool rebuild_on_backjump{false};
    //! Decide entailment by posting constraints into copies.
    bool probe_entailment{false};
    //! Accept witnesses equal to the bound during optimization.
    bool opt_all{false};
    SearchLimits limits;
};

struct TheoryStats {
    std::uint64_t calls{0};          //!< propagation requests
    std::uint64_t admitted{0};       //!< requests passing the delay gate
    std::uint64_t conflicts{0};      //!< theory conflicts
    std::uint64_t propagations{0};   //!< implied constraint literals
    std::uint64_t conflict_filter_calls{0};
    std::uint64_t reason_filter_calls{0};
    std::uint64_t conflict_literals{0}; //!< summed sizes of theory conflict nogoods
    std::uint64_t reason_literals{0};
    std::uint64_t rebuilds{0};       //!< oracle and backjump rebuilds
    std::uint64_t total_checks{0};
    double filter_seconds{0};
};

//! Post propagator connecting a solver to the constraint variables of a
//! ground program.
class TheoryPropagator : public PostPropagator {
  public:
    TheoryPropagator(GroundProgram const &prg, TheoryOptions options);

    //! Watch the constraint atoms and register with the solver.
    void attach(Solver &solver);

    void on_assigned(Solver &solver, Literal lit) override;
    auto propagate(Solver &solver) -> bool override;
    void on_backjump(Solver &solver, level_t level) override;
    auto check_total(Solver &solver) -> bool override;

    //! Witness of the last accepted total assignment.
    [[nodiscard]] auto witness() const -> std::vector<val_t> const & { return witness_; }
    //! Constraint list of the assigned constraint literals, in trail order.
    [[nodiscard]] auto posted_list() const -> ConstraintList;
    [[nodiscard]] auto assigned_literals() const -> std::vector<Literal>;
    [[nodiscard]] auto space() const -> Space const & { return space_; }
    [[nodiscard]] auto stats() const -> TheoryStats const & { return stats_; }

    [[nodiscard]] auto objectives() const -> std::vector<ObjectiveLevel> const & { return objectives_; }
    //! Objective values of a witness, in minimization form.
    [[nodiscard]] auto objective_values(std::vector<val_t> const &witness) const -> std::vector<val_t>;
    //! Require future witnesses to be lexicographically below the values
    //! (or equal with opt_all); the values are in minimization form.
    void set_bound(std::vector<val_t> values);
    [[nodiscard]] auto bound() const -> std::optional<LexBound> const & { return bound_; }

  private:
    struct Entry {
        Literal lit;
        level_t level;
    };
    struct Frame {
        Space space;
        std::size_t posted;
        level_t level; //!< level of the last posted entry
    };

    void reset_base();
    void post_pending();
    void mark(atom_t atom);
    auto conflict(Solver &solver, OracleMode mode) -> bool;
    auto scan(Solver &solver) -> bool;
    [[nodiscard]] auto constraint_of(Literal lit) const -> ArithConstraint;

    GroundProgram const &prg_;
    TheoryOptions options_;
    std::vector<ObjectiveLevel> objectives_;
    std::optional<LexBound> bound_;

    Space base_;
    Space space_;
    std::vector<Frame> frames_;
    std::vector<Entry> trail_;
    std::size_t posted_{0};

    std::vector<atom_t> atoms_;                     //!< constraint atoms
    std::vector<std::optional<std::size_t>> index_; //!< atom to position in atoms_
    std::vector<ArithPropagator> tests_;            //!< entailment tests of T a
    std::vector<std::vector<std::size_t>> by_var_;
    std::vector<bool> dirty_;
    std::vector<std::size_t> dirty_list_;

    std::vector<val_t> witness_;
    TheoryStats stats_;
};

//! Binary nogoods from posting each constraint literal alone and probing
//! every other constraint atom. A literal that fails alone yields a unit
//! nogood. `rebuilds` counts the spaces built.
[[nodiscard]] auto initial_lookahead(GroundProgram const &prg, std::size_t *rebuilds = nullptr) -> std::vector<Nogood>;

//! The background space of a program: domain and global constraints.
[[nodiscard]] auto background_space(GroundProgram const &prg) -> Space;

} // namespace Casp

#endif
