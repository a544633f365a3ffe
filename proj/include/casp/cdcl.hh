#ifndef CASP_CDCL_HH
#define CASP_CDCL_HH

#include <casp/base.hh>

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <vector>

//! @file casp/cdcl.hh
//! Conflict-driven nogood learning over signed literals.

namespace Casp {

class Solver;

enum class Value : std::uint8_t { Free, True, False };

//! Extension point run after unit propagation reaches a fixpoint.
//!
//! Propagators add nogoods through Solver::add_nogood and must return false
//! as soon as it reports a conflict.
class PostPropagator {
  public:
    PostPropagator() = default;
    PostPropagator(PostPropagator const &) = delete;
    auto operator=(PostPropagator const &) -> PostPropagator & = delete;
    virtual ~PostPropagator() = default;

    //! Called for each newly assigned literal over a watched atom.
    virtual void on_assigned(Solver &solver, Literal lit) {
        static_cast<void>(solver);
        static_cast<void>(lit);
    }
    //! Propagate at a unit propagation fixpoint.
    virtual auto propagate(Solver &solver) -> bool = 0;
    //! The solver undid all levels above `level`.
    virtual void on_backjump(Solver &solver, level_t level) {
        static_cast<void>(solver);
        static_cast<void>(level);
    }
    //! Check a total assignment.
    virtual auto check_total(Solver &solver) -> bool {
        static_cast<void>(solver);
        return true;
    }
};

struct SolverStats {
    std::uint64_t conflicts{0};
    std::uint64_t decisions{0};
    std::uint64_t propagations{0};
    std::uint64_t restarts{0};
    std::uint64_t learnt_literals{0}; //!< summed sizes of learnt nogoods
    std::uint64_t models{0};
};

enum class SearchResult : std::uint8_t {
    Exhausted, //!< all models enumerated, possibly none
    Stopped,   //!< the model callback asked to stop
    Interrupted, //!< deadline reached
};

class Solver {
  public:
    using Clock = std::chrono::steady_clock;

    explicit Solver(std::size_t num_atoms = 0, std::uint64_t seed = 0);

    auto add_atom() -> atom_t;
    [[nodiscard]] auto num_atoms() const -> std::size_t { return values_.size(); }

    //! Adds a nogood at any time. Returns false if it is violated by the
    //! current assignment; during search the conflict is resolved once
    //! control returns to the solver.
    auto add_nogood(Nogood const &ng) -> bool;
    //! Watched literals assigned so far are reported at once.
    void add_propagator(PostPropagator &prop);
    //! Report assignments of the atom to the propagators.
    void watch(atom_t atom);

    [[nodiscard]] auto value(Literal lit) const -> Value;
    [[nodiscard]] auto is_true(Literal lit) const -> bool { return value(lit) == Value::True; }
    [[nodiscard]] auto is_false(Literal lit) const -> bool { return value(lit) == Value::False; }
    [[nodiscard]] auto assigned(atom_t atom) const -> bool { return values_[atom] != Value::Free; }
    [[nodiscard]] auto level(atom_t atom) const -> level_t { return levels_[atom]; }
    [[nodiscard]] auto decision_level() const -> level_t { return static_cast<level_t>(trail_lim_.size()); }
    [[nodiscard]] auto trail() const -> std::span<Literal const> { return trail_; }
    [[nodiscard]] auto inconsistent() const -> bool { return unsat_; }
    [[nodiscard]] auto stats() const -> SolverStats const & { return stats_; }
    [[nodiscard]] auto model() const -> std::vector<bool>;

    void set_deadline(std::optional<Clock::time_point> deadline) { deadline_ = deadline; }
    //! Models are distinguished by the first `atoms` atoms only.
    void set_projection(std::size_t atoms) { projection_ = atoms; }

    //! Enumerate models; `on_model` returns whether to continue.
    auto solve(std::function<bool(Solver &)> const &on_model) -> SearchResult;

  private:
    static constexpr std::uint32_t NO_REASON = UINT32_MAX;

    struct Clause {
        std::vector<Literal> lits; //!< disjunction; the first two are watched
    };

    struct Order {
        Solver const *solver;
        auto operator()(atom_t a, atom_t b) const -> bool;
    };

    void assign(Literal lit, std::uint32_t reason);
    auto store(std::vector<Literal> lits) -> std::uint32_t;
    auto unit_propagate() -> bool;
    auto flush_root_units() -> bool;
    auto propagate_all() -> bool;
    auto handle_conflict() -> bool;
    void analyze(std::vector<Literal> &learnt, level_t &jump);
    void backjump(level_t level);
    auto decide() -> bool;
    void bump(atom_t atom);
    void heap_insert(atom_t atom);
    auto timed_out() -> bool;

    std::vector<Value> values_;
    std::vector<level_t> levels_;
    std::vector<std::uint32_t> reasons_;
    std::vector<bool> phase_;
    std::vector<bool> watched_;
    std::vector<double> activity_;
    std::vector<bool> in_heap_;
    std::set<atom_t, Order> heap_;
    double bump_amount_{1.0};

    std::vector<Clause> clauses_;
    std::vector<std::vector<std::uint32_t>> watches_; //!< by literal that, made true, visits the clause
    std::vector<Literal> trail_;
    std::vector<std::size_t> trail_lim_;
    std::size_t qhead_{0};

    std::vector<PostPropagator *> props_;
    std::optional<std::vector<Literal>> conflict_; //!< pending conflict as clause
    std::vector<Literal> root_units_; //!< unit clauses added above level 0
    bool unsat_{false};
    bool enumerating_{false};
    std::optional<std::size_t> projection_;
    std::uint64_t restart_limit_{100};
    std::uint64_t conflicts_since_restart_{0};
    std::vector<bool> seen_;
    std::optional<Clock::time_point> deadline_;
    std::uint64_t ticks_{0};
    SolverStats stats_;
};

} // namespace Casp

#endif
