#ifndef CASP_SPACE_HH
#define CASP_SPACE_HH

#include <casp/domain.hh>
#include <casp/program.hh>

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

//! @file casp/space.hh
//! Constraint spaces: domains plus propagators, propagated to a fixpoint by
//! forward evaluation and backward projection over expression trees.

namespace Casp {

enum class Truth : std::uint8_t { True, False, Unknown };

//! Expression compiled for interval reasoning.
class ExprTree {
  public:
    ExprTree() = default;
    explicit ExprTree(Expr const &expr);

    //! Interval of every node, the root last.
    void forward(std::vector<Domain> const &doms, std::vector<Interval> &out) const;
    [[nodiscard]] auto interval(std::vector<Domain> const &doms) const -> Interval;
    //! Narrow variable domains so the root value may lie in `target`.
    //! Returns false on a wipe-out; changed variables are appended.
    auto project(std::vector<Domain> &doms, Domain const &target, std::vector<var_t> &changed) const -> bool;
    //! Value under fixed domains or an explicit assignment.
    [[nodiscard]] auto evaluate(std::vector<Domain> const &doms) const -> val_t;
    [[nodiscard]] auto evaluate(std::span<val_t const> values) const -> val_t;

    [[nodiscard]] auto vars() const -> std::vector<var_t> const & { return vars_; }
    [[nodiscard]] auto is_var() const -> bool { return nodes_.size() == 1 && nodes_[0].op == Expr::Op::Var; }
    [[nodiscard]] auto occurrences(var_t var) const -> std::size_t;

  private:
    struct Node {
        Expr::Op op{Expr::Op::Const};
        val_t value{0};
        std::vector<std::pair<std::uint32_t, unsigned>> kids; //!< child and exponent
    };

    auto build(Expr const &expr) -> std::uint32_t;
    auto project(std::uint32_t node, Domain const &target, std::vector<Domain> &doms,
                 std::vector<Interval> const &fw, std::vector<var_t> &changed) const -> bool;
    template <class Leaf> [[nodiscard]] auto eval(std::uint32_t node, Leaf const &leaf) const -> val_t;

    std::vector<Node> nodes_;
    std::vector<var_t> vars_;
};

//! Narrowing operator over a domain vector.
class Propagator {
  public:
    Propagator() = default;
    Propagator(Propagator const &) = delete;
    auto operator=(Propagator const &) -> Propagator & = delete;
    Propagator(Propagator &&) noexcept = default;
    auto operator=(Propagator &&) noexcept -> Propagator & = default;
    virtual ~Propagator() = default;

    [[nodiscard]] virtual auto vars() const -> std::vector<var_t> const & = 0;
    //! Returns false on failure; changed variables are appended.
    virtual auto propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool = 0;
    [[nodiscard]] virtual auto check(std::span<val_t const> values) const -> bool = 0;
};

//! `lhs rel rhs`, propagated on `lhs - rhs`.
class ArithPropagator : public Propagator {
  public:
    explicit ArithPropagator(ArithConstraint const &c);

    [[nodiscard]] auto vars() const -> std::vector<var_t> const & override { return tree_.vars(); }
    auto propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool override;
    [[nodiscard]] auto check(std::span<val_t const> values) const -> bool override;
    //! Interval and exact entailment test.
    [[nodiscard]] auto entail(std::vector<Domain> const &doms) const -> Truth;

  private:
    //! Single unfixed variable with a small domain, if any.
    [[nodiscard]] auto unfixed(std::vector<Domain> const &doms, std::size_t &count) const -> std::optional<var_t>;
    //! Scratch values holding the minimum of every variable of the constraint.
    [[nodiscard]] auto point(std::vector<Domain> const &doms) const -> std::vector<val_t> &;
    [[nodiscard]] auto holds(val_t diff) const -> bool { return Casp::holds(diff, rel_, 0); }

    ExprTree tree_;
    Relation rel_;
};

//! Number of true elements related to a bound.
class CountPropagator : public Propagator {
  public:
    explicit CountPropagator(CountConstraint const &c);

    [[nodiscard]] auto vars() const -> std::vector<var_t> const & override { return vars_; }
    auto propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool override;
    [[nodiscard]] auto check(std::span<val_t const> values) const -> bool override;

  private:
    std::vector<ArithPropagator> elements_;
    std::vector<ArithPropagator> complements_;
    std::vector<ArithConstraint> constraints_;
    ExprTree bound_;
    Relation rel_;
    std::vector<var_t> vars_;
};

//! Pairwise distinct values: value elimination and a pigeonhole test.
class DistinctPropagator : public Propagator {
  public:
    explicit DistinctPropagator(DistinctConstraint const &c);

    [[nodiscard]] auto vars() const -> std::vector<var_t> const & override { return vars_; }
    auto propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool override;
    [[nodiscard]] auto check(std::span<val_t const> values) const -> bool override;

  private:
    //! Value sets as bit masks relative to `lo`; all terms are variables.
    auto propagate_masks(std::vector<Domain> &doms, std::vector<var_t> &changed, val_t lo) const -> bool;

    std::vector<ExprTree> exprs_;
    std::vector<var_t> vars_;
    //! Variable of each term if every term is a variable.
    std::vector<var_t> direct_;
};

//! Lexicographic bound `(e1,...,ek) < (v1,...,vk)` or `<=` if not strict.
class LexPropagator : public Propagator {
  public:
    LexPropagator(std::vector<Expr> const &exprs, std::vector<val_t> bound, bool strict);

    [[nodiscard]] auto vars() const -> std::vector<var_t> const & override { return vars_; }
    auto propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool override;
    [[nodiscard]] auto check(std::span<val_t const> values) const -> bool override;

  private:
    std::vector<ExprTree> exprs_;
    std::vector<val_t> bound_;
    bool strict_;
    std::vector<var_t> vars_;
};

//! Optimization level: sense and objective expression.
using ObjectiveLevel = std::pair<Sense, Expr>;

//! Lexicographic bound over objectives, in minimization form.
struct LexBound {
    std::vector<ObjectiveLevel> objectives;
    std::vector<val_t> values;
    bool strict{true};
};

//! Search limits; exceeding the deadline throws Timeout.
struct SearchLimits {
    std::optional<std::chrono::steady_clock::time_point> deadline;
};

//! Monotone constraint store. Copies are independent; propagators are
//! shared between copies.
class Space {
  public:
    Space() = default;
    Space(std::size_t num_vars, Domain initial);

    [[nodiscard]] auto num_vars() const -> std::size_t { return doms_.size(); }
    [[nodiscard]] auto domain(var_t var) const -> Domain const & { return doms_[var]; }
    [[nodiscard]] auto domains() const -> std::vector<Domain> const & { return doms_; }
    [[nodiscard]] auto failed() const -> bool { return failed_; }
    [[nodiscard]] auto num_propagators() const -> std::size_t { return registry_ ? registry_->props.size() : 0; }
    //! Variables of each posted propagator.
    [[nodiscard]] auto scopes() const -> std::vector<std::span<var_t const>>;

    void post(ArithConstraint const &c);
    void post(CountConstraint const &c);
    void post(DistinctConstraint const &c);
    void post(LexBound const &b);
    void post(std::shared_ptr<Propagator const> prop);
    //! Intersect a domain directly.
    void narrow(var_t var, Interval i);

    //! Propagate to a fixpoint; returns false if the space failed.
    auto propagate() -> bool;
    //! Variables whose domains changed since the last call.
    auto take_changes() -> std::vector<var_t>;

    //! Interval/exact entailment; the space should be at a fixpoint.
    [[nodiscard]] auto entail(ArithConstraint const &c) const -> Truth;
    [[nodiscard]] auto entail(ArithPropagator const &p) const -> Truth { return p.entail(doms_); }
    //! Entailment by posting `c` and its complement into copies.
    [[nodiscard]] auto probe_entail(ArithConstraint const &c) const -> Truth;

    //! Fixed values if every domain is a singleton.
    [[nodiscard]] auto assignment() const -> std::optional<std::vector<val_t>>;
    //! Whether all propagators accept the assignment.
    [[nodiscard]] auto check(std::span<val_t const> values) const -> bool;

  private:
    struct Registry {
        std::vector<std::shared_ptr<Propagator const>> props;
        std::vector<std::vector<std::uint32_t>> subs;
    };

    void enqueue(std::uint32_t prop);
    void notify(var_t var);
    void touch(var_t var);
    //! Applies `var rel const` to the domain; false for other shapes.
    auto post_direct(ArithConstraint const &c) -> bool;

    std::vector<Domain> doms_;
    std::shared_ptr<Registry> registry_;
    std::vector<std::uint32_t> queue_;
    std::vector<bool> queued_;
    std::vector<var_t> changes_;
    std::vector<bool> changed_;
    bool failed_{false};
};

//! Fresh space over `base` with the list posted and propagated; counts one
//! rebuild unless the list is empty.
[[nodiscard]] auto rebuild(ConstraintList const &constraints, Space const &base, std::size_t *counter = nullptr)
    -> Space;

//! DFS with first-fail variable selection and minimum value first.
[[nodiscard]] auto search(Space space, SearchLimits const &limits = {}) -> std::optional<std::vector<val_t>>;

//! Lexicographic optimization by repeated bound tightening.
[[nodiscard]] auto branch_and_bound(Space space, std::vector<ObjectiveLevel> const &objectives,
                                    SearchLimits const &limits = {}) -> std::optional<std::vector<val_t>>;

//! Objective in minimization form.
[[nodiscard]] auto minimization_form(ObjectiveLevel const &level) -> Expr;

} // namespace Casp

#endif
