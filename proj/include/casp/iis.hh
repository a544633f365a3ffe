#ifndef CASP_IIS_HH
#define CASP_IIS_HH

#include <casp/space.hh>

#include <span>

#include <string_view>

//! @file casp/iis.hh
//! Reduction of inconsistent constraint lists to small (often irreducible)
//! inconsistent sublists, and the nogoods built from them.

namespace Casp {

enum class Filter : std::uint8_t { Simple, Deletion, Forward, Backward, Range, CC, CCRange };

//! Parse `simple|deletion|forward|backward|range|cc|ccrange`.
[[nodiscard]] auto parse_filter(std::string_view text) -> Filter;
[[nodiscard]] auto to_string(Filter filter) -> std::string_view;
//! One letter code: s, d, f, b, r, c, o.
[[nodiscard]] auto filter_letter(Filter filter) -> char;
[[nodiscard]] auto all_filters() -> std::vector<Filter> const &;

enum class OracleMode : std::uint8_t {
    Propagation, //!< consistent iff propagation reaches a fixpoint
    Search       //!< consistent iff a solution exists
};

//! Consistency tests over a fixed background space, counting rebuilds.
class ConsistencyOracle {
  public:
    //! A growing test list backed by one space.
    struct Work {
        Space space;
        bool consistent{true};
    };

    explicit ConsistencyOracle(Space base, OracleMode mode = OracleMode::Propagation, SearchLimits limits = {});

    //! Test from scratch; counts one rebuild unless the list is empty.
    auto consistent(ConstraintList const &list) -> bool;
    //! Fresh working space over the list; counts one rebuild unless empty.
    auto start(ConstraintList const &list) -> Work;
    //! Test list of `from` followed by `c`, started anew; counts one rebuild.
    //! Same status as `start` on the combined list.
    auto restart(Work const &from, ArithConstraint const &c) -> Work;
    //! Extend a working space; returns its new status.
    auto extend(Work &work, ArithConstraint const &c) -> bool;
    //! Extend by `list[items[0]]`, `list[items[1]]`, ... until the space
    //! fails; returns the position in `items` of the failing constraint or
    //! `items.size()`. Same answer as repeated extend; groups of constraints
    //! are tested on copies of the working space.
    auto first_failure(Work &work, ConstraintList const &list, std::span<std::size_t const> items) -> std::size_t;

    [[nodiscard]] auto checks() const -> std::size_t { return checks_; }
    [[nodiscard]] auto rebuilds() const -> std::size_t { return rebuilds_; }
    [[nodiscard]] auto mode() const -> OracleMode { return mode_; }
    [[nodiscard]] auto base() const -> Space const & { return base_; }

  private:
    auto decide(Space &space) -> bool;

    Space base_;
    OracleMode mode_;
    SearchLimits limits_;
    std::size_t checks_{0};
    std::size_t rebuilds_{0};
};

//! Positions of the kept constraints, in the order the filter found them.
//! Throws InternalError if a reducing filter receives a consistent list.
[[nodiscard]] auto filter_positions(Filter filter, ConstraintList const &list, ConsistencyOracle &oracle)
    -> std::vector<std::size_t>;
[[nodiscard]] auto apply_filter(Filter filter, ConstraintList const &list, ConsistencyOracle &oracle)
    -> ConstraintList;

[[nodiscard]] auto simple_filtering(ConstraintList const &list) -> std::vector<std::size_t>;
[[nodiscard]] auto deletion_filtering(ConstraintList const &list, ConsistencyOracle &oracle)
    -> std::vector<std::size_t>;
[[nodiscard]] auto forward_filtering(ConstraintList const &list, ConsistencyOracle &oracle)
    -> std::vector<std::size_t>;
[[nodiscard]] auto backward_filtering(ConstraintList const &list, ConsistencyOracle &oracle)
    -> std::vector<std::size_t>;
[[nodiscard]] auto range_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t>;
[[nodiscard]] auto cc_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t>;
[[nodiscard]] auto cc_range_filtering(ConstraintList const &list, ConsistencyOracle &oracle)
    -> std::vector<std::size_t>;

//! Nogood over the literals whose constraints form an inconsistent list.
//! `literals[i]` maps to `list[i]`.
[[nodiscard]] auto conflict_nogood(std::span<Literal const> literals, ConstraintList const &list, Filter filter,
                                   ConsistencyOracle &oracle) -> Nogood;

//! Reason for `propagated` given the assigned constraint literals: the list
//! `list` followed by the complement of `implied` is filtered and the tail
//! maps back to the complement of `propagated`, which is always included.
[[nodiscard]] auto reason_nogood(std::span<Literal const> literals, ConstraintList const &list, Literal propagated,
                                 ArithConstraint const &implied, Filter filter, ConsistencyOracle &oracle)
    -> Nogood;
//! reason_nogood with the complement of the implied constraint already
//! appended to the list.
[[nodiscard]] auto reason_nogood_appended(std::span<Literal const> literals, ConstraintList const &extended,
                                          Literal propagated, Filter filter, ConsistencyOracle &oracle) -> Nogood;

} // namespace Casp

#endif
