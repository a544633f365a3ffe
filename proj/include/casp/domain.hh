#ifndef CASP_DOMAIN_HH
#define CASP_DOMAIN_HH

#include <casp/base.hh>

#include <boost/container/small_vector.hpp>

#include <string>
#include <vector>

//! @file casp/domain.hh
//! Integer intervals with saturating bounds and finite domains as sorted
//! sets of disjoint intervals.

namespace Casp {

//! Bounds at or beyond this magnitude stand for infinity.
constexpr val_t INF = val_t{1} << 62;

//! Closed interval; empty if lo > hi.
struct Interval {
    val_t lo{-INF};
    val_t hi{INF};

    [[nodiscard]] auto empty() const -> bool { return lo > hi; }
    [[nodiscard]] auto contains(val_t v) const -> bool { return lo <= v && v <= hi; }
    [[nodiscard]] auto fixed() const -> bool { return lo == hi; }

    friend auto operator==(Interval, Interval) -> bool = default;
};

[[nodiscard]] auto clamp_inf(__int128 v) -> val_t;
[[nodiscard]] auto operator+(Interval a, Interval b) -> Interval;
[[nodiscard]] auto operator-(Interval a, Interval b) -> Interval;
[[nodiscard]] auto operator-(Interval a) -> Interval;
[[nodiscard]] auto operator*(Interval a, Interval b) -> Interval;
[[nodiscard]] auto abs(Interval a) -> Interval;
[[nodiscard]] auto pow(Interval a, unsigned k) -> Interval;
[[nodiscard]] auto hull(Interval a, Interval b) -> Interval;
[[nodiscard]] auto meet(Interval a, Interval b) -> Interval;
//! Hull of {x | exists y in b, x * y in t}; the full line if unconstrained.
[[nodiscard]] auto divide(Interval t, Interval b) -> Interval;
//! Largest r >= 0 with r^k <= v, for v >= 0.
[[nodiscard]] auto iroot(val_t v, unsigned k) -> val_t;

//! Interval storage of a domain; two intervals fit without allocation.
using Intervals = boost::container::small_vector<Interval, 2>;

//! Sorted disjoint non-adjacent intervals.
class Domain {
  public:
    Domain() = default;
    Domain(val_t lo, val_t hi);
    explicit Domain(Interval i) : Domain(i.lo, i.hi) {}
    //! Union of arbitrary intervals.
    [[nodiscard]] static auto from(std::vector<Interval> parts) -> Domain;

    [[nodiscard]] auto empty() const -> bool { return parts_.empty(); }
    [[nodiscard]] auto min() const -> val_t { return parts_.front().lo; }
    [[nodiscard]] auto max() const -> val_t { return parts_.back().hi; }
    [[nodiscard]] auto hull() const -> Interval { return empty() ? Interval{1, 0} : Interval{min(), max()}; }
    [[nodiscard]] auto fixed() const -> bool { return parts_.size() == 1 && parts_[0].lo == parts_[0].hi; }
    //! Number of values, saturating at INF.
    [[nodiscard]] auto size() const -> val_t;
    [[nodiscard]] auto contains(val_t v) const -> bool;
    [[nodiscard]] auto intervals() const -> Intervals const & { return parts_; }
    //! Values in increasing order; only for small domains.
    [[nodiscard]] auto values() const -> std::vector<val_t>;

    //! Each returns whether the domain changed.
    auto intersect(Interval i) -> bool;
    auto intersect(Domain const &other) -> bool;
    auto remove(val_t v) -> bool;
    auto assign(val_t v) -> bool;

    [[nodiscard]] auto to_string() const -> std::string;

    friend auto operator==(Domain const &, Domain const &) -> bool = default;

  private:
    Intervals parts_;
};

} // namespace Casp

#endif
