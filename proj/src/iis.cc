#include "casp/iis.hh"

#include <algorithm>
#include <numeric>
#include <set>
#include <span>

namespace Casp {

namespace {

constexpr std::pair<Filter, std::string_view> FILTER_NAMES[] = {
    {Filter::Simple, "simple"}, {Filter::Deletion, "deletion"}, {Filter::Forward, "forward"},
    {Filter::Backward, "backward"}, {Filter::Range, "range"}, {Filter::CC, "cc"},
    {Filter::CCRange, "ccrange"},
};

[[noreturn]] void consistent_input() { throw InternalError("filter applied to a consistent constraint list"); }

auto select(ConstraintList const &list, std::vector<std::size_t> const &idx) -> ConstraintList {
    ConstraintList out;
    out.reserve(idx.size());
    for (auto i : idx) {
        out.push_back(list[i]);
    }
    return out;
}

//! Forward filtering over the list visited in the given order.
auto forward_in_order(ConstraintList const &list, std::vector<std::size_t> const &order, ConsistencyOracle &oracle)
    -> std::vector<std::size_t> {
    std::vector<std::size_t> result;
    auto kept = oracle.start({});
    if (!kept.consistent) {
        return result;
    }
    auto work = kept;
    auto limit = order.size();
    for (;;) {
        auto k = oracle.first_failure(work, list, std::span{order}.first(limit));
        if (k == limit) {
            consistent_input();
        }
        result.push_back(order[k]);
        if (k == 0) {
            // the test list equals the result
            return result;
        }
        limit = k;
        kept = oracle.restart(kept, list[order[k]]);
        work = kept;
        if (!work.consistent) {
            return result;
        }
    }
}

//! Variables of every list element, stored contiguously.
class ListVars {
  public:
    explicit ListVars(ConstraintList const &list) {
        start_.push_back(0);
        for (auto const &c : list) {
            if (c.lhs.op() == Expr::Op::Var && c.rhs.op() == Expr::Op::Const) {
                flat_.push_back(c.lhs.var());
            }
            else {
                auto vs = c.vars();
                flat_.insert(flat_.end(), vs.begin(), vs.end());
            }
            start_.push_back(static_cast<std::uint32_t>(flat_.size()));
        }
    }

    [[nodiscard]] auto operator[](std::size_t i) const -> std::span<var_t const> {
        return {flat_.data() + start_[i], flat_.data() + start_[i + 1]};
    }
    [[nodiscard]] auto max_var() const -> std::size_t {
        return flat_.empty() ? 0 : *std::max_element(flat_.begin(), flat_.end());
    }

  private:
    std::vector<var_t> flat_;
    std::vector<std::uint32_t> start_;
};

//! Connected components scan; with `range` the first inconsistent test
//! list is returned.
auto cc_scan(ConstraintList const &list, ConsistencyOracle &oracle, bool range) -> std::vector<std::size_t> {
    std::vector<std::size_t> result;
    if (list.empty()) {
        return result;
    }
    auto kept = oracle.start({});
    if (!kept.consistent) {
        return result;
    }
    auto work = kept;
    ListVars vars{list};
    auto num_vars = std::max(oracle.base().num_vars(), vars.max_var() + 1);
    // omega as a membership vector plus its size
    std::vector<bool> omega(num_vars, false);
    std::size_t omega_size = 0;
    auto widen = [&](std::span<var_t const> vs) {
        for (auto v : vs) {
            if (!omega[v]) {
                omega[v] = true;
                ++omega_size;
            }
        }
    };
    auto touches = [&](std::span<var_t const> vs) {
        return std::any_of(vs.begin(), vs.end(), [&](var_t v) { return omega[v]; });
    };
    auto connected = [&](std::size_t i) { return vars[i].empty() || touches(vars[i]); };
    std::vector<std::size_t> todo(list.size());
    std::iota(todo.begin(), todo.end(), 0);
    widen(vars[list.size() - 1]);
    // background constraints connect their variables
    auto scopes = oracle.base().scopes();
    std::vector<bool> in_test(list.size(), false);
    std::vector<std::size_t> tested;
    for (;;) {
        auto count = omega_size;
        std::size_t found = list.size();
        std::vector<std::size_t> pass;
        for (auto it = todo.rbegin(); it != todo.rend(); ++it) {
            auto i = *it;
            if (in_test[i] || !connected(i)) {
                continue;
            }
            in_test[i] = true;
            pass.push_back(i);
            widen(vars[i]);
        }
        bool added = !pass.empty();
        auto k = oracle.first_failure(work, list, pass);
        if (k < pass.size()) {
            found = pass[k];
            for (auto j = k + 1; j < pass.size(); ++j) {
                in_test[pass[j]] = false;
            }
            pass.resize(k + 1);
        }
        tested.insert(tested.end(), pass.begin(), pass.end());
        if (found != list.size()) {
            if (range) {
                return tested;
            }
            result.push_back(found);
            std::fill(omega.begin(), omega.end(), false);
            omega_size = 0;
            for (auto r : result) {
                widen(vars[r]);
            }
            std::vector<std::size_t> next;
            for (auto i : todo) {
                if (in_test[i] && i != found) {
                    next.push_back(i);
                }
            }
            bool only = tested.size() == 1;
            todo = std::move(next);
            std::fill(in_test.begin(), in_test.end(), false);
            tested.clear();
            if (only) {
                return result;
            }
            kept = oracle.restart(kept, list[found]);
            work = kept;
            if (!work.consistent) {
                return result;
            }
        }
        else if (!added && count == omega_size &&
                 std::all_of(todo.begin(), todo.end(), [&](std::size_t i) { return in_test[i]; })) {
            consistent_input();
        }
        if (count == omega_size) {
            for (auto const &scope : scopes) {
                if (touches(scope)) {
                    widen(scope);
                }
            }
        }
        if (count == omega_size) {
            for (auto i : todo) {
                widen(vars[i]);
            }
        }
    }
}

} // namespace

auto parse_filter(std::string_view text) -> Filter {
    for (auto [f, name] : FILTER_NAMES) {
        if (name == text) {
            return f;
        }
    }
    throw Error("unknown filter: " + std::string{text});
}

auto to_string(Filter filter) -> std::string_view {
    for (auto [f, name] : FILTER_NAMES) {
        if (f == filter) {
            return name;
        }
    }
    return "?";
}

auto filter_letter(Filter filter) -> char {
    switch (filter) {
        case Filter::Simple: return 's';
        case Filter::Deletion: return 'd';
        case Filter::Forward: return 'f';
        case Filter::Backward: return 'b';
        case Filter::Range: return 'r';
        case Filter::CC: return 'c';
        case Filter::CCRange: return 'o';
    }
    return '?';
}

auto all_filters() -> std::vector<Filter> const & {
    static std::vector<Filter> const filters = {Filter::Simple, Filter::Deletion, Filter::Forward, Filter::Backward,
                                                Filter::Range,  Filter::CC,       Filter::CCRange};
    return filters;
}

// {{{1 ConsistencyOracle

ConsistencyOracle::ConsistencyOracle(Space base, OracleMode mode, SearchLimits limits)
    : base_{std::move(base)}, mode_{mode}, limits_{limits} {}

auto ConsistencyOracle::decide(Space &space) -> bool {
    ++checks_;
    if (!space.propagate()) {
        return false;
    }
    if (mode_ == OracleMode::Search) {
        return search(space, limits_).has_value();
    }
    return true;
}

auto ConsistencyOracle::consistent(ConstraintList const &list) -> bool { return start(list).consistent; }

auto ConsistencyOracle::start(ConstraintList const &list) -> Work {
    Work work{base_, true};
    for (auto const &c : list) {
        work.space.post(c);
    }
    if (!list.empty()) {
        ++rebuilds_;
    }
    work.consistent = decide(work.space);
    return work;
}

auto ConsistencyOracle::restart(Work const &from, ArithConstraint const &c) -> Work {
    ++rebuilds_;
    Work work{from};
    if (work.consistent) {
        work.space.post(c);
        work.consistent = decide(work.space);
    }
    return work;
}

auto ConsistencyOracle::extend(Work &work, ArithConstraint const &c) -> bool {
    if (work.consistent) {
        work.space.post(c);
        work.consistent = decide(work.space);
    }
    return work.consistent;
}

auto ConsistencyOracle::first_failure(Work &work, ConstraintList const &list, std::span<std::size_t const> items)
    -> std::size_t {
    std::size_t pos = 0;
    std::size_t limit = items.size();
    std::size_t chunk = 1;
    while (pos < limit && work.consistent) {
        auto end = std::min(limit, pos + chunk);
        if (end - pos == 1) {
            if (!extend(work, list[items[pos]])) {
                return pos;
            }
            ++pos;
            chunk *= 2;
            continue;
        }
        auto snapshot = work.space;
        for (auto k = pos; k < end; ++k) {
            work.space.post(list[items[k]]);
        }
        if (decide(work.space)) {
            pos = end;
            chunk *= 2;
            continue;
        }
        // the failing constraint lies in [pos, end)
        work.space = std::move(snapshot);
        limit = end;
        chunk = 1;
    }
    return work.consistent ? items.size() : pos;
}

// {{{1 Filters

auto simple_filtering(ConstraintList const &list) -> std::vector<std::size_t> {
    std::vector<std::size_t> out(list.size());
    std::iota(out.begin(), out.end(), 0);
    return out;
}

auto deletion_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t> {
    auto current = simple_filtering(list);
    std::size_t i = 0;
    while (i < current.size()) {
        auto test = current;
        test.erase(test.begin() + static_cast<std::ptrdiff_t>(i));
        if (!oracle.consistent(select(list, test))) {
            current = std::move(test);
        }
        else {
            ++i;
        }
    }
    return current;
}

auto forward_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t> {
    return forward_in_order(list, simple_filtering(list), oracle);
}

auto backward_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t> {
    auto order = simple_filtering(list);
    std::reverse(order.begin(), order.end());
    return forward_in_order(list, order, oracle);
}

auto range_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t> {
    std::vector<std::size_t> result(list.size());
    std::iota(result.rbegin(), result.rend(), 0);
    auto work = oracle.start({});
    if (!work.consistent) {
        return {};
    }
    auto k = oracle.first_failure(work, list, result);
    if (k == result.size()) {
        consistent_input();
    }
    result.resize(k + 1);
    return result;
}

auto cc_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t> {
    return cc_scan(list, oracle, false);
}

auto cc_range_filtering(ConstraintList const &list, ConsistencyOracle &oracle) -> std::vector<std::size_t> {
    return cc_scan(list, oracle, true);
}

auto filter_positions(Filter filter, ConstraintList const &list, ConsistencyOracle &oracle)
    -> std::vector<std::size_t> {
    switch (filter) {
        case Filter::Simple: return simple_filtering(list);
        case Filter::Deletion: return deletion_filtering(list, oracle);
        case Filter::Forward: return forward_filtering(list, oracle);
        case Filter::Backward: return backward_filtering(list, oracle);
        case Filter::Range: return range_filtering(list, oracle);
        case Filter::CC: return cc_filtering(list, oracle);
        case Filter::CCRange: return cc_range_filtering(list, oracle);
    }
    return simple_filtering(list);
}

auto apply_filter(Filter filter, ConstraintList const &list, ConsistencyOracle &oracle) -> ConstraintList {
    return select(list, filter_positions(filter, list, oracle));
}

// {{{1 Nogoods

auto conflict_nogood(std::span<Literal const> literals, ConstraintList const &list, Filter filter,
                     ConsistencyOracle &oracle) -> Nogood {
    std::vector<Literal> lits;
    for (auto i : filter_positions(filter, list, oracle)) {
        lits.push_back(literals[i]);
    }
    auto ng = Nogood::make(std::move(lits));
    if (!ng) {
        throw InternalError("conflict over complementary literals");
    }
    return *ng;
}

auto reason_nogood(std::span<Literal const> literals, ConstraintList const &list, Literal propagated,
                   ArithConstraint const &implied, Filter filter, ConsistencyOracle &oracle) -> Nogood {
    auto extended = list;
    extended.push_back(implied.complement());
    return reason_nogood_appended(literals, extended, propagated, filter, oracle);
}

auto reason_nogood_appended(std::span<Literal const> literals, ConstraintList const &extended, Literal propagated,
                            Filter filter, ConsistencyOracle &oracle) -> Nogood {
    std::vector<Literal> lits{~propagated};
    for (auto i : filter_positions(filter, extended, oracle)) {
        if (i + 1 < extended.size()) {
            lits.push_back(literals[i]);
        }
    }
    auto ng = Nogood::make(std::move(lits));
    if (!ng) {
        throw InternalError("reason over complementary literals");
    }
    return *ng;
}

} // namespace Casp
