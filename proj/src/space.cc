#include "casp/space.hh"

#include <algorithm>
#include <bit>
#include <cstdlib>
#include <map>

namespace Casp {

namespace {

constexpr val_t EXACT_LIMIT = 64;

auto ceil_root(val_t v, unsigned k) -> val_t {
    auto r = iroot(v, k);
    return pow(Interval{r, r}, k).lo < v ? r + 1 : r;
}

auto mirror(Domain const &d) -> Domain {
    std::vector<Interval> parts;
    for (auto i : d.intervals()) {
        parts.push_back(-i);
    }
    return Domain::from(std::move(parts));
}

auto relation_target(Relation rel) -> Interval {
    switch (rel) {
        case Relation::EQ: return {0, 0};
        case Relation::LT: return {-INF, -1};
        case Relation::LE: return {-INF, 0};
        case Relation::GT: return {1, INF};
        case Relation::GE: return {0, INF};
        case Relation::NE: break;
    }
    return {-INF, INF};
}

auto interval_truth(Interval r, Relation rel) -> Truth {
    if (r.empty()) {
        return Truth::Unknown;
    }
    bool yes = false;
    bool no = false;
    switch (rel) {
        case Relation::EQ:
            yes = r.lo == 0 && r.hi == 0;
            no = !r.contains(0);
            break;
        case Relation::NE:
            yes = !r.contains(0);
            no = r.lo == 0 && r.hi == 0;
            break;
        case Relation::LT:
            yes = r.hi < 0;
            no = r.lo >= 0;
            break;
        case Relation::LE:
            yes = r.hi <= 0;
            no = r.lo > 0;
            break;
        case Relation::GT:
            yes = r.lo > 0;
            no = r.hi <= 0;
            break;
        case Relation::GE:
            yes = r.lo >= 0;
            no = r.hi < 0;
            break;
    }
    return yes ? Truth::True : (no ? Truth::False : Truth::Unknown);
}

auto fw_scratch() -> std::vector<Interval> & {
    thread_local std::vector<Interval> fw;
    return fw;
}

void merge_vars(std::vector<var_t> &out, std::vector<var_t> const &more) {
    for (auto v : more) {
        if (std::find(out.begin(), out.end(), v) == out.end()) {
            out.push_back(v);
        }
    }
}

} // namespace

// {{{1 ExprTree

ExprTree::ExprTree(Expr const &expr) { build(expr); }

auto ExprTree::build(Expr const &expr) -> std::uint32_t {
    Node node;
    node.op = expr.op();
    switch (expr.op()) {
        case Expr::Op::Const: node.value = expr.value(); break;
        case Expr::Op::Var:
            node.value = expr.var();
            if (std::find(vars_.begin(), vars_.end(), expr.var()) == vars_.end()) {
                vars_.push_back(expr.var());
            }
            break;
        case Expr::Op::Mul: {
            std::vector<std::string> keys;
            for (auto const &arg : expr.args()) {
                auto key = arg.key();
                auto it = std::find(keys.begin(), keys.end(), key);
                if (it != keys.end()) {
                    ++node.kids[static_cast<std::size_t>(it - keys.begin())].second;
                }
                else {
                    keys.push_back(key);
                    node.kids.emplace_back(build(arg), 1);
                }
            }
            break;
        }
        default:
            for (auto const &arg : expr.args()) {
                node.kids.emplace_back(build(arg), 1);
            }
            break;
    }
    nodes_.push_back(std::move(node));
    return static_cast<std::uint32_t>(nodes_.size() - 1);
}

void ExprTree::forward(std::vector<Domain> const &doms, std::vector<Interval> &out) const {
    out.resize(nodes_.size());
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto const &n = nodes_[i];
        switch (n.op) {
            case Expr::Op::Const: out[i] = {n.value, n.value}; break;
            case Expr::Op::Var: out[i] = doms[static_cast<var_t>(n.value)].hull(); break;
            case Expr::Op::Add: {
                Interval sum{0, 0};
                for (auto [k, e] : n.kids) {
                    sum = sum + out[k];
                }
                out[i] = sum;
                break;
            }
            case Expr::Op::Sub: out[i] = out[n.kids[0].first] - out[n.kids[1].first]; break;
            case Expr::Op::Mul: {
                Interval prod{1, 1};
                for (auto [k, e] : n.kids) {
                    prod = prod * pow(out[k], e);
                }
                out[i] = prod;
                break;
            }
            case Expr::Op::Neg: out[i] = -out[n.kids[0].first]; break;
            case Expr::Op::Abs: out[i] = abs(out[n.kids[0].first]); break;
        }
    }
}

auto ExprTree::interval(std::vector<Domain> const &doms) const -> Interval {
    auto &fw = fw_scratch();
    forward(doms, fw);
    return fw.back();
}

auto ExprTree::project(std::vector<Domain> &doms, Domain const &target, std::vector<var_t> &changed) const
    -> bool {
    std::vector<Interval> fw;
    forward(doms, fw);
    return project(static_cast<std::uint32_t>(nodes_.size() - 1), target, doms, fw, changed);
}

auto ExprTree::project(std::uint32_t index, Domain const &target, std::vector<Domain> &doms,
                       std::vector<Interval> const &fw, std::vector<var_t> &changed) const -> bool {
    Domain t = target;
    t.intersect(fw[index]);
    if (t.empty()) {
        return false;
    }
    auto const &n = nodes_[index];
    auto th = t.hull();
    switch (n.op) {
        case Expr::Op::Const: return true;
        case Expr::Op::Var: {
            auto var = static_cast<var_t>(n.value);
            if (doms[var].intersect(t)) {
                changed.push_back(var);
            }
            return !doms[var].empty();
        }
        case Expr::Op::Add: {
            auto k = n.kids.size();
            std::vector<Interval> suffix(k + 1, Interval{0, 0});
            for (auto i = k; i-- > 0;) {
                suffix[i] = suffix[i + 1] + fw[n.kids[i].first];
            }
            Interval prefix{0, 0};
            for (std::size_t i = 0; i < k; ++i) {
                auto rest = prefix + suffix[i + 1];
                if (!project(n.kids[i].first, Domain{th - rest}, doms, fw, changed)) {
                    return false;
                }
                prefix = prefix + fw[n.kids[i].first];
            }
            return true;
        }
        case Expr::Op::Sub: {
            auto a = n.kids[0].first;
            auto b = n.kids[1].first;
            return project(a, Domain{th + fw[b]}, doms, fw, changed) &&
                   project(b, Domain{fw[a] - th}, doms, fw, changed);
        }
        case Expr::Op::Neg: return project(n.kids[0].first, mirror(t), doms, fw, changed);
        case Expr::Op::Abs: {
            auto pos = t;
            pos.intersect(Interval{0, INF});
            std::vector<Interval> parts(pos.intervals().begin(), pos.intervals().end());
            auto neg = mirror(pos);
            for (auto i : neg.intervals()) {
                parts.push_back(i);
            }
            return project(n.kids[0].first, Domain::from(std::move(parts)), doms, fw, changed);
        }
        case Expr::Op::Mul: {
            auto k = n.kids.size();
            std::vector<Interval> suffix(k + 1, Interval{1, 1});
            for (auto i = k; i-- > 0;) {
                suffix[i] = suffix[i + 1] * pow(fw[n.kids[i].first], n.kids[i].second);
            }
            Interval prefix{1, 1};
            for (std::size_t i = 0; i < k; ++i) {
                auto [kid, e] = n.kids[i];
                auto q = divide(th, prefix * suffix[i + 1]);
                prefix = prefix * pow(fw[kid], e);
                if (q.empty()) {
                    return false;
                }
                Domain child;
                if (e == 1) {
                    child = Domain{q};
                }
                else if (e % 2 == 0) {
                    if (q.hi < 0) {
                        return false;
                    }
                    auto r2 = iroot(q.hi, e);
                    auto r1 = q.lo <= 0 ? 0 : ceil_root(q.lo, e);
                    if (r1 > r2) {
                        return false;
                    }
                    child = Domain::from({{-r2, -r1}, {r1, r2}});
                }
                else {
                    auto lo = q.lo >= 0 ? ceil_root(q.lo, e) : -iroot(-q.lo, e);
                    auto hi = q.hi >= 0 ? iroot(q.hi, e) : -ceil_root(-q.hi, e);
                    child = Domain{lo, hi};
                }
                if (!project(kid, child, doms, fw, changed)) {
                    return false;
                }
            }
            return true;
        }
    }
    return true;
}

template <class Leaf> auto ExprTree::eval(std::uint32_t index, Leaf const &leaf) const -> val_t {
    auto const &n = nodes_[index];
    auto point = [](val_t v) { return Interval{v, v}; };
    switch (n.op) {
        case Expr::Op::Const: return n.value;
        case Expr::Op::Var: return leaf(static_cast<var_t>(n.value));
        case Expr::Op::Add: {
            Interval sum{0, 0};
            for (auto [k, e] : n.kids) {
                sum = sum + point(eval(k, leaf));
            }
            return sum.lo;
        }
        case Expr::Op::Sub: return (point(eval(n.kids[0].first, leaf)) - point(eval(n.kids[1].first, leaf))).lo;
        case Expr::Op::Mul: {
            Interval prod{1, 1};
            for (auto [k, e] : n.kids) {
                prod = prod * pow(point(eval(k, leaf)), e);
            }
            return prod.lo;
        }
        case Expr::Op::Neg: return -eval(n.kids[0].first, leaf);
        case Expr::Op::Abs: {
            auto v = eval(n.kids[0].first, leaf);
            return v < 0 ? -v : v;
        }
    }
    return 0;
}

auto ExprTree::evaluate(std::vector<Domain> const &doms) const -> val_t {
    return eval(static_cast<std::uint32_t>(nodes_.size() - 1), [&](var_t v) { return doms[v].min(); });
}

auto ExprTree::evaluate(std::span<val_t const> values) const -> val_t {
    return eval(static_cast<std::uint32_t>(nodes_.size() - 1), [&](var_t v) { return values[v]; });
}

auto ExprTree::occurrences(var_t var) const -> std::size_t {
    std::vector<std::size_t> occ(nodes_.size(), 0);
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        auto const &n = nodes_[i];
        if (n.op == Expr::Op::Var) {
            occ[i] = static_cast<var_t>(n.value) == var ? 1 : 0;
        }
        for (auto [k, e] : n.kids) {
            occ[i] += occ[k] * e;
        }
    }
    return occ.back();
}

// {{{1 ArithPropagator

ArithPropagator::ArithPropagator(ArithConstraint const &c) : tree_{Expr::sub(c.lhs, c.rhs)}, rel_{c.rel} {}

auto ArithPropagator::unfixed(std::vector<Domain> const &doms, std::size_t &count) const -> std::optional<var_t> {
    count = 0;
    std::optional<var_t> last;
    for (auto v : tree_.vars()) {
        if (!doms[v].fixed()) {
            ++count;
            last = v;
        }
    }
    return count == 1 ? last : std::nullopt;
}

auto ArithPropagator::point(std::vector<Domain> const &doms) const -> std::vector<val_t> & {
    thread_local std::vector<val_t> values;
    values.resize(doms.size());
    for (auto v : tree_.vars()) {
        values[v] = doms[v].empty() ? 0 : doms[v].min();
    }
    return values;
}

auto ArithPropagator::propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool {
    std::size_t count = 0;
    auto x = unfixed(doms, count);
    if (count == 0) {
        return holds(tree_.evaluate(doms));
    }
    if (x && doms[*x].size() <= EXACT_LIMIT) {
        std::vector<Interval> keep;
        auto &leaf = point(doms);
        for (auto v : doms[*x].values()) {
            leaf[*x] = v;
            if (holds(tree_.evaluate(leaf))) {
                keep.push_back({v, v});
            }
        }
        auto next = Domain::from(std::move(keep));
        if (next != doms[*x]) {
            doms[*x] = std::move(next);
            changed.push_back(*x);
        }
        return !doms[*x].empty();
    }
    if (rel_ != Relation::NE) {
        return tree_.project(doms, Domain{relation_target(rel_)}, changed);
    }
    auto r = tree_.interval(doms);
    if (r.lo == 0 && r.hi == 0) {
        return false;
    }
    if (x && tree_.occurrences(*x) == 1) {
        // the only value of x that could make the difference zero
        std::vector<std::pair<var_t, Domain>> saved;
        for (auto v : tree_.vars()) {
            saved.emplace_back(v, doms[v]);
        }
        std::vector<var_t> ignored;
        bool possible = tree_.project(doms, Domain{0, 0}, ignored);
        auto candidate = doms[*x];
        for (auto &[v, d] : saved) {
            doms[v] = std::move(d);
        }
        if (possible && candidate.fixed()) {
            auto c = candidate.min();
            auto &leaf = point(doms);
            leaf[*x] = c;
            if (!holds(tree_.evaluate(leaf)) && doms[*x].remove(c)) {
                changed.push_back(*x);
            }
        }
    }
    return !x || !doms[*x].empty();
}

auto ArithPropagator::entail(std::vector<Domain> const &doms) const -> Truth {
    std::size_t count = 0;
    auto x = unfixed(doms, count);
    if (count == 0) {
        for (auto v : tree_.vars()) {
            if (doms[v].empty()) {
                return Truth::Unknown;
            }
        }
        return holds(tree_.evaluate(doms)) ? Truth::True : Truth::False;
    }
    if (x && doms[*x].size() <= EXACT_LIMIT) {
        std::size_t yes = 0;
        std::size_t total = 0;
        auto &values = point(doms);
        for (auto v : doms[*x].values()) {
            values[*x] = v;
            yes += holds(tree_.evaluate(values)) ? 1 : 0;
            ++total;
        }
        return yes == total ? Truth::True : (yes == 0 ? Truth::False : Truth::Unknown);
    }
    return interval_truth(tree_.interval(doms), rel_);
}

auto ArithPropagator::check(std::span<val_t const> values) const -> bool { return holds(tree_.evaluate(values)); }

// {{{1 CountPropagator

CountPropagator::CountPropagator(CountConstraint const &c) : constraints_{c.elements}, bound_{c.bound}, rel_{c.rel} {
    for (auto const &e : c.elements) {
        elements_.emplace_back(e);
        complements_.emplace_back(e.complement());
        merge_vars(vars_, elements_.back().vars());
    }
    merge_vars(vars_, bound_.vars());
}

auto CountPropagator::propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool {
    val_t t = 0;
    val_t p = 0;
    std::vector<bool> open(elements_.size(), false);
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        switch (elements_[i].entail(doms)) {
            case Truth::True:
                ++t;
                ++p;
                break;
            case Truth::Unknown:
                ++p;
                open[i] = true;
                break;
            case Truth::False: break;
        }
    }
    Interval allowed;
    switch (rel_) {
        case Relation::EQ: allowed = {t, p}; break;
        case Relation::LE: allowed = {t, INF}; break;
        case Relation::LT: allowed = {t + 1, INF}; break;
        case Relation::GE: allowed = {-INF, p}; break;
        case Relation::GT: allowed = {-INF, p - 1}; break;
        case Relation::NE: break;
    }
    if (!bound_.project(doms, Domain{allowed}, changed)) {
        return false;
    }
    auto b = bound_.interval(doms);
    if (rel_ == Relation::NE) {
        if (t == p && b.fixed() && b.lo == t) {
            return false;
        }
        if (t == p && bound_.is_var()) {
            auto v = bound_.vars().front();
            if (doms[v].remove(t)) {
                changed.push_back(v);
            }
            return !doms[v].empty();
        }
        return true;
    }
    val_t nl = 0;
    val_t nh = INF;
    switch (rel_) {
        case Relation::EQ:
            nl = b.lo;
            nh = b.hi;
            break;
        case Relation::LE: nh = b.hi; break;
        case Relation::LT: nh = b.hi - 1; break;
        case Relation::GE: nl = b.lo; break;
        case Relation::GT: nl = b.lo + 1; break;
        case Relation::NE: break;
    }
    if (t > nh || p < nl) {
        return false;
    }
    if (t == nh && p > t) {
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (open[i] && !complements_[i].propagate(doms, changed)) {
                return false;
            }
        }
    }
    else if (p == nl && t < p) {
        for (std::size_t i = 0; i < elements_.size(); ++i) {
            if (open[i] && !elements_[i].propagate(doms, changed)) {
                return false;
            }
        }
    }
    return true;
}

auto CountPropagator::check(std::span<val_t const> values) const -> bool {
    val_t n = 0;
    for (auto const &e : elements_) {
        n += e.check(values) ? 1 : 0;
    }
    return Casp::holds(n, rel_, bound_.evaluate(values));
}

// {{{1 DistinctPropagator

DistinctPropagator::DistinctPropagator(DistinctConstraint const &c) {
    for (auto const &e : c.exprs) {
        exprs_.emplace_back(e);
        merge_vars(vars_, exprs_.back().vars());
    }
    if (std::all_of(exprs_.begin(), exprs_.end(), [](ExprTree const &e) { return e.is_var(); })) {
        for (auto const &e : exprs_) {
            direct_.push_back(e.vars().front());
        }
    }
}

auto DistinctPropagator::propagate_masks(std::vector<Domain> &doms, std::vector<var_t> &changed, val_t lo) const
    -> bool {
    auto n = direct_.size();
    thread_local std::vector<std::uint64_t> masks;
    masks.resize(n);
    std::uint64_t fixed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t m = 0;
        for (auto iv : doms[direct_[i]].intervals()) {
            auto a = static_cast<unsigned>(iv.lo - lo);
            auto b = static_cast<unsigned>(iv.hi - lo);
            auto upto = b == 63 ? ~std::uint64_t{0} : (std::uint64_t{1} << (b + 1)) - 1;
            m |= upto & ~((std::uint64_t{1} << a) - 1);
        }
        masks[i] = m;
        if (m != 0 && (m & (m - 1)) == 0) {
            if ((fixed & m) != 0) {
                return false;
            }
            fixed |= m;
        }
    }
    std::uint64_t all = 0;
    for (std::size_t i = 0; i < n; ++i) {
        auto hit = masks[i] & fixed;
        if (hit != 0 && (masks[i] & (masks[i] - 1)) != 0) {
            auto x = direct_[i];
            for (; hit != 0; hit &= hit - 1) {
                doms[x].remove(lo + std::countr_zero(hit));
            }
            changed.push_back(x);
            masks[i] &= ~fixed;
            if (masks[i] == 0) {
                return false;
            }
        }
        all |= masks[i];
    }
    return static_cast<std::size_t>(std::popcount(all)) >= n;
}

auto DistinctPropagator::propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool {
    auto n = exprs_.size();
    if (!direct_.empty()) {
        auto lo = INF;
        auto hi = -INF;
        for (auto x : direct_) {
            auto const &d = doms[x];
            if (d.empty()) {
                return false;
            }
            lo = std::min(lo, d.min());
            hi = std::max(hi, d.max());
        }
        if (static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo) < 64) {
            return propagate_masks(doms, changed, lo);
        }
    }
    thread_local std::vector<Interval> hulls;
    thread_local std::vector<val_t> fixed;
    hulls.resize(n);
    fixed.clear();
    for (std::size_t i = 0; i < n; ++i) {
        hulls[i] = exprs_[i].is_var() ? doms[exprs_[i].vars().front()].hull() : exprs_[i].interval(doms);
        if (hulls[i].fixed()) {
            fixed.push_back(hulls[i].lo);
        }
    }
    std::sort(fixed.begin(), fixed.end());
    if (std::adjacent_find(fixed.begin(), fixed.end()) != fixed.end()) {
        return false;
    }
    // value elimination; newly fixed variables are handled when rerun
    val_t largest = 0;
    std::size_t unfixed = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (hulls[j].fixed()) {
            continue;
        }
        ++unfixed;
        if (exprs_[j].is_var() && !fixed.empty()) {
            auto x = exprs_[j].vars().front();
            auto &dom = doms[x];
            bool removed = false;
            auto it = std::lower_bound(fixed.begin(), fixed.end(), hulls[j].lo);
            for (; it != fixed.end() && *it <= hulls[j].hi; ++it) {
                removed = dom.remove(*it) || removed;
            }
            if (removed) {
                changed.push_back(x);
                if (dom.empty()) {
                    return false;
                }
                hulls[j] = dom.hull();
            }
            largest = std::max(largest, dom.size());
        }
        else if (exprs_[j].is_var()) {
            largest = std::max(largest, doms[exprs_[j].vars().front()].size());
        }
    }
    // pigeonhole: the union of all values must hold n distinct values
    if (unfixed == 0 || static_cast<val_t>(fixed.size()) + largest >= static_cast<val_t>(n)) {
        return true;
    }
    thread_local std::vector<Interval> parts;
    parts.clear();
    for (std::size_t i = 0; i < n; ++i) {
        if (exprs_[i].is_var()) {
            auto const &d = doms[exprs_[i].vars().front()].intervals();
            parts.insert(parts.end(), d.begin(), d.end());
        }
        else {
            parts.push_back(hulls[i]);
        }
    }
    std::sort(parts.begin(), parts.end(), [](Interval a, Interval b) { return a.lo < b.lo; });
    val_t total = 0;
    val_t covered = -INF;
    for (auto i : parts) {
        auto lo = std::max(i.lo, covered + 1);
        if (lo <= i.hi) {
            total += i.hi - lo + 1;
            covered = i.hi;
        }
        if (total >= static_cast<val_t>(n)) {
            return true;
        }
    }
    return total >= static_cast<val_t>(n);
}

auto DistinctPropagator::check(std::span<val_t const> values) const -> bool {
    std::vector<val_t> seen;
    for (auto const &e : exprs_) {
        seen.push_back(e.evaluate(values));
    }
    std::sort(seen.begin(), seen.end());
    return std::adjacent_find(seen.begin(), seen.end()) == seen.end();
}

// {{{1 LexPropagator

LexPropagator::LexPropagator(std::vector<Expr> const &exprs, std::vector<val_t> bound, bool strict)
    : bound_{std::move(bound)}, strict_{strict} {
    for (auto const &e : exprs) {
        exprs_.emplace_back(e);
        merge_vars(vars_, exprs_.back().vars());
    }
}

auto LexPropagator::propagate(std::vector<Domain> &doms, std::vector<var_t> &changed) const -> bool {
    for (std::size_t i = 0; i < exprs_.size(); ++i) {
        auto last = i + 1 == exprs_.size();
        auto bound = last && strict_ ? bound_[i] - 1 : bound_[i];
        if (!exprs_[i].project(doms, Domain{-INF, bound}, changed)) {
            return false;
        }
        auto r = exprs_[i].interval(doms);
        if (r.hi < bound_[i] || !r.fixed()) {
            return true;
        }
    }
    return !strict_;
}

auto LexPropagator::check(std::span<val_t const> values) const -> bool {
    for (std::size_t i = 0; i < exprs_.size(); ++i) {
        auto v = exprs_[i].evaluate(values);
        if (v != bound_[i]) {
            return v < bound_[i];
        }
    }
    return !strict_;
}

// {{{1 Space

Space::Space(std::size_t num_vars, Domain initial) : doms_(num_vars, initial), changed_(num_vars, false) {}

auto Space::post_direct(ArithConstraint const &c) -> bool {
    var_t var = 0;
    val_t k = 0;
    auto rel = c.rel;
    if (c.lhs.op() == Expr::Op::Var && c.rhs.op() == Expr::Op::Const) {
        var = c.lhs.var();
        k = c.rhs.value();
    }
    else if (c.lhs.op() == Expr::Op::Const && c.rhs.op() == Expr::Op::Var) {
        var = c.rhs.var();
        k = c.lhs.value();
        rel = Casp::mirror(rel);
    }
    else {
        return false;
    }
    if (var >= doms_.size()) {
        throw InternalError("constraint over unknown variable");
    }
    if (failed_ || std::abs(k) >= INF) {
        return failed_;
    }
    auto &dom = doms_[var];
    bool changed = false;
    switch (rel) {
        case Relation::EQ: changed = dom.intersect(Interval{k, k}); break;
        case Relation::NE: changed = dom.remove(k); break;
        case Relation::LT: changed = dom.intersect(Interval{-INF, k - 1}); break;
        case Relation::LE: changed = dom.intersect(Interval{-INF, k}); break;
        case Relation::GT: changed = dom.intersect(Interval{k + 1, INF}); break;
        case Relation::GE: changed = dom.intersect(Interval{k, INF}); break;
    }
    if (changed) {
        if (dom.empty()) {
            failed_ = true;
        }
        touch(var);
    }
    return true;
}

void Space::post(ArithConstraint const &c) {
    if (post_direct(c)) {
        return;
    }
    auto prop = std::make_shared<ArithPropagator const>(c);
    for (auto v : prop->vars()) {
        if (v >= doms_.size()) {
            throw InternalError("constraint over unknown variable");
        }
    }
    if (prop->vars().size() <= 1 && !failed_) {
        // unary constraints are applied to the domain and dropped once entailed
        std::vector<var_t> changed;
        if (!prop->propagate(doms_, changed)) {
            failed_ = true;
            return;
        }
        for (auto v : changed) {
            touch(v);
        }
        if (prop->entail(doms_) == Truth::True) {
            return;
        }
    }
    post(std::shared_ptr<Propagator const>{std::move(prop)});
}
void Space::post(CountConstraint const &c) { post(std::make_shared<CountPropagator const>(c)); }
void Space::post(DistinctConstraint const &c) { post(std::make_shared<DistinctPropagator const>(c)); }

void Space::post(LexBound const &b) {
    std::vector<Expr> exprs;
    for (auto const &level : b.objectives) {
        exprs.push_back(minimization_form(level));
    }
    post(std::make_shared<LexPropagator const>(exprs, b.values, b.strict));
}

void Space::post(std::shared_ptr<Propagator const> prop) {
    if (!registry_) {
        registry_ = std::make_shared<Registry>();
    }
    else if (registry_.use_count() > 1) {
        registry_ = std::make_shared<Registry>(*registry_);
    }
    auto idx = static_cast<std::uint32_t>(registry_->props.size());
    registry_->subs.resize(doms_.size());
    for (auto v : prop->vars()) {
        if (v >= doms_.size()) {
            throw InternalError("constraint over unknown variable");
        }
        registry_->subs[v].push_back(idx);
    }
    registry_->props.push_back(std::move(prop));
    queued_.push_back(false);
    enqueue(idx);
}

void Space::enqueue(std::uint32_t prop) {
    if (!queued_[prop]) {
        queued_[prop] = true;
        queue_.push_back(prop);
    }
}

void Space::touch(var_t var) {
    if (registry_) {
        notify(var);
    }
    else if (!changed_[var]) {
        changed_[var] = true;
        changes_.push_back(var);
    }
}

void Space::notify(var_t var) {
    if (!changed_[var]) {
        changed_[var] = true;
        changes_.push_back(var);
    }
    for (auto q : registry_->subs[var]) {
        enqueue(q);
    }
}

void Space::narrow(var_t var, Interval i) {
    if (doms_[var].intersect(i)) {
        if (doms_[var].empty()) {
            failed_ = true;
        }
        touch(var);
    }
}

auto Space::propagate() -> bool {
    if (failed_) {
        queue_.clear();
        return false;
    }
    std::vector<var_t> changed;
    std::size_t head = 0;
    while (head < queue_.size()) {
        auto p = queue_[head++];
        queued_[p] = false;
        changed.clear();
        if (!registry_->props[p]->propagate(doms_, changed)) {
            failed_ = true;
            for (auto q : queue_) {
                queued_[q] = false;
            }
            queue_.clear();
            return false;
        }
        for (auto v : changed) {
            notify(v);
        }
        if (head > 1024 && head * 2 > queue_.size()) {
            queue_.erase(queue_.begin(), queue_.begin() + static_cast<std::ptrdiff_t>(head));
            head = 0;
        }
    }
    queue_.clear();
    return true;
}

auto Space::scopes() const -> std::vector<std::span<var_t const>> {
    std::vector<std::span<var_t const>> out;
    if (registry_) {
        out.reserve(registry_->props.size());
        for (auto const &p : registry_->props) {
            out.emplace_back(p->vars());
        }
    }
    return out;
}

auto Space::take_changes() -> std::vector<var_t> {
    for (auto v : changes_) {
        changed_[v] = false;
    }
    return std::exchange(changes_, {});
}

auto Space::entail(ArithConstraint const &c) const -> Truth {
    if (failed_) {
        return Truth::Unknown;
    }
    return ArithPropagator{c}.entail(doms_);
}

auto Space::probe_entail(ArithConstraint const &c) const -> Truth {
    if (failed_) {
        return Truth::Unknown;
    }
    auto quick = entail(c);
    if (quick != Truth::Unknown) {
        return quick;
    }
    Space with = *this;
    with.post(c);
    if (!with.propagate()) {
        return Truth::False;
    }
    Space without = *this;
    without.post(c.complement());
    if (!without.propagate()) {
        return Truth::True;
    }
    return Truth::Unknown;
}

auto Space::assignment() const -> std::optional<std::vector<val_t>> {
    std::vector<val_t> out;
    out.reserve(doms_.size());
    for (auto const &d : doms_) {
        if (!d.fixed()) {
            return std::nullopt;
        }
        out.push_back(d.min());
    }
    return out;
}

auto Space::check(std::span<val_t const> values) const -> bool {
    if (!registry_) {
        return true;
    }
    return std::all_of(registry_->props.begin(), registry_->props.end(),
                       [&](auto const &p) { return p->check(values); });
}

auto rebuild(ConstraintList const &constraints, Space const &base, std::size_t *counter) -> Space {
    Space space = base;
    for (auto const &c : constraints) {
        space.post(c);
    }
    space.propagate();
    if (counter != nullptr && !constraints.empty()) {
        ++*counter;
    }
    return space;
}

auto search(Space space, SearchLimits const &limits) -> std::optional<std::vector<val_t>> {
    std::vector<Space> stack;
    stack.push_back(std::move(space));
    std::uint64_t nodes = 0;
    while (!stack.empty()) {
        Space s = std::move(stack.back());
        stack.pop_back();
        if (limits.deadline && (++nodes & 255U) == 0 && std::chrono::steady_clock::now() >= *limits.deadline) {
            throw Timeout("time limit reached in constraint search");
        }
        if (!s.propagate()) {
            continue;
        }
        std::optional<var_t> pick;
        val_t best = INF;
        for (var_t v = 0; v < s.num_vars(); ++v) {
            auto size = s.domain(v).size();
            if (size > 1 && size < best) {
                best = size;
                pick = v;
            }
        }
        if (!pick) {
            auto values = s.assignment();
            if (values && s.check(*values)) {
                return values;
            }
            continue;
        }
        auto v = s.domain(*pick).min();
        Space right = s;
        right.narrow(*pick, {v + 1, INF});
        s.narrow(*pick, {v, v});
        stack.push_back(std::move(right));
        stack.push_back(std::move(s));
    }
    return std::nullopt;
}

auto minimization_form(ObjectiveLevel const &level) -> Expr {
    return level.first == Sense::Minimize ? level.second : Expr::neg(level.second);
}

auto branch_and_bound(Space space, std::vector<ObjectiveLevel> const &objectives, SearchLimits const &limits)
    -> std::optional<std::vector<val_t>> {
    auto best = search(space, limits);
    if (!best) {
        return std::nullopt;
    }
    for (auto const &level : objectives) {
        auto e = minimization_form(level);
        Space tighter = space;
        for (;;) {
            tighter.post(ArithConstraint{e, Relation::LT, Expr::constant(e.evaluate(*best))});
            auto next = search(tighter, limits);
            if (!next) {
                break;
            }
            best = std::move(next);
        }
        space.post(ArithConstraint{e, Relation::EQ, Expr::constant(e.evaluate(*best))});
    }
    return best;
}

} // namespace Casp
