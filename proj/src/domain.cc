#include "casp/domain.hh"

#include <algorithm>
#include <cmath>

namespace Casp {

auto clamp_inf(__int128 v) -> val_t {
    if (v >= INF) {
        return INF;
    }
    if (v <= -INF) {
        return -INF;
    }
    return static_cast<val_t>(v);
}

namespace {

auto inf(val_t v) -> bool { return v >= INF || v <= -INF; }

auto mul(val_t a, val_t b) -> val_t {
    if (a == 0 || b == 0) {
        return 0;
    }
    if (inf(a) || inf(b)) {
        return (a > 0) == (b > 0) ? INF : -INF;
    }
    return clamp_inf(static_cast<__int128>(a) * b);
}

auto floor_div(val_t a, val_t b) -> val_t {
    if (inf(a)) {
        return (a > 0) == (b > 0) ? INF : -INF;
    }
    auto q = a / b;
    return (a % b != 0 && ((a < 0) != (b < 0))) ? q - 1 : q;
}

auto ceil_div(val_t a, val_t b) -> val_t {
    if (inf(a)) {
        return (a > 0) == (b > 0) ? INF : -INF;
    }
    auto q = a / b;
    return (a % b != 0 && ((a < 0) == (b < 0))) ? q + 1 : q;
}

//! Divisor of constant sign.
auto divide_signed(Interval t, Interval b) -> Interval {
    auto lower = [&](val_t y) { return y > 0 ? ceil_div(t.lo, y) : ceil_div(t.hi, y); };
    auto upper = [&](val_t y) { return y > 0 ? floor_div(t.hi, y) : floor_div(t.lo, y); };
    auto lo = std::min(lower(b.lo), lower(b.hi));
    auto hi = std::max(upper(b.lo), upper(b.hi));
    return {lo, hi};
}

} // namespace

auto operator+(Interval a, Interval b) -> Interval {
    if (a.empty() || b.empty()) {
        return {1, 0};
    }
    auto lo = (a.lo <= -INF || b.lo <= -INF) ? -INF : clamp_inf(static_cast<__int128>(a.lo) + b.lo);
    auto hi = (a.hi >= INF || b.hi >= INF) ? INF : clamp_inf(static_cast<__int128>(a.hi) + b.hi);
    return {lo, hi};
}

auto operator-(Interval a) -> Interval {
    if (a.empty()) {
        return a;
    }
    return {-a.hi, -a.lo};
}

auto operator-(Interval a, Interval b) -> Interval { return a + (-b); }

auto operator*(Interval a, Interval b) -> Interval {
    if (a.empty() || b.empty()) {
        return {1, 0};
    }
    val_t c[] = {mul(a.lo, b.lo), mul(a.lo, b.hi), mul(a.hi, b.lo), mul(a.hi, b.hi)};
    return {*std::min_element(std::begin(c), std::end(c)), *std::max_element(std::begin(c), std::end(c))};
}

auto abs(Interval a) -> Interval {
    if (a.empty() || a.lo >= 0) {
        return a;
    }
    if (a.hi <= 0) {
        return -a;
    }
    return {0, std::max(-a.lo, a.hi)};
}

auto pow(Interval a, unsigned k) -> Interval {
    if (k == 0) {
        return {1, 1};
    }
    if (a.empty()) {
        return a;
    }
    auto p = [&](val_t v) {
        val_t r = 1;
        for (unsigned i = 0; i < k; ++i) {
            r = mul(r, v);
        }
        return r;
    };
    if (k % 2 == 1) {
        return {p(a.lo), p(a.hi)};
    }
    auto m = abs(a);
    return {p(m.lo), p(m.hi)};
}

auto hull(Interval a, Interval b) -> Interval {
    if (a.empty()) {
        return b;
    }
    if (b.empty()) {
        return a;
    }
    return {std::min(a.lo, b.lo), std::max(a.hi, b.hi)};
}

auto meet(Interval a, Interval b) -> Interval { return {std::max(a.lo, b.lo), std::min(a.hi, b.hi)}; }

auto divide(Interval t, Interval b) -> Interval {
    if (t.empty() || b.empty()) {
        return {1, 0};
    }
    if (b.contains(0)) {
        if (t.contains(0)) {
            return {};
        }
        Interval out{1, 0};
        if (b.lo < 0) {
            out = hull(out, divide_signed(t, {b.lo, -1}));
        }
        if (b.hi > 0) {
            out = hull(out, divide_signed(t, {1, b.hi}));
        }
        return out;
    }
    return divide_signed(t, b);
}

auto iroot(val_t v, unsigned k) -> val_t {
    if (v <= 0) {
        return 0;
    }
    if (k == 1 || v >= INF) {
        return v >= INF && k > 1 ? INF : v;
    }
    auto r = static_cast<val_t>(std::pow(static_cast<long double>(v), 1.0L / k));
    auto p = [&](val_t x) { return pow(Interval{x, x}, k).lo; };
    while (r > 0 && p(r) > v) {
        --r;
    }
    while (p(r + 1) <= v) {
        ++r;
    }
    return r;
}

Domain::Domain(val_t lo, val_t hi) {
    if (lo <= hi) {
        parts_.push_back({lo, hi});
    }
}

auto Domain::from(std::vector<Interval> parts) -> Domain {
    std::erase_if(parts, [](Interval i) { return i.empty(); });
    std::sort(parts.begin(), parts.end(), [](Interval a, Interval b) { return a.lo < b.lo; });
    Domain d;
    for (auto i : parts) {
        if (!d.parts_.empty() && i.lo <= d.parts_.back().hi + 1) {
            d.parts_.back().hi = std::max(d.parts_.back().hi, i.hi);
        }
        else {
            d.parts_.push_back(i);
        }
    }
    return d;
}

auto Domain::size() const -> val_t {
    if (parts_.size() == 1) {
        auto width = static_cast<std::uint64_t>(parts_[0].hi) - static_cast<std::uint64_t>(parts_[0].lo);
        return width >= static_cast<std::uint64_t>(INF) ? INF : static_cast<val_t>(width) + 1;
    }
    __int128 n = 0;
    for (auto i : parts_) {
        n += static_cast<__int128>(i.hi) - i.lo + 1;
    }
    return clamp_inf(n);
}

auto Domain::contains(val_t v) const -> bool {
    auto it = std::lower_bound(parts_.begin(), parts_.end(), v, [](Interval i, val_t x) { return i.hi < x; });
    return it != parts_.end() && it->lo <= v;
}

auto Domain::values() const -> std::vector<val_t> {
    std::vector<val_t> out;
    for (auto i : parts_) {
        for (auto v = i.lo; v <= i.hi; ++v) {
            out.push_back(v);
        }
    }
    return out;
}

auto Domain::intersect(Interval i) -> bool {
    if (empty() || (i.lo <= min() && max() <= i.hi)) {
        return false;
    }
    Intervals next;
    for (auto p : parts_) {
        auto m = meet(p, i);
        if (!m.empty()) {
            next.push_back(m);
        }
    }
    parts_ = std::move(next);
    return true;
}

auto Domain::intersect(Domain const &other) -> bool {
    Intervals next;
    std::size_t j = 0;
    for (auto p : parts_) {
        while (j < other.parts_.size() && other.parts_[j].hi < p.lo) {
            ++j;
        }
        for (auto k = j; k < other.parts_.size() && other.parts_[k].lo <= p.hi; ++k) {
            next.push_back(meet(p, other.parts_[k]));
        }
    }
    if (next == parts_) {
        return false;
    }
    parts_ = std::move(next);
    return true;
}

auto Domain::remove(val_t v) -> bool {
    auto it = std::lower_bound(parts_.begin(), parts_.end(), v, [](Interval i, val_t x) { return i.hi < x; });
    if (it == parts_.end() || it->lo > v) {
        return false;
    }
    if (it->lo == v && it->hi == v) {
        parts_.erase(it);
    }
    else if (it->lo == v) {
        ++it->lo;
    }
    else if (it->hi == v) {
        --it->hi;
    }
    else {
        Interval right{v + 1, it->hi};
        it->hi = v - 1;
        parts_.insert(it + 1, right);
    }
    return true;
}

auto Domain::assign(val_t v) -> bool {
    if (fixed() && min() == v) {
        return false;
    }
    bool had = contains(v);
    parts_.clear();
    if (had) {
        parts_.push_back({v, v});
    }
    return true;
}

auto Domain::to_string() const -> std::string {
    std::string out = "{";
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        out += (i > 0 ? "," : "") + std::string{"["} + std::to_string(parts_[i].lo) + "," +
               std::to_string(parts_[i].hi) + "]";
    }
    return out + "}";
}

} // namespace Casp
