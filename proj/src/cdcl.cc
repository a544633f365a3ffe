#include "casp/cdcl.hh"

#include <algorithm>
#include <cmath>
#include <random>

namespace Casp {

namespace {

constexpr double DECAY = 0.95;
constexpr double RESTART_FACTOR = 1.5;

} // namespace

auto Solver::Order::operator()(atom_t a, atom_t b) const -> bool {
    auto x = solver->activity_[a];
    auto y = solver->activity_[b];
    return x != y ? x > y : a < b;
}

Solver::Solver(std::size_t num_atoms, std::uint64_t seed) : heap_{Order{this}} {
    for (std::size_t i = 0; i < num_atoms; ++i) {
        add_atom();
    }
    if (seed != 0) {
        std::mt19937_64 rng{seed};
        std::uniform_real_distribution<double> noise{0.0, 1e-3};
        heap_.clear();
        for (auto &a : activity_) {
            a = noise(rng);
        }
        for (atom_t a = 0; a < values_.size(); ++a) {
            heap_.insert(a);
        }
    }
}

auto Solver::add_atom() -> atom_t {
    auto atom = static_cast<atom_t>(values_.size());
    values_.push_back(Value::Free);
    levels_.push_back(0);
    reasons_.push_back(NO_REASON);
    phase_.push_back(false);
    watched_.push_back(false);
    activity_.push_back(0.0);
    in_heap_.push_back(false);
    seen_.push_back(false);
    watches_.emplace_back();
    watches_.emplace_back();
    heap_insert(atom);
    return atom;
}

void Solver::watch(atom_t atom) { watched_[atom] = true; }

void Solver::add_propagator(PostPropagator &prop) {
    props_.push_back(&prop);
    for (auto lit : trail_) {
        if (watched_[lit.atom()]) {
            prop.on_assigned(*this, lit);
        }
    }
}

auto Solver::value(Literal lit) const -> Value {
    auto v = values_[lit.atom()];
    if (v == Value::Free || lit.sign()) {
        return v;
    }
    return v == Value::True ? Value::False : Value::True;
}

auto Solver::model() const -> std::vector<bool> {
    std::vector<bool> out(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        out[i] = values_[i] == Value::True;
    }
    return out;
}

void Solver::heap_insert(atom_t atom) {
    if (!in_heap_[atom]) {
        in_heap_[atom] = true;
        heap_.insert(atom);
    }
}

void Solver::assign(Literal lit, std::uint32_t reason) {
    auto atom = lit.atom();
    values_[atom] = lit.sign() ? Value::True : Value::False;
    levels_[atom] = decision_level();
    reasons_[atom] = reason;
    trail_.push_back(lit);
    if (watched_[atom]) {
        for (auto *p : props_) {
            p->on_assigned(*this, lit);
        }
    }
}

auto Solver::store(std::vector<Literal> lits) -> std::uint32_t {
    auto idx = static_cast<std::uint32_t>(clauses_.size());
    if (lits.size() >= 2) {
        watches_[(~lits[0]).index()].push_back(idx);
        watches_[(~lits[1]).index()].push_back(idx);
    }
    clauses_.push_back({std::move(lits)});
    return idx;
}

auto Solver::add_nogood(Nogood const &ng) -> bool {
    if (unsat_) {
        return false;
    }
    std::vector<Literal> clause;
    clause.reserve(ng.size());
    for (auto lit : ng) {
        clause.push_back(~lit);
    }
    if (clause.empty()) {
        unsat_ = true;
        return false;
    }
    // non-false literals first, then false ones by decreasing level
    auto rank = [&](Literal l) -> std::pair<int, level_t> {
        auto v = value(l);
        if (v == Value::True) {
            return {0, 0};
        }
        if (v == Value::Free) {
            return {1, 0};
        }
        return {2, UINT32_MAX - levels_[l.atom()]};
    };
    std::stable_sort(clause.begin(), clause.end(), [&](Literal a, Literal b) { return rank(a) < rank(b); });
    if (clause.size() == 1 && decision_level() > 0) {
        if (is_false(clause[0])) {
            conflict_ = clause;
            return false;
        }
        if (!is_true(clause[0]) || levels_[clause[0].atom()] > 0) {
            root_units_.push_back(clause[0]);
        }
        return true;
    }
    auto first = value(clause[0]);
    auto second = clause.size() > 1 ? value(clause[1]) : Value::False;
    auto idx = store(clause);
    if (first == Value::False) {
        if (decision_level() == 0) {
            unsat_ = true;
        }
        else {
            conflict_ = clauses_[idx].lits;
        }
        return false;
    }
    if (first == Value::Free && second == Value::False) {
        assign(clause[0], idx);
    }
    return true;
}

auto Solver::unit_propagate() -> bool {
    while (qhead_ < trail_.size()) {
        auto p = trail_[qhead_++];
        ++stats_.propagations;
        auto &ws = watches_[p.index()];
        auto false_lit = ~p;
        std::size_t i = 0;
        std::size_t j = 0;
        for (; i < ws.size(); ++i) {
            auto ci = ws[i];
            auto &lits = clauses_[ci].lits;
            if (lits[0] == false_lit) {
                std::swap(lits[0], lits[1]);
            }
            if (is_true(lits[0])) {
                ws[j++] = ci;
                continue;
            }
            bool moved = false;
            for (std::size_t k = 2; k < lits.size(); ++k) {
                if (!is_false(lits[k])) {
                    std::swap(lits[1], lits[k]);
                    watches_[(~lits[1]).index()].push_back(ci);
                    moved = true;
                    break;
                }
            }
            if (moved) {
                continue;
            }
            ws[j++] = ci;
            if (is_false(lits[0])) {
                conflict_ = lits;
                for (++i; i < ws.size(); ++i) {
                    ws[j++] = ws[i];
                }
                ws.resize(j);
                qhead_ = trail_.size();
                return false;
            }
            assign(lits[0], ci);
        }
        ws.resize(j);
    }
    return true;
}

auto Solver::flush_root_units() -> bool {
    if (root_units_.empty()) {
        return true;
    }
    backjump(0);
    auto units = std::move(root_units_);
    root_units_.clear();
    for (auto lit : units) {
        if (is_false(lit)) {
            unsat_ = true;
            return false;
        }
        if (!is_true(lit)) {
            assign(lit, store({lit}));
        }
    }
    return true;
}

auto Solver::propagate_all() -> bool {
    for (;;) {
        if (!flush_root_units()) {
            return false;
        }
        if (!unit_propagate()) {
            return false;
        }
        bool changed = false;
        for (auto *p : props_) {
            auto before = trail_.size();
            bool ok = p->propagate(*this);
            if (unsat_) {
                return false;
            }
            if (!ok || conflict_) {
                if (!conflict_) {
                    throw InternalError("propagator reported a conflict without a nogood");
                }
                return false;
            }
            if (!root_units_.empty()) {
                changed = true;
                break;
            }
            if (trail_.size() != before) {
                changed = true;
                break;
            }
        }
        if (!changed) {
            return true;
        }
    }
}

void Solver::bump(atom_t atom) {
    bool present = in_heap_[atom];
    if (present) {
        heap_.erase(atom);
    }
    activity_[atom] += bump_amount_;
    if (present) {
        heap_.insert(atom);
    }
    if (activity_[atom] > 1e100) {
        heap_.clear();
        for (std::size_t a = 0; a < activity_.size(); ++a) {
            activity_[a] = std::ldexp(activity_[a], -332);
        }
        bump_amount_ = std::ldexp(bump_amount_, -332);
        for (atom_t a = 0; a < activity_.size(); ++a) {
            if (in_heap_[a]) {
                heap_.insert(a);
            }
        }
    }
}

void Solver::analyze(std::vector<Literal> &learnt, level_t &jump) {
    // clause form: every literal of the conflict is false
    learnt.clear();
    learnt.push_back(Literal{});
    auto confl = *conflict_;
    int path = 0;
    std::optional<Literal> p;
    auto index = trail_.size();
    auto dl = decision_level();
    for (;;) {
        for (auto q : confl) {
            auto atom = q.atom();
            if (p && atom == p->atom()) {
                continue;
            }
            if (seen_[atom] || levels_[atom] == 0) {
                continue;
            }
            seen_[atom] = true;
            bump(atom);
            if (levels_[atom] >= dl) {
                ++path;
            }
            else {
                learnt.push_back(q);
            }
        }
        while (!seen_[trail_[--index].atom()]) {
        }
        p = trail_[index];
        seen_[p->atom()] = false;
        if (--path <= 0) {
            break;
        }
        confl = clauses_[reasons_[p->atom()]].lits;
    }
    learnt[0] = ~*p;
    jump = 0;
    std::size_t best = 1;
    for (std::size_t i = 1; i < learnt.size(); ++i) {
        seen_[learnt[i].atom()] = false;
        if (levels_[learnt[i].atom()] > jump) {
            jump = levels_[learnt[i].atom()];
            best = i;
        }
    }
    if (learnt.size() > 1) {
        std::swap(learnt[1], learnt[best]);
    }
}

auto Solver::handle_conflict() -> bool {
    if (unsat_) {
        return false;
    }
    level_t max = 0;
    for (auto lit : *conflict_) {
        max = std::max(max, levels_[lit.atom()]);
    }
    if (max == 0) {
        unsat_ = true;
        conflict_.reset();
        return false;
    }
    if (max < decision_level()) {
        backjump(max);
    }
    std::vector<Literal> learnt;
    level_t jump = 0;
    analyze(learnt, jump);
    conflict_.reset();
    backjump(jump);
    ++stats_.conflicts;
    ++conflicts_since_restart_;
    stats_.learnt_literals += learnt.size();
    auto uip = learnt[0];
    auto idx = store(std::move(learnt));
    assign(uip, idx);
    bump_amount_ /= DECAY;
    return true;
}

void Solver::backjump(level_t level) {
    if (level >= decision_level()) {
        return;
    }
    auto keep = trail_lim_[level];
    for (auto i = trail_.size(); i > keep; --i) {
        auto atom = trail_[i - 1].atom();
        phase_[atom] = values_[atom] == Value::True;
        values_[atom] = Value::Free;
        reasons_[atom] = NO_REASON;
        heap_insert(atom);
    }
    trail_.resize(keep);
    trail_lim_.resize(level);
    qhead_ = std::min(qhead_, trail_.size());
    for (auto *p : props_) {
        p->on_backjump(*this, level);
    }
}

auto Solver::decide() -> bool {
    while (!heap_.empty()) {
        auto atom = *heap_.begin();
        heap_.erase(heap_.begin());
        in_heap_[atom] = false;
        if (values_[atom] == Value::Free) {
            ++stats_.decisions;
            trail_lim_.push_back(trail_.size());
            assign(phase_[atom] ? Literal::pos(atom) : Literal::neg(atom), NO_REASON);
            return true;
        }
    }
    return false;
}

auto Solver::timed_out() -> bool {
    if (!deadline_ || (++ticks_ & 63U) != 0) {
        return false;
    }
    return Clock::now() >= *deadline_;
}

auto Solver::solve(std::function<bool(Solver &)> const &on_model) -> SearchResult {
    if (unsat_) {
        return SearchResult::Exhausted;
    }
    for (;;) {
        if (!propagate_all()) {
            if (!conflict_ || !handle_conflict()) {
                unsat_ = true;
                return SearchResult::Exhausted;
            }
            continue;
        }
        if (timed_out()) {
            return SearchResult::Interrupted;
        }
        if (!enumerating_ && conflicts_since_restart_ >= restart_limit_ && decision_level() > 0) {
            ++stats_.restarts;
            conflicts_since_restart_ = 0;
            restart_limit_ = static_cast<std::uint64_t>(static_cast<double>(restart_limit_) * RESTART_FACTOR);
            backjump(0);
            continue;
        }
        if (decide()) {
            continue;
        }
        bool total_ok = true;
        for (auto *p : props_) {
            auto before = trail_.size();
            if (!p->check_total(*this) || conflict_ || unsat_ || !root_units_.empty() || trail_.size() != before) {
                total_ok = false;
                break;
            }
        }
        if (!total_ok) {
            if (unsat_) {
                return SearchResult::Exhausted;
            }
            if (conflict_) {
                if (!handle_conflict()) {
                    return SearchResult::Exhausted;
                }
            }
            continue;
        }
        ++stats_.models;
        enumerating_ = true;
        if (!on_model(*this)) {
            return SearchResult::Stopped;
        }
        if (unsat_) {
            return SearchResult::Exhausted;
        }
        std::vector<Literal> block;
        if (projection_) {
            for (atom_t a = 0; a < *projection_; ++a) {
                if (levels_[a] > 0) {
                    block.push_back(values_[a] == Value::True ? Literal::neg(a) : Literal::pos(a));
                }
            }
        }
        else {
            for (auto lim : trail_lim_) {
                block.push_back(~trail_[lim]);
            }
        }
        if (block.empty()) {
            unsat_ = true;
            return SearchResult::Exhausted;
        }
        conflict_ = std::move(block);
        if (!handle_conflict()) {
            return SearchResult::Exhausted;
        }
    }
}

} // namespace Casp
