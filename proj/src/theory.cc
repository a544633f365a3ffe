#include "casp/theory.hh"

#include <algorithm>
#include <chrono>

namespace Casp {

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

} // namespace

auto background_space(GroundProgram const &prg) -> Space {
    Space space{prg.vars.size(), Domain{prg.domain.lower, prg.domain.upper}};
    for (auto const &c : prg.counts) {
        space.post(c);
    }
    for (auto const &d : prg.distincts) {
        space.post(d);
    }
    return space;
}

TheoryPropagator::TheoryPropagator(GroundProgram const &prg, TheoryOptions options)
    : prg_{prg}, options_{options}, index_(prg.num_atoms()), by_var_(prg.vars.size()) {
    for (auto const &obj : prg.objectives) {
        objectives_.emplace_back(obj.sense, obj.expr());
    }
    for (auto atom : prg.gamma.atoms()) {
        index_[atom] = atoms_.size();
        atoms_.push_back(atom);
        tests_.emplace_back(prg.gamma.constraint(atom));
        for (auto v : tests_.back().vars()) {
            by_var_[v].push_back(atoms_.size() - 1);
        }
    }
    dirty_.assign(atoms_.size(), false);
    reset_base();
}

void TheoryPropagator::reset_base() {
    base_ = background_space(prg_);
    if (bound_) {
        base_.post(*bound_);
    }
    space_ = base_;
    posted_ = 0;
    frames_.clear();
    frames_.push_back({base_, 0, 0});
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
        mark(atoms_[i]);
    }
}

void TheoryPropagator::attach(Solver &solver) {
    for (auto atom : atoms_) {
        solver.watch(atom);
    }
    solver.add_propagator(*this);
}

auto TheoryPropagator::constraint_of(Literal lit) const -> ArithConstraint { return prg_.gamma.gamma(lit); }

void TheoryPropagator::mark(atom_t atom) {
    auto i = *index_[atom];
    if (!dirty_[i]) {
        dirty_[i] = true;
        dirty_list_.push_back(i);
    }
}

void TheoryPropagator::on_assigned(Solver &solver, Literal lit) {
    if (index_[lit.atom()]) {
        trail_.push_back({lit, solver.level(lit.atom())});
    }
}

auto TheoryPropagator::posted_list() const -> ConstraintList {
    ConstraintList out;
    for (std::size_t i = 0; i < posted_; ++i) {
        out.push_back(constraint_of(trail_[i].lit));
    }
    return out;
}

auto TheoryPropagator::assigned_literals() const -> std::vector<Literal> {
    std::vector<Literal> out;
    for (std::size_t i = 0; i < posted_; ++i) {
        out.push_back(trail_[i].lit);
    }
    return out;
}

void TheoryPropagator::post_pending() {
    while (posted_ < trail_.size()) {
        auto i = posted_;
        if (!options_.rebuild_on_backjump) {
            level_t prev = i == 0 ? 0 : trail_[i - 1].level;
            if (trail_[i].level > prev && frames_.back().posted != i) {
                frames_.push_back({space_, i, prev});
            }
        }
        space_.post(constraint_of(trail_[i].lit));
        ++posted_;
    }
}

void TheoryPropagator::on_backjump(Solver &solver, level_t level) {
    static_cast<void>(solver);
    auto keep = trail_.size();
    while (keep > 0 && trail_[keep - 1].level > level) {
        --keep;
        mark(trail_[keep].lit.atom());
    }
    trail_.resize(keep);
    if (posted_ <= keep && !space_.failed()) {
        return;
    }
    if (options_.rebuild_on_backjump) {
        if (keep > 0) {
            ++stats_.rebuilds;
        }
        space_ = base_;
        posted_ = 0;
        return;
    }
    while (frames_.back().level > level || frames_.back().posted > keep) {
        frames_.pop_back();
    }
    space_ = frames_.back().space;
    posted_ = frames_.back().posted;
}

auto TheoryPropagator::conflict(Solver &solver, OracleMode mode) -> bool {
    auto start = Clock::now();
    auto lits = assigned_literals();
    auto list = posted_list();
    ConsistencyOracle oracle{base_, mode, options_.limits};
    auto ng = conflict_nogood(lits, list, options_.conflict_filter, oracle);
    stats_.filter_seconds += seconds_since(start);
    stats_.rebuilds += oracle.rebuilds();
    ++stats_.conflict_filter_calls;
    ++stats_.conflicts;
    stats_.conflict_literals += ng.size();
    if (solver.add_nogood(ng)) {
        throw InternalError("theory conflict nogood is not violated");
    }
    return false;
}

auto TheoryPropagator::scan(Solver &solver) -> bool {
    for (auto v : space_.take_changes()) {
        for (auto i : by_var_[v]) {
            mark(atoms_[i]);
        }
    }
    if (dirty_list_.empty()) {
        return true;
    }
    std::vector<std::size_t> todo;
    std::swap(todo, dirty_list_);
    std::sort(todo.begin(), todo.end());
    for (auto i : todo) {
        dirty_[i] = false;
    }
    std::optional<std::vector<Literal>> lits;
    std::optional<ConstraintList> list;
    for (std::size_t k = 0; k < todo.size(); ++k) {
        auto i = todo[k];
        auto atom = atoms_[i];
        if (solver.assigned(atom)) {
            continue;
        }
        auto const &c = prg_.gamma.constraint(atom);
        auto truth = options_.probe_entailment ? space_.probe_entail(c) : space_.entail(tests_[i]);
        if (truth == Truth::Unknown) {
            continue;
        }
        auto lit = truth == Truth::True ? Literal::pos(atom) : Literal::neg(atom);
        if (!lits) {
            lits = assigned_literals();
            list = posted_list();
        }
        auto start = Clock::now();
        ConsistencyOracle oracle{base_};
        list->push_back(constraint_of(lit).complement());
        auto ng = reason_nogood_appended(*lits, *list, lit, options_.reason_filter, oracle);
        list->pop_back();
        stats_.filter_seconds += seconds_since(start);
        stats_.rebuilds += oracle.rebuilds();
        ++stats_.reason_filter_calls;
        ++stats_.propagations;
        stats_.reason_literals += ng.size();
        if (!solver.add_nogood(ng)) {
            // keep the rest for later
            for (auto j = k + 1; j < todo.size(); ++j) {
                mark(atoms_[todo[j]]);
            }
            return false;
        }
    }
    return true;
}

auto TheoryPropagator::propagate(Solver &solver) -> bool {
    ++stats_.calls;
    if (options_.delay == 0 || (options_.delay > 1 && stats_.calls % options_.delay != 0)) {
        return true;
    }
    ++stats_.admitted;
    post_pending();
    if (!space_.propagate()) {
        return conflict(solver, OracleMode::Propagation);
    }
    return scan(solver);
}

auto TheoryPropagator::check_total(Solver &solver) -> bool {
    ++stats_.total_checks;
    post_pending();
    if (!space_.propagate()) {
        return conflict(solver, OracleMode::Propagation);
    }
    std::optional<std::vector<val_t>> found;
    if (objectives_.empty()) {
        found = search(space_, options_.limits);
    }
    else {
        found = branch_and_bound(space_, objectives_, options_.limits);
    }
    if (!found) {
        return conflict(solver, OracleMode::Search);
    }
    witness_ = std::move(*found);
    return true;
}

auto TheoryPropagator::objective_values(std::vector<val_t> const &witness) const -> std::vector<val_t> {
    std::vector<val_t> out;
    for (auto const &level : objectives_) {
        out.push_back(minimization_form(level).evaluate(witness));
    }
    return out;
}

void TheoryPropagator::set_bound(std::vector<val_t> values) {
    bound_ = LexBound{objectives_, std::move(values), !options_.opt_all};
    reset_base();
}

auto initial_lookahead(GroundProgram const &prg, std::size_t *rebuilds) -> std::vector<Nogood> {
    std::set<Nogood> out;
    auto base = background_space(prg);
    auto const &atoms = prg.gamma.atoms();
    for (auto a : atoms) {
        for (bool sign : {true, false}) {
            Literal lit{a, sign};
            auto space = rebuild({prg.gamma.gamma(lit)}, base, rebuilds);
            if (space.failed()) {
                out.insert(*Nogood::make({lit}));
                continue;
            }
            for (auto b : atoms) {
                if (b == a) {
                    continue;
                }
                auto truth = space.probe_entail(prg.gamma.constraint(b));
                if (truth == Truth::Unknown) {
                    continue;
                }
                auto implied = truth == Truth::True ? Literal::pos(b) : Literal::neg(b);
                if (auto ng = Nogood::make({lit, ~implied})) {
                    out.insert(*ng);
                }
            }
        }
    }
    return {out.begin(), out.end()};
}

} // namespace Casp
