#include "casp/driver.hh"

#include "casp/compile.hh"

#include <chrono>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace Casp {

namespace {

using Clock = std::chrono::steady_clock;

auto input_sense(std::vector<ObjectiveLevel> const &objectives, std::vector<val_t> values) -> std::vector<val_t> {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (objectives[i].first == Sense::Maximize) {
            values[i] = -values[i];
        }
    }
    return values;
}

} // namespace

auto solve(GroundProgram const &prg, SolveOptions const &options, std::function<void(Model const &)> const &on_model)
    -> SolveResult {
    auto start = Clock::now();
    SolveResult result;
    auto &stats = result.stats;
    std::optional<Clock::time_point> deadline;
    if (options.time_limit) {
        deadline = start + std::chrono::duration_cast<Clock::duration>(std::chrono::duration<double>(*options.time_limit));
    }

    auto compiled = completion_nogoods(prg);
    Solver solver{compiled.num_atoms, options.seed};
    solver.set_deadline(deadline);
    solver.set_projection(prg.num_atoms());
    bool consistent = !compiled.inconsistent;
    for (auto const &ng : compiled.nogoods) {
        if (!consistent) {
            break;
        }
        consistent = solver.add_nogood(ng);
    }

    auto theory_options = options.theory;
    theory_options.limits.deadline = deadline;
    TheoryPropagator theory{prg, theory_options};
    theory.attach(solver);
    if (consistent && options.lookahead) {
        std::size_t rebuilds = 0;
        for (auto const &ng : initial_lookahead(prg, &rebuilds)) {
            ++stats.lookahead_nogoods;
            if (!solver.add_nogood(ng)) {
                consistent = false;
                break;
            }
        }
        stats.theory.rebuilds += rebuilds;
    }
    bool optimize = !theory.objectives().empty();
    if (optimize && options.opt_values) {
        if (options.opt_values->size() != theory.objectives().size()) {
            throw Error("expected one optimization value per objective");
        }
        theory.set_bound(input_sense(theory.objectives(), *options.opt_values));
    }

    auto search = SearchResult::Exhausted;
    if (consistent) {
        try {
            search = solver.solve([&](Solver &s) {
                Model model;
                auto bools = s.model();
                bools.resize(prg.num_atoms());
                model.atoms = std::move(bools);
                model.vars = theory.witness();
                if (optimize) {
                    auto values = theory.objective_values(model.vars);
                    model.objective = input_sense(theory.objectives(), values);
                    theory.set_bound(values);
                }
                if (on_model) {
                    on_model(model);
                }
                result.models.push_back(std::move(model));
                return optimize || options.models == 0 || result.models.size() < options.models;
            });
        }
        catch (Timeout const &) {
            search = SearchResult::Interrupted;
        }
    }

    stats.timed_out = search == SearchResult::Interrupted;
    if (stats.timed_out) {
        result.status = result.models.empty() ? SolveStatus::Unknown : SolveStatus::Satisfiable;
    }
    else if (result.models.empty()) {
        result.status = SolveStatus::Unsatisfiable;
    }
    else {
        result.status = optimize && search == SearchResult::Exhausted ? SolveStatus::Optimum : SolveStatus::Satisfiable;
    }
    if (optimize && !result.models.empty()) {
        stats.optimum = result.models.back().objective;
    }
    auto const &ss = solver.stats();
    stats.conflicts = ss.conflicts;
    stats.conflict_literals = ss.learnt_literals;
    stats.decisions = ss.decisions;
    stats.restarts = ss.restarts;
    stats.models = result.models.size();
    auto lookahead_rebuilds = stats.theory.rebuilds;
    stats.theory = theory.stats();
    stats.theory.rebuilds += lookahead_rebuilds;
    stats.solve_seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return result;
}

auto to_string(SolveStatus status) -> std::string_view {
    switch (status) {
        case SolveStatus::Satisfiable: return "SATISFIABLE";
        case SolveStatus::Unsatisfiable: return "UNSATISFIABLE";
        case SolveStatus::Optimum: return "OPTIMUM FOUND";
        case SolveStatus::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

auto model_line(GroundProgram const &prg, Model const &model) -> std::string {
    std::vector<std::string> tokens;
    for (auto kind : {AtomKind::Regular, AtomKind::Constraint}) {
        for (atom_t a = 0; a < prg.num_atoms(); ++a) {
            if (prg.atom_kind(a) == kind && model.atoms[a]) {
                tokens.push_back(prg.atom_name(a));
            }
        }
    }
    for (var_t v = 0; v < model.vars.size(); ++v) {
        tokens.push_back(prg.vars.name(v) + "=" + std::to_string(model.vars[v]));
    }
    std::string out;
    for (auto const &t : tokens) {
        out += out.empty() ? t : " " + t;
    }
    return out;
}

void print_model(std::ostream &out, GroundProgram const &prg, Model const &model) {
    out << model_line(prg, model) << "\n";
}

auto parse_model_line(GroundProgram const &prg, std::string const &line) -> Model {
    Model model;
    model.atoms.assign(prg.num_atoms(), false);
    model.vars.assign(prg.vars.size(), prg.domain.lower);
    std::istringstream in{line};
    std::string token;
    while (in >> token) {
        if (auto atom = prg.find_atom(token)) {
            model.atoms[*atom] = true;
            continue;
        }
        auto eq = token.rfind('=');
        if (eq == std::string::npos) {
            throw Error("unknown atom in model: " + token);
        }
        auto var = prg.vars.find(token.substr(0, eq));
        if (!var) {
            throw Error("unknown variable in model: " + token);
        }
        try {
            model.vars[*var] = std::stoll(token.substr(eq + 1));
        }
        catch (std::exception const &) {
            throw Error("bad value in model: " + token);
        }
    }
    return model;
}

void print_stats(std::ostream &out, RunStats const &stats) {
    auto const &t = stats.theory;
    out << "Models       : " << stats.models << "\n";
    out << "Time         : " << std::fixed << std::setprecision(3) << stats.solve_seconds << "s\n";
    out << "Conflicts    : " << stats.conflicts << "\n";
    out << "Avg conflict : " << std::setprecision(2) << stats.average_conflict_size() << "\n";
    out << "Decisions    : " << stats.decisions << "\n";
    out << "Restarts     : " << stats.restarts << "\n";
    out << "Theory conflicts    : " << t.conflicts << "\n";
    out << "Theory propagations : " << t.propagations << "\n";
    out << "Conflict filter calls : " << t.conflict_filter_calls << "\n";
    out << "Reason filter calls   : " << t.reason_filter_calls << "\n";
    out << "Oracle rebuilds       : " << t.rebuilds << "\n";
    out << "Filter time           : " << std::setprecision(3) << t.filter_seconds << "s\n";
    if (stats.lookahead_nogoods > 0) {
        out << "Lookahead nogoods     : " << stats.lookahead_nogoods << "\n";
    }
    if (!stats.optimum.empty()) {
        out << "Optimization :";
        for (auto v : stats.optimum) {
            out << " " << v;
        }
        out << "\n";
    }
    out << std::defaultfloat;
}

} // namespace Casp
