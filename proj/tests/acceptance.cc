//! Acceptance checks; one PASS or FAIL line per criterion.

#include "support.hh"

#include <casp/bench.hh>
#include <casp/driver.hh>
#include <casp/frontend.hh>
#include <casp/iis.hh>
#include <casp/theory.hh>

#include <algorithm>
#include <bit>
#include <chrono>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

using namespace Casp;
using namespace Casp::Test;

namespace {

using Clock = std::chrono::steady_clock;

auto seconds_since(Clock::time_point start) -> double {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool ok, std::string const &detail) {
    std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
    if (!ok) {
        ++failures;
    }
}

//! Runs a check; exceptions count as failure.
void criterion(int id, std::function<bool(std::ostringstream &)> const &check) {
    std::ostringstream detail;
    bool ok = false;
    try {
        ok = check(detail);
    }
    catch (std::exception const &e) {
        detail << " exception: " << e.what();
    }
    report(id, ok, detail.str());
}

auto var(var_t v) -> Expr { return Expr::variable(v); }
auto num(val_t v) -> Expr { return Expr::constant(v); }

constexpr var_t LEA = 0;
constexpr var_t ADAM = 1;
constexpr var_t JOHN = 2;
constexpr var_t SMITH = 3;

auto team_list() -> ConstraintList {
    return {
        {var(LEA), Relation::EQ, var(ADAM)},
        {var(JOHN), Relation::EQ, num(0)},
        {var(SMITH), Relation::EQ, num(0)},
        {Expr::add({var(ADAM), var(LEA)}), Relation::GT, num(6)},
        {Expr::sub(var(LEA), var(ADAM)), Relation::EQ, num(1)},
    };
}

auto team_oracle() -> ConsistencyOracle { return ConsistencyOracle{Space{4, Domain{0, 10}}}; }

auto sorted(std::vector<std::size_t> v) -> std::vector<std::size_t> {
    std::sort(v.begin(), v.end());
    return v;
}

auto atom(GroundProgram const &prg, std::string const &name) -> atom_t {
    auto a = prg.find_atom(name);
    if (!a) {
        throw std::runtime_error("unknown atom " + name);
    }
    return *a;
}

auto median(std::vector<double> v) -> double {
    std::sort(v.begin(), v.end());
    auto n = v.size();
    return n % 2 == 1 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

auto lines_with(std::string const &text, std::string const &needle) -> std::vector<std::string> {
    std::vector<std::string> out;
    std::istringstream in{text};
    for (std::string line; std::getline(in, line);) {
        if (line.find(needle) != std::string::npos) {
            out.push_back(line);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

auto all_configs() -> std::vector<SolveOptions> {
    std::vector<SolveOptions> out;
    for (auto r : matrix_filters()) {
        for (auto c : matrix_filters()) {
            SolveOptions o;
            o.theory.reason_filter = r;
            o.theory.conflict_filter = c;
            out.push_back(o);
        }
    }
    return out;
}

//! Consistency of every sublist of `list`, indexed by bitmask.
auto all_sublists(ConstraintList const &list, Space const &base) -> std::vector<bool> {
    std::vector<bool> out(std::size_t{1} << list.size());
    for (std::size_t mask = 0; mask < out.size(); ++mask) {
        auto s = base;
        for (std::size_t i = 0; i < list.size(); ++i) {
            if ((mask >> i) & 1U) {
                s.post(list[i]);
            }
        }
        out[mask] = s.propagate();
    }
    return out;
}

auto random_arith(std::mt19937 &rng) -> ArithConstraint {
    auto pick = [&](unsigned n) { return rng() % n; };
    auto x = [&] { return var(static_cast<var_t>(pick(3))); };
    auto k = [&] { return num(static_cast<val_t>(pick(5))); };
    auto rel = static_cast<Relation>(pick(6));
    switch (pick(5)) {
        case 0: return {x(), rel, k()};
        case 1: return {Expr::add({x(), x()}), rel, k()};
        case 2: return {x(), rel, x()};
        case 3: return {Expr::mul({num(2), x()}), rel, Expr::add({x(), k()})};
        default: return {Expr::sub(x(), x()), rel, k()};
    }
}

//! Quasigroup instances shared by the two scaled checks.
struct QgSet {
    std::vector<Instance> global;
    std::vector<Instance> pairwise;
};

auto quasigroups() -> QgSet const & {
    static QgSet const set = [] {
        QgSet s;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            auto name = "qg10-" + std::to_string(seed);
            s.global.push_back({name, quasigroup_program(10, 0.3, seed, AllDifferent::Global)});
            s.pairwise.push_back({name, quasigroup_program(10, 0.3, seed, AllDifferent::Pairwise)});
        }
        return s;
    }();
    return set;
}

} // namespace

auto main() -> int {
    criterion(1, [](std::ostringstream &d) {
        auto start = Clock::now();
        auto list = team_list();
        std::vector<std::size_t> const iis{0, 4};
        bool ok = true;
        for (auto f : {Filter::Deletion, Filter::Forward, Filter::Backward, Filter::CC}) {
            auto oracle = team_oracle();
            auto out = sorted(filter_positions(f, list, oracle));
            d << to_string(f) << "=" << out.size() << " ";
            ok = ok && out == iis;
        }
        auto range = team_oracle();
        auto r = sorted(filter_positions(Filter::Range, list, range));
        auto ccr = team_oracle();
        auto c = sorted(filter_positions(Filter::CCRange, list, ccr));
        d << "range=" << r.size() << " ccrange=" << c.size();
        ok = ok && r == std::vector<std::size_t>{0, 1, 2, 3, 4} && c == std::vector<std::size_t>{0, 3, 4};
        return ok && seconds_since(start) < 1;
    });

    criterion(2, [](std::ostringstream &d) {
        auto list = team_list();
        auto fwd = team_oracle();
        static_cast<void>(forward_filtering(list, fwd));
        auto del = team_oracle();
        static_cast<void>(deletion_filtering(list, del));
        d << "forward rebuilds " << fwd.rebuilds() << ", deletion rebuilds " << del.rebuilds();
        return fwd.rebuilds() == 1 && del.rebuilds() == 5;
    });

    criterion(3, [](std::ostringstream &d) {
        auto prg = ground_text(HOUSE);
        auto eq = atom(prg, "work(lea)$==work(adam)");
        auto diff = atom(prg, "work(lea)$-work(adam)$==1");
        auto john = atom(prg, "work(john)$==0");
        auto list = team_list();
        ConstraintList j{list[1], list[4]};
        std::vector<Literal> lits{Literal::pos(john), Literal::pos(diff)};
        auto oracle = team_oracle();
        auto reason = reason_nogood(lits, j, Literal::neg(eq), list[0].complement(), Filter::Forward, oracle);
        d << "reason size " << reason.size();
        return reason == *Nogood::make({Literal::pos(diff), Literal::pos(eq)});
    });

    criterion(4, [](std::ostringstream &d) {
        auto start = Clock::now();
        auto prg = ground_text("$domain(1..100).\na :- x $* x $< 25.\n$minimize{x}.\n");
        std::vector<std::string> lines;
        auto res = solve(prg, {}, [&](Model const &m) { lines.push_back(model_line(prg, m)); });
        for (auto const &l : lines) {
            d << "[" << l << "] ";
        }
        d << "optimum " << (res.stats.optimum.empty() ? -1 : res.stats.optimum[0]);
        return res.status == SolveStatus::Optimum && lines == std::vector<std::string>{"x=5", "a x$*x$<25 x=1"} &&
               res.stats.optimum == std::vector<val_t>{1} && res.stats.models == 2 && seconds_since(start) < 1;
    });

    criterion(5, [](std::ostringstream &d) {
        auto prg = ground_text(HOUSE);
        auto nogoods = initial_lookahead(prg);
        auto has = [&](std::string const &a, std::string const &b) {
            auto ng = Nogood::make({Literal::pos(atom(prg, a)), Literal::pos(atom(prg, b))});
            return std::find(nogoods.begin(), nogoods.end(), *ng) != nogoods.end();
        };
        d << nogoods.size() << " binary nogoods";
        return has("work(smith)$==0", "work(smith)$-work(adam)$==1") &&
               has("work(lea)$==work(adam)", "work(lea)$-work(adam)$==1");
    });

    criterion(6, [](std::ostringstream &d) {
        auto prg = ground_text(HOUSE);
        auto gt6 = lines_with(prg.to_string(), "$>6");
        std::vector<std::string> expected{
            ":- team(adam,john), not work(adam)$+work(john)$>6.",
            ":- team(adam,lea), not work(adam)$+work(lea)$>6.",
            ":- team(adam,smith), not work(adam)$+work(smith)$>6.",
        };
        bool ok = gt6 == expected && prg.counts.size() == 1;
        if (ok) {
            auto names = prg.names();
            std::vector<std::string> elems;
            for (auto const &e : prg.counts[0].elements) {
                elems.push_back(e.to_string(names));
            }
            std::sort(elems.begin(), elems.end());
            ok = elems == std::vector<std::string>{"work(adam)$==8", "work(john)$==8", "work(lea)$==8",
                                                   "work(smith)$==8"} &&
                 prg.counts[0].rel == Relation::EQ && prg.counts[0].bound.to_string(names) == "fulltime";
        }
        d << gt6.size() << " team rules, " << prg.counts.size() << " count constraint";
        return ok;
    });

    criterion(7, [](std::ostringstream &d) {
        auto start = Clock::now();
        std::mt19937 rng{2024};
        auto configs = all_configs();
        std::size_t programs = 0;
        std::size_t sampled = 0;
        std::size_t discrepancies = 0;
        std::size_t nonempty = 0;
        for (; programs < 1000; ++programs) {
            ProgramShape shape{.atoms = 2 + static_cast<int>(rng() % 9),
                               .vars = 1 + static_cast<int>(rng() % 3),
                               .rules = 3 + static_cast<int>(rng() % 8),
                               .lower = 0,
                               .upper = 1 + static_cast<val_t>(rng() % 4)};
            auto prg = ground_text(random_program(rng, shape));
            auto expected = brute_force_answer_sets(prg);
            nonempty += expected.empty() ? 0 : 1;
            bool sample = programs % 20 == 0;
            sampled += sample ? 1 : 0;
            for (auto const &opts : sample ? configs : std::vector<SolveOptions>(1)) {
                std::size_t dups = 0;
                if (model_set(prg, opts, &dups) != expected || dups != 0) {
                    ++discrepancies;
                }
            }
        }
        auto t = seconds_since(start);
        d << programs << " programs (" << nonempty << " with models), " << sampled << " under all 36 configs, "
          << discrepancies << " discrepancies, " << t << " s";
        return discrepancies == 0 && sampled >= 50 && t < 300;
    });

    criterion(8, [](std::ostringstream &d) {
        std::mt19937 rng{11};
        Space base{3, Domain{0, 4}};
        std::size_t tested = 0;
        std::size_t violations = 0;
        while (tested < 500) {
            ConstraintList list;
            auto n = 1 + rng() % 8;
            for (unsigned i = 0; i < n; ++i) {
                list.push_back(random_arith(rng));
            }
            auto table = all_sublists(list, base);
            if (table.back()) {
                continue;
            }
            ++tested;
            for (auto f : all_filters()) {
                ConsistencyOracle oracle{base};
                auto out = filter_positions(f, list, oracle);
                std::size_t m = 0;
                for (auto i : out) {
                    m |= std::size_t{1} << i;
                }
                if (table[m] || std::popcount(m) != static_cast<int>(out.size())) {
                    ++violations;
                    continue;
                }
                bool exact = f == Filter::Deletion || f == Filter::Forward || f == Filter::Backward || f == Filter::CC;
                if (exact) {
                    for (auto i : out) {
                        if (!table[m & ~(std::size_t{1} << i)]) {
                            ++violations;
                        }
                    }
                }
            }
        }
        d << tested << " inconsistent lists, " << violations << " violations";
        return violations == 0;
    });

    criterion(9, [](std::ostringstream &d) {
        auto const &set = quasigroups().global;
        BenchOptions opts;
        opts.time_limit = 10;
        std::size_t lower = 0;
        std::vector<double> ss_time;
        std::vector<double> ob_time;
        for (auto const &inst : set) {
            auto ss = bench_run(inst, Filter::Simple, Filter::Simple, opts);
            auto ob = bench_run(inst, Filter::CCRange, Filter::Backward, opts);
            ss_time.push_back(ss.seconds);
            ob_time.push_back(ob.seconds);
            lower += ob.conflict_size < ss.conflict_size ? 1 : 0;
        }
        auto ms = median(ss_time);
        auto mo = median(ob_time);
        bool size_ok = lower * 5 >= set.size() * 4;
        bool time_ok = mo < ms;
        d << "o/b conflict size lower on " << lower << "/" << set.size() << (size_ok ? " (ok)" : " (short)")
          << "; median time o/b " << mo << " s vs s/s " << ms << " s" << (time_ok ? " (ok)" : " (o/b slower)");
        return size_ok && time_ok;
    });

    criterion(10, [](std::ostringstream &d) {
        bool counts_ok = true;
        for (int n : {4, 6, 8, 10}) {
            auto none = ground_text(quasigroup_program(n, 0.3, 1, AllDifferent::None));
            auto global = ground_text(quasigroup_program(n, 0.3, 1, AllDifferent::Global));
            auto pairwise = ground_text(quasigroup_program(n, 0.3, 1, AllDifferent::Pairwise));
            auto g = global.distincts.size() + (global.gamma.size() - none.gamma.size());
            auto p = pairwise.distincts.size() + (pairwise.gamma.size() - none.gamma.size());
            auto nn = static_cast<std::size_t>(n);
            d << "n=" << n << " global " << g << " pairwise " << p << "; ";
            counts_ok = counts_ok && g == 2 * nn && p == nn * nn * (nn - 1);
        }
        auto const &set = quasigroups();
        BenchOptions opts;
        opts.time_limit = 10;
        std::vector<double> gt;
        std::vector<double> pt;
        std::size_t timeouts = 0;
        for (std::size_t i = 0; i < set.global.size(); ++i) {
            auto g = bench_run(set.global[i], Filter::Simple, Filter::Simple, opts);
            auto p = bench_run(set.pairwise[i], Filter::Simple, Filter::Simple, opts);
            gt.push_back(g.seconds);
            pt.push_back(p.timeout ? opts.time_limit : p.seconds);
            timeouts += p.timeout ? 1 : 0;
        }
        auto mg = median(gt);
        auto mp = median(pt);
        d << "median time global " << mg << " s vs pairwise " << mp << " s (" << timeouts << " pairwise timeouts)";
        return counts_ok && mg <= mp;
    });

    criterion(11, [](std::ostringstream &d) {
        std::vector<std::pair<std::string, SolveOptions>> suite;
        std::mt19937 rng{5};
        for (int i = 0; i < 40; ++i) {
            suite.emplace_back(random_program(rng, {.atoms = 6, .vars = 2, .rules = 7, .lower = 0, .upper = 3}),
                               SolveOptions{});
        }
        // delay 0 with unreduced conflicts enumerates decisions; only 2x2 boards finish
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            suite.emplace_back(quasigroup_program(2, 0.25, seed, AllDifferent::Global), SolveOptions{});
            suite.emplace_back(quasigroup_program(2, 0.25, seed, AllDifferent::Pairwise), SolveOptions{});
        }
        suite.emplace_back("p :- not q.\nq :- not p.\n", SolveOptions{});
        SolveOptions optimal;
        optimal.theory.opt_all = true;
        optimal.opt_values = std::vector<val_t>{20};
        suite.emplace_back(HOUSE, optimal);
        optimal.opt_values = std::vector<val_t>{1};
        suite.emplace_back("$domain(1..100).\n{b}.\na :- x $* x $< 25.\n$minimize{x}.\n", optimal);

        std::size_t mismatches = 0;
        std::size_t runs = 0;
        for (auto const &[text, base] : suite) {
            auto prg = ground_text(text);
            std::optional<std::size_t> reference;
            for (auto r : matrix_filters()) {
                for (auto c : matrix_filters()) {
                    for (bool lookahead : {false, true}) {
                        for (unsigned delay : {0U, 1U, 10U}) {
                            auto opts = base;
                            opts.theory.reason_filter = r;
                            opts.theory.conflict_filter = c;
                            opts.lookahead = lookahead;
                            opts.theory.delay = delay;
                            auto count = model_set(prg, opts).size();
                            ++runs;
                            if (!reference) {
                                reference = count;
                            }
                            else if (*reference != count) {
                                ++mismatches;
                            }
                        }
                    }
                }
            }
        }
        d << suite.size() << " programs, " << runs << " runs, " << mismatches << " count mismatches";
        return mismatches == 0;
    });

    std::cout << (failures == 0 ? "all criteria pass" : std::to_string(failures) + " criteria fail") << std::endl;
    return failures == 0 ? 0 : 1;
}
