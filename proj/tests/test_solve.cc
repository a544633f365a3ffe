#include "support.hh"

#include <casp/bench.hh>
#include <casp/cli.hh>
#include <casp/driver.hh>
#include <casp/theory.hh>

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace Casp;
using namespace Casp::Test;

namespace {

auto atom(GroundProgram const &prg, std::string const &name) -> atom_t {
    for (atom_t a = 0; a < prg.num_atoms(); ++a) {
        if (prg.atom_name(a) == name) {
            return a;
        }
    }
    FAIL("unknown atom " << name);
    return 0;
}

auto all_valid(GroundProgram const &prg, SolveOptions opts) -> std::size_t {
    opts.models = 0;
    std::size_t bad = 0;
    static_cast<void>(solve(prg, opts, [&](Model const &m) {
        if (!check_constraint_answer_set(prg, m.atoms, m.vars)) {
            ++bad;
        }
    }));
    return bad;
}

auto run(std::vector<std::string> args, std::string *out_text = nullptr, std::string *err_text = nullptr) -> int {
    std::vector<char const *> argv{"casp"};
    for (auto const &a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out;
    std::ostringstream err;
    auto code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text != nullptr) {
        *out_text = out.str();
    }
    if (err_text != nullptr) {
        *err_text = err.str();
    }
    return code;
}

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        std::random_device rd;
        path = std::filesystem::temp_directory_path() / ("casp-test-" + std::to_string(rd()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(TempDir const &) = delete;
    auto operator=(TempDir const &) -> TempDir & = delete;

    [[nodiscard]] auto write(std::string const &name, std::string const &text) const -> std::string {
        auto file = path / name;
        std::ofstream{file} << text;
        return file.string();
    }
};

} // namespace

TEST_CASE("team program") {
    auto prg = ground_text(HOUSE);
    SolveOptions opts;
    std::vector<Model> models;
    auto res = solve(prg, opts, [&](Model const &m) { models.push_back(m); });
    CHECK(res.status == SolveStatus::Optimum);
    REQUIRE(!models.empty());
    for (auto const &m : models) {
        CHECK(check_constraint_answer_set(prg, m.atoms, m.vars));
    }
    // each model improves on the previous one
    for (std::size_t i = 1; i < models.size(); ++i) {
        CHECK(models[i].objective[0] > models[i - 1].objective[0]);
    }
    CHECK(models.back().objective == std::vector<val_t>{20});
    CHECK(res.stats.optimum == std::vector<val_t>{20});
    CHECK(all_valid(prg, opts) == 0);
}

TEST_CASE("optimization loop over a square") {
    auto prg = ground_text("$domain(1..100).\na :- x $* x $< 25.\n$minimize{x}.\n");
    std::vector<std::string> lines;
    auto res = solve(prg, {}, [&](Model const &m) { lines.push_back(model_line(prg, m)); });
    CHECK(res.status == SolveStatus::Optimum);
    CHECK(lines == std::vector<std::string>{"x=5", "a x$*x$<25 x=1"});
    CHECK(res.stats.optimum == std::vector<val_t>{1});
    CHECK(res.stats.models == 2);

    SUBCASE("initial bound") {
        SolveOptions opts;
        opts.opt_values = std::vector<val_t>{3};
        lines.clear();
        auto bounded = solve(prg, opts, [&](Model const &m) { lines.push_back(model_line(prg, m)); });
        CHECK(lines == std::vector<std::string>{"a x$*x$<25 x=1"});
        CHECK(bounded.status == SolveStatus::Optimum);
    }
    SUBCASE("bound below the optimum") {
        SolveOptions opts;
        opts.opt_values = std::vector<val_t>{1};
        auto bounded = solve(prg, opts);
        CHECK(bounded.models.empty());
        CHECK(bounded.status == SolveStatus::Unsatisfiable);
    }
    SUBCASE("all optimal models") {
        auto two = ground_text("$domain(1..100).\n{b}.\na :- x $* x $< 25.\n$minimize{x}.\n");
        SolveOptions opts;
        opts.opt_values = std::vector<val_t>{1};
        opts.theory.opt_all = true;
        std::size_t dups = 0;
        auto set = model_set(two, opts, &dups);
        CHECK(set.size() == 2);
        CHECK(dups == 0);
    }
}

TEST_CASE("initial lookahead on the team program") {
    auto prg = ground_text(HOUSE);
    auto nogoods = initial_lookahead(prg);
    auto has = [&](std::string const &a, std::string const &b) {
        auto ng = Nogood::make({Literal::pos(atom(prg, a)), Literal::pos(atom(prg, b))});
        return std::find(nogoods.begin(), nogoods.end(), *ng) != nogoods.end();
    };
    CHECK(has("work(smith)$==0", "work(smith)$-work(adam)$==1"));
    CHECK(has("work(lea)$==work(adam)", "work(lea)$-work(adam)$==1"));

    SolveOptions opts;
    opts.lookahead = true;
    auto res = solve(prg, opts);
    CHECK(res.stats.lookahead_nogoods == nogoods.size());
    CHECK(res.stats.optimum == std::vector<val_t>{20});
}

TEST_CASE("constraint literals fixed before search reach the theory") {
    auto prg = ground_text("$domain(0..3).\nx $== 2.\na :- x $== 1.\nb :- x $== 2.\n");
    std::vector<Model> models;
    static_cast<void>(solve(prg, {.models = 0}, [&](Model const &m) { models.push_back(m); }));
    REQUIRE(models.size() == 1);
    CHECK(model_line(prg, models[0]) == "b x$==2 x=2");
    CHECK(check_constraint_answer_set(prg, models[0].atoms, models[0].vars));
}

TEST_CASE("quasigroup models") {
    for (std::uint64_t seed = 1; seed <= 4; ++seed) {
        CAPTURE(seed);
        auto global = ground_text(quasigroup_program(4, 0.25, seed, AllDifferent::Global));
        auto pairwise = ground_text(quasigroup_program(4, 0.25, seed, AllDifferent::Pairwise));
        SolveOptions opts;
        CHECK(all_valid(global, opts) == 0);
        CHECK(all_valid(pairwise, opts) == 0);
        std::size_t dups = 0;
        auto a = model_set(global, opts, &dups);
        CHECK(dups == 0);
        auto b = model_set(pairwise, opts, &dups);
        CHECK(dups == 0);
        CHECK(!a.empty());
        CHECK(a.size() == b.size());
        opts.theory.reason_filter = Filter::CCRange;
        opts.theory.conflict_filter = Filter::Backward;
        CHECK(model_set(global, opts).size() == a.size());
    }
}

TEST_CASE("solver agrees with the reference semantics") {
    std::mt19937 rng{7};
    ProgramShape shape{.atoms = 6, .vars = 2, .rules = 7, .lower = 0, .upper = 3};
    std::vector<SolveOptions> configs(1);
    for (auto r : {Filter::Forward, Filter::CCRange}) {
        for (auto c : {Filter::Backward, Filter::CC}) {
            SolveOptions o;
            o.theory.reason_filter = r;
            o.theory.conflict_filter = c;
            configs.push_back(o);
        }
    }
    configs.push_back({.lookahead = true});
    for (unsigned delay : {0U, 10U}) {
        SolveOptions o;
        o.theory.delay = delay;
        configs.push_back(o);
    }
    {
        SolveOptions o;
        o.theory.rebuild_on_backjump = true;
        o.theory.probe_entailment = true;
        configs.push_back(o);
    }
    for (int i = 0; i < 150; ++i) {
        auto text = random_program(rng, shape);
        CAPTURE(text);
        auto prg = ground_text(text);
        auto expected = brute_force_answer_sets(prg);
        for (auto const &opts : configs) {
            std::size_t dups = 0;
            auto got = model_set(prg, opts, &dups);
            CHECK(dups == 0);
            CHECK(got == expected);
        }
    }
}

TEST_CASE("model lines round-trip") {
    auto prg = ground_text(HOUSE);
    auto res = solve(prg, {});
    REQUIRE(!res.models.empty());
    for (auto const &m : res.models) {
        auto line = model_line(prg, m);
        auto back = parse_model_line(prg, line);
        CHECK(back.atoms == m.atoms);
        CHECK(back.vars == m.vars);
    }
    CHECK_THROWS_AS(static_cast<void>(parse_model_line(prg, "nobody")), Error);
}

TEST_CASE("time limit") {
    auto prg = ground_text(quasigroup_program(8, 0.2, 3, AllDifferent::Global));
    SolveOptions opts;
    opts.models = 0;
    opts.time_limit = 1e-9;
    auto res = solve(prg, opts);
    CHECK(res.stats.timed_out);
    CHECK(res.status == (res.models.empty() ? SolveStatus::Unknown : SolveStatus::Satisfiable));
}

TEST_CASE("command line") {
    TempDir dir;
    std::string out;
    std::string err;

    SUBCASE("solve") {
        auto file = dir.write("square.lp", "$domain(1..100).\na :- x $* x $< 25.\n$minimize{x}.\n");
        CHECK(run({file}, &out) == 0);
        CHECK(out == "Answer: 1\nx=5\nOptimization: 5\nAnswer: 2\na x$*x$<25 x=1\nOptimization: 1\nOPTIMUM FOUND\n");
    }
    SUBCASE("enumeration") {
        auto file = dir.write("pq.lp", "p :- not q.\nq :- not p.\n");
        CHECK(run({file, "-n", "0"}, &out) == 0);
        CHECK(out == "Answer: 1\nq\nAnswer: 2\np\nSATISFIABLE\n");
    }
    SUBCASE("unsatisfiable") {
        auto file = dir.write("u.lp", "$domain(0..3).\nx $> 5.\n");
        CHECK(run({file}, &out) == 0);
        CHECK(out == "UNSATISFIABLE\n");
    }
    SUBCASE("errors") {
        CHECK(run({dir.write("bad.lp", "p :- q(.\n")}, &out, &err) == 2);
        CHECK(err.find("error") != std::string::npos);
        CHECK(run({(dir.path / "missing.lp").string()}, &out, &err) == 2);
        CHECK(run({"--no-such-flag"}, &out, &err) == 2);
        CHECK(run({dir.write("ok.lp", "p.\n"), "--csp-reduce-conflict", "nonsense"}, &out, &err) == 2);
        CHECK(run({dir.write("opt.lp", "$domain(0..3).\n$minimize{x}.\n"), "--csp-opt-val", "1,2"}, &out, &err) == 2);
        CHECK(run({"--help"}, &out, &err) == 0);
    }
    SUBCASE("filter letters and csv") {
        auto file = dir.write("team.lp", HOUSE);
        auto csv = (dir.path / "runs.csv").string();
        CHECK(run({file, "--csp-reduce-conflict", "b", "--csp-reduce-reason", "ccrange", "--csv", csv}, &out) == 0);
        CHECK(run({file, "--csv", csv, "--csp-initial-lookahead", "--csp-prop-delay", "0"}, &out) == 0);
        std::ifstream in{csv};
        std::vector<std::string> rows;
        for (std::string line; std::getline(in, line);) {
            rows.push_back(line);
        }
        REQUIRE(rows.size() == 3);
        CHECK(rows[0].starts_with("input,reason,conflict,status,"));
        CHECK(rows[1].find(",ccrange,backward,OPTIMUM FOUND,") != std::string::npos);
        CHECK(rows[2].find(",simple,simple,OPTIMUM FOUND,") != std::string::npos);
    }
    SUBCASE("text") {
        auto file = dir.write("team.lp", HOUSE);
        CHECK(run({file, "--text"}, &out) == 0);
        CHECK(ground_text(out).to_string() == ground_text(HOUSE).to_string());
    }
    SUBCASE("generate and bench") {
        auto gen = (dir.path / "qg").string();
        CHECK(run({"gen-quasigroup", gen, "--size", "4", "--count", "2", "--prefill", "0.25"}) == 0);
        CHECK(std::filesystem::exists(dir.path / "qg" / "qg4-000.lp"));
        CHECK(std::filesystem::exists(dir.path / "qg" / "qg4-001.lp"));
        CHECK(run({"bench", gen, "--filters", "s,b", "--limit", "5"}, &out) == 0);
        CHECK(out == "reason,conflict,avg_time,avg_conflict_size,timeouts\n" + out.substr(out.find('\n') + 1));
        CHECK(std::count(out.begin(), out.end(), '\n') == 5);
        CHECK(run({"bench", gen, "--filters", "s,x"}, &out, &err) == 2);
    }
}
