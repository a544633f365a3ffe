#include "casp/cli.hh"

#include "casp/bench.hh"
#include "casp/driver.hh"
#include "casp/frontend.hh"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

namespace Casp {

namespace {

auto filter_arg(std::string const &text) -> Filter {
    if (text.size() == 1) {
        for (auto f : all_filters()) {
            if (filter_letter(f) == text[0]) {
                return f;
            }
        }
    }
    return parse_filter(text);
}

auto filter_validator() -> CLI::Validator {
    return CLI::Validator(
        [](std::string &text) -> std::string {
            try {
                static_cast<void>(filter_arg(text));
                return {};
            }
            catch (Error const &e) {
                return e.what();
            }
        },
        "FILTER");
}

struct SolveArgs {
    std::string conflict{"simple"};
    std::string reason{"simple"};
    unsigned delay{1};
    bool lookahead{false};
    bool rebuild{false};
    bool probe{false};
    bool opt_all{false};
    std::vector<val_t> opt_values;
    double time_limit{0};
    std::uint64_t seed{0};

    void add(CLI::App &app) {
        app.add_option("--csp-reduce-conflict", conflict, "Conflict filter: simple, deletion, forward, backward, range, "
                                                          "cc, ccrange (or s d f b r c o)")
            ->check(filter_validator());
        app.add_option("--csp-reduce-reason", reason, "Reason filter")->check(filter_validator());
        app.add_option("--csp-prop-delay", delay, "Theory propagation on every n'th call; 0: total assignments only");
        app.add_flag("--csp-initial-lookahead", lookahead, "Probe constraint literals before search");
        app.add_option("--csp-opt-val", opt_values, "Initial objective bound, one value per level")->delimiter(',');
        app.add_flag("--csp-opt-all", opt_all, "Report solutions as good as the last one");
        app.add_flag("--rebuild-on-backjump", rebuild, "Rebuild spaces on backjumps instead of restoring snapshots");
        app.add_flag("--probe-entailment", probe, "Decide entailment by posting into copies");
        app.add_option("--time-limit", time_limit, "Seconds; 0 for none");
        app.add_option("--seed", seed, "Heuristic tie-breaking seed")->envname("CASP_SEED");
    }

    [[nodiscard]] auto options() const -> SolveOptions {
        SolveOptions opts;
        opts.theory.conflict_filter = filter_arg(conflict);
        opts.theory.reason_filter = filter_arg(reason);
        opts.theory.delay = delay;
        opts.theory.rebuild_on_backjump = rebuild;
        opts.theory.probe_entailment = probe;
        opts.theory.opt_all = opt_all;
        opts.lookahead = lookahead;
        opts.seed = seed;
        if (time_limit > 0) {
            opts.time_limit = time_limit;
        }
        if (!opt_values.empty()) {
            opts.opt_values = opt_values;
        }
        return opts;
    }
};

auto read_input(std::string const &path) -> std::string {
    std::stringstream text;
    if (path.empty() || path == "-") {
        text << std::cin.rdbuf();
        return text.str();
    }
    std::ifstream in{path};
    if (!in) {
        throw GroundError("cannot read " + path);
    }
    text << in.rdbuf();
    return text.str();
}

void append_csv(std::string const &path, std::string const &input, SolveOptions const &opts, SolveResult const &res) {
    bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream out{path, std::ios::app};
    if (!out) {
        throw Error("cannot write " + path);
    }
    if (fresh) {
        out << "input,reason,conflict,status,models,conflicts,avg_conflict_size,conflict_filter_calls,"
               "reason_filter_calls,rebuilds,filter_time,solve_time\n";
    }
    auto const &s = res.stats;
    out << input << "," << to_string(opts.theory.reason_filter) << "," << to_string(opts.theory.conflict_filter) << ","
        << to_string(res.status) << "," << s.models << "," << s.conflicts << "," << std::fixed << std::setprecision(4)
        << s.average_conflict_size() << "," << s.theory.conflict_filter_calls << "," << s.theory.reason_filter_calls
        << "," << s.theory.rebuilds << "," << s.theory.filter_seconds << "," << s.solve_seconds << "\n";
}

auto solve_command(std::string const &input, std::size_t models, bool stats, bool text, std::string const &csv,
                   SolveArgs const &args, std::ostream &out, std::ostream &err) -> int {
    GroundProgram prg;
    std::vector<std::string> warnings;
    try {
        prg = ground_text(read_input(input), &warnings);
        tightness_check(prg);
    }
    catch (ParseError const &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch (GroundError const &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    for (auto const &w : warnings) {
        err << "warning: " << w << "\n";
    }
    if (text) {
        prg.print(out);
        return 0;
    }
    auto opts = args.options();
    opts.models = models;
    if (opts.opt_values && opts.opt_values->size() != prg.objectives.size()) {
        err << "error: --csp-opt-val expects " << prg.objectives.size() << " value(s)\n";
        return 2;
    }
    std::size_t answer = 0;
    auto result = solve(prg, opts, [&](Model const &model) {
        out << "Answer: " << ++answer << "\n";
        print_model(out, prg, model);
        if (!model.objective.empty()) {
            out << "Optimization:";
            for (auto v : model.objective) {
                out << " " << v;
            }
            out << "\n";
        }
    });
    if (result.stats.timed_out) {
        out << "TIME LIMIT\n";
    }
    out << to_string(result.status) << "\n";
    if (stats) {
        out << "\n";
        print_stats(out, result.stats);
    }
    if (!csv.empty()) {
        append_csv(csv, input.empty() ? "-" : input, opts, result);
    }
    return 0;
}

} // namespace

auto run_cli(int argc, char const *const *argv, std::ostream &out, std::ostream &err) -> int {
    CLI::App app{"Constraint answer set solver"};
    app.require_subcommand(0, 1);

    std::string input;
    std::size_t models = 1;
    bool stats = false;
    bool text = false;
    std::string csv;
    SolveArgs solve_args;
    app.add_option("file", input, "Input program; stdin if omitted");
    app.add_option("-n,--models", models, "Number of models; 0 for all (ignored when optimizing)");
    app.add_flag("--stats", stats, "Print statistics");
    app.add_flag("--text", text, "Print the ground program");
    app.add_option("--csv", csv, "Append a statistics row to this file");
    solve_args.add(app);

    auto *bench = app.add_subcommand("bench", "Run all reason/conflict filter pairs on a directory of instances");
    std::string bench_dir;
    std::string bench_csv;
    std::string bench_filters{"s,f,b,r,c,o"};
    bool bench_matrix = false;
    double bench_limit = 10;
    SolveArgs bench_args;
    bench->add_option("dir", bench_dir, "Directory of *.lp instances")->required()->check(CLI::ExistingDirectory);
    bench->add_option("--csv", bench_csv, "Write the matrix CSV here; stdout if omitted");
    bench->add_option("--filters", bench_filters, "Comma-separated filters");
    bench->add_flag("--matrix", bench_matrix, "Also print the normalized matrices");
    bench->add_option("--limit", bench_limit, "Per-run time limit in seconds");
    bench->add_option("--csp-prop-delay", bench_args.delay, "Propagation delay");
    bench->add_flag("--csp-initial-lookahead", bench_args.lookahead, "Initial lookahead");
    bench->add_option("--seed", bench_args.seed, "Heuristic seed")->envname("CASP_SEED");

    auto *gen = app.add_subcommand("gen-quasigroup", "Write random quasigroup completion instances");
    std::string gen_dir;
    int gen_size = 10;
    double gen_prefill = 0.3;
    std::size_t gen_count = 20;
    std::uint64_t gen_seed = 1;
    std::string gen_encoding{"global"};
    gen->add_option("dir", gen_dir, "Output directory")->required();
    gen->add_option("--size", gen_size, "Order of the square")->check(CLI::Range(1, 1000));
    gen->add_option("--prefill", gen_prefill, "Fraction of given cells")->check(CLI::Range(0.0, 1.0));
    gen->add_option("--count", gen_count, "Number of instances");
    gen->add_option("--seed", gen_seed, "First seed");
    gen->add_option("--encoding", gen_encoding, "global, pairwise or none")
        ->check(CLI::IsMember({"global", "pairwise", "none"}));

    try {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const &e) {
        auto code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*gen) {
            std::filesystem::create_directories(gen_dir);
            auto enc = gen_encoding == "global"   ? AllDifferent::Global
                       : gen_encoding == "pairwise" ? AllDifferent::Pairwise
                                                    : AllDifferent::None;
            for (std::size_t i = 0; i < gen_count; ++i) {
                std::ostringstream name;
                name << "qg" << gen_size << "-" << std::setw(3) << std::setfill('0') << i << ".lp";
                std::ofstream file{std::filesystem::path{gen_dir} / name.str()};
                file << quasigroup_program(gen_size, gen_prefill, gen_seed + i, enc);
            }
            return 0;
        }
        if (*bench) {
            BenchOptions opts;
            opts.filters.clear();
            std::istringstream list{bench_filters};
            for (std::string f; std::getline(list, f, ',');) {
                try {
                    opts.filters.push_back(filter_arg(f));
                }
                catch (Error const &e) {
                    err << "error: " << e.what() << "\n";
                    return 2;
                }
            }
            opts.time_limit = bench_limit;
            opts.solve = bench_args.options();
            auto instances = load_instances(bench_dir);
            auto cells = summarize(run_matrix(instances, opts), opts);
            if (bench_csv.empty()) {
                write_csv(out, cells);
            }
            else {
                std::ofstream file{bench_csv};
                write_csv(file, cells);
            }
            if (bench_matrix) {
                print_matrix(out, cells, true);
                print_matrix(out, cells, false);
            }
            return 0;
        }
        return solve_command(input, models, stats, text, csv, solve_args, out, err);
    }
    catch (ParseError const &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch (GroundError const &e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    catch (std::exception const &e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace Casp
