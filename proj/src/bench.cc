#include "casp/bench.hh"

#include "casp/frontend.hh"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

namespace Casp {

auto quasigroup_program(int n, double prefill, std::uint64_t seed, AllDifferent encoding) -> std::string {
    std::mt19937_64 rng{seed};
    std::vector<int> rows(static_cast<std::size_t>(n));
    std::vector<int> cols(rows.size());
    std::vector<int> syms(rows.size());
    std::iota(rows.begin(), rows.end(), 0);
    std::iota(cols.begin(), cols.end(), 0);
    std::iota(syms.begin(), syms.end(), 1);
    std::shuffle(rows.begin(), rows.end(), rng);
    std::shuffle(cols.begin(), cols.end(), rng);
    std::shuffle(syms.begin(), syms.end(), rng);
    std::vector<std::pair<int, int>> cells;
    for (int r = 0; r < n; ++r) {
        for (int c = 0; c < n; ++c) {
            cells.emplace_back(r, c);
        }
    }
    std::shuffle(cells.begin(), cells.end(), rng);
    auto clues = static_cast<std::size_t>(prefill * static_cast<double>(cells.size()) + 0.5);
    cells.resize(std::min(clues, cells.size()));
    std::sort(cells.begin(), cells.end());

    std::ostringstream out;
    out << "% quasigroup completion, order " << n << ", seed " << seed << "\n";
    out << "$domain(1.." << n << ").\n";
    out << "row(1.." << n << "). col(1.." << n << "). val(1.." << n << ").\n";
    for (auto [r, c] : cells) {
        auto v = syms[static_cast<std::size_t>((rows[static_cast<std::size_t>(r)] + cols[static_cast<std::size_t>(c)]) % n)];
        out << "pre(" << r + 1 << "," << c + 1 << "," << v << ").\n";
    }
    out << "1 { set(R,C,V) : val(V) } 1 :- row(R), col(C).\n";
    out << "set(R,C,V) :- pre(R,C,V).\n";
    out << "q(R,C) $== V :- set(R,C,V).\n";
    switch (encoding) {
        case AllDifferent::Global:
            out << "$distinct{ q(R,C) : col(C) } :- row(R).\n";
            out << "$distinct{ q(R,C) : row(R) } :- col(C).\n";
            break;
        case AllDifferent::Pairwise:
            out << "q(R,C1) $!= q(R,C2) :- row(R), col(C1), col(C2), C1 < C2.\n";
            out << "q(R1,C) $!= q(R2,C) :- col(C), row(R1), row(R2), R1 < R2.\n";
            break;
        case AllDifferent::None: break;
    }
    return out.str();
}

auto load_instances(std::filesystem::path const &dir) -> std::vector<Instance> {
    std::vector<Instance> out;
    for (auto const &entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".lp") {
            std::ifstream in{entry.path()};
            std::stringstream text;
            text << in.rdbuf();
            out.push_back({entry.path().filename().string(), text.str()});
        }
    }
    std::sort(out.begin(), out.end(), [](Instance const &a, Instance const &b) { return a.name < b.name; });
    return out;
}

auto bench_run(Instance const &instance, Filter reason, Filter conflict, BenchOptions const &options) -> BenchRun {
    auto prg = ground_text(instance.text);
    auto opts = options.solve;
    opts.theory.reason_filter = reason;
    opts.theory.conflict_filter = conflict;
    opts.time_limit = options.time_limit;
    auto result = solve(prg, opts);
    BenchRun run;
    run.instance = instance.name;
    run.reason = reason;
    run.conflict = conflict;
    run.seconds = result.stats.solve_seconds;
    run.conflicts = result.stats.conflicts;
    run.conflict_size = result.stats.average_conflict_size();
    run.timeout = result.stats.timed_out;
    if (run.timeout) {
        run.seconds = options.time_limit;
    }
    return run;
}

auto run_matrix(std::vector<Instance> const &instances, BenchOptions const &options) -> std::vector<BenchRun> {
    std::vector<BenchRun> runs;
    for (auto const &inst : instances) {
        for (auto r : options.filters) {
            for (auto c : options.filters) {
                runs.push_back(bench_run(inst, r, c, options));
            }
        }
    }
    return runs;
}

auto summarize(std::vector<BenchRun> const &runs, BenchOptions const &options) -> std::vector<BenchCell> {
    std::vector<BenchCell> cells;
    for (auto r : options.filters) {
        for (auto c : options.filters) {
            BenchCell cell{r, c};
            std::size_t n = 0;
            for (auto const &run : runs) {
                if (run.reason == r && run.conflict == c) {
                    ++n;
                    cell.avg_time += run.seconds;
                    cell.avg_conflict_size += run.conflict_size;
                    cell.timeouts += run.timeout ? 1 : 0;
                }
            }
            if (n > 0) {
                cell.avg_time /= static_cast<double>(n);
                cell.avg_conflict_size /= static_cast<double>(n);
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

void write_csv(std::ostream &out, std::vector<BenchCell> const &cells) {
    out << "reason,conflict,avg_time,avg_conflict_size,timeouts\n";
    for (auto const &cell : cells) {
        out << to_string(cell.reason) << "," << to_string(cell.conflict) << "," << std::fixed << std::setprecision(4)
            << cell.avg_time << "," << cell.avg_conflict_size << "," << cell.timeouts << "\n";
    }
    out << std::defaultfloat;
}

void print_matrix(std::ostream &out, std::vector<BenchCell> const &cells, bool conflict_size) {
    std::vector<Filter> filters;
    for (auto const &cell : cells) {
        if (std::find(filters.begin(), filters.end(), cell.reason) == filters.end()) {
            filters.push_back(cell.reason);
        }
    }
    auto metric = [&](BenchCell const &c) { return conflict_size ? c.avg_conflict_size : c.avg_time; };
    double worst = 0;
    for (auto const &cell : cells) {
        worst = std::max(worst, metric(cell));
    }
    out << (conflict_size ? "conflict size" : "time") << " reduction (%), rows: reason, columns: conflict\n";
    out << "   ";
    for (auto f : filters) {
        out << std::setw(7) << filter_letter(f);
    }
    out << "\n";
    for (auto r : filters) {
        out << " " << filter_letter(r) << " ";
        for (auto c : filters) {
            auto it = std::find_if(cells.begin(), cells.end(),
                                   [&](BenchCell const &x) { return x.reason == r && x.conflict == c; });
            double v = it == cells.end() || worst == 0 ? 0 : 100.0 * (worst - metric(*it)) / worst;
            out << std::setw(7) << std::fixed << std::setprecision(1) << v;
        }
        out << "\n";
    }
    out << std::defaultfloat;
}

} // namespace Casp
