#ifndef CASP_BENCH_HH
#define CASP_BENCH_HH

#include <casp/driver.hh>

#include <filesystem>
#include <iosfwd>

//! @file casp/bench.hh
//! Quasigroup completion instances and the reason/conflict filter matrix.

namespace Casp {

enum class AllDifferent : std::uint8_t {
    Global,   //!< `$distinct` per row and column
    Pairwise, //!< `$!=` between every two cells of a row or column
    None      //!< no all-different constraints
};

//! Quasigroup completion of order n. A random latin square is shuffled and
//! the given fraction of cells is kept as clues; values are chosen through
//! Boolean atoms linked to constraint atoms `q(R,C) $== V`.
[[nodiscard]] auto quasigroup_program(int n, double prefill, std::uint64_t seed, AllDifferent encoding) -> std::string;

struct Instance {
    std::string name;
    std::string text;
};

//! All `*.lp` files of a directory, sorted by name.
[[nodiscard]] auto load_instances(std::filesystem::path const &dir) -> std::vector<Instance>;

struct BenchOptions {
    std::vector<Filter> filters{Filter::Simple, Filter::Forward, Filter::Backward,
                                Filter::Range,  Filter::CC,      Filter::CCRange};
    double time_limit{10};
    SolveOptions solve;
};

struct BenchRun {
    std::string instance;
    Filter reason{Filter::Simple};
    Filter conflict{Filter::Simple};
    double seconds{0};
    double conflict_size{0};
    std::uint64_t conflicts{0};
    bool timeout{false};
};

struct BenchCell {
    Filter reason{Filter::Simple};
    Filter conflict{Filter::Simple};
    double avg_time{0};
    double avg_conflict_size{0};
    std::size_t timeouts{0};
};

//! Run one instance under one configuration.
[[nodiscard]] auto bench_run(Instance const &instance, Filter reason, Filter conflict, BenchOptions const &options)
    -> BenchRun;
//! Every (reason, conflict) pair on every instance, instances sequentially.
[[nodiscard]] auto run_matrix(std::vector<Instance> const &instances, BenchOptions const &options)
    -> std::vector<BenchRun>;
//! Averages per configuration, in matrix order.
[[nodiscard]] auto summarize(std::vector<BenchRun> const &runs, BenchOptions const &options) -> std::vector<BenchCell>;

//! Header `reason,conflict,avg_time,avg_conflict_size,timeouts`.
void write_csv(std::ostream &out, std::vector<BenchCell> const &cells);
//! Rows are reason filters, columns conflict filters; each entry is the
//! reduction in percent relative to the worst configuration.
void print_matrix(std::ostream &out, std::vector<BenchCell> const &cells, bool conflict_size);

} // namespace Casp

#endif
