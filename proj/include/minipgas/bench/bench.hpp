#ifndef MINIPGAS_BENCH_BENCH_HPP
#define MINIPGAS_BENCH_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "minipgas/heat/heat.hpp"
#include "minipgas/spmv/run.hpp"

namespace minipgas::bench {

using sparse::Index;

enum class Kernel { spmv, heat };
enum class StrategyChoice { v1, v2, both };

StrategyChoice parse_strategy_choice(std::string_view s);

struct SyntheticParams {
    Index n = 0;
    Index r_nz = 0;
    Index bandwidth = 1;
    std::optional<std::uint64_t> seed;
};

/// Parses "n=4096,rnz=6,bw=32[,seed=7]".
SyntheticParams parse_synthetic(std::string_view text);

/// Test hook: corrupts a result after the run so the exit-code contract can be exercised.
enum class Perturbation { none, result, volume };

struct RunConfig {
    Kernel kernel = Kernel::spmv;
    int ranks = 1;

    // spmv
    Index block_size = 64;
    StrategyChoice strategy = StrategyChoice::both;
    std::optional<std::filesystem::path> matrix_path;
    std::optional<SyntheticParams> synthetic;
    int iterations = 1;
    std::uint64_t seed = 1;

    // heat
    Index M = 64;
    Index N = 64;
    heat::ProcessGrid grid;
    double r = 0.25;
    int steps = 100;
    heat::InitSpec init;

    bool verify = false;
    bool check_overlap = false;
    Perturbation perturb = Perturbation::none;

    /// Throws ArgumentError describing the first problem.
    void validate() const;
};

/// World size when --P is absent: MINIPGAS_RANKS, else hardware threads capped at 8.
int default_ranks();

struct ReportRow {
    std::string kernel;
    std::string strategy;
    int ranks = 0;
    std::optional<Index> block_size;
    std::string grid;
    std::string size;
    int iters = 0;
    double wall_s = 0.0;
    double avg_step_s = 0.0;
    std::optional<double> gflops;
    std::uint64_t bytes_measured = 0;
    std::uint64_t bytes_predicted = 0;
    bool volume_match = false;
    std::optional<bool> verify_pass;
    std::optional<std::uint64_t> seed;
};

extern const char* const csv_header;

std::string format_row(const ReportRow& row);
void write_csv(std::ostream& out, std::span<const ReportRow> rows);

struct Mismatch {
    std::size_t index;
    double actual;
    double expected;
};

/// Exact elementwise comparison; keeps the first 10 mismatches.
struct VerifyResult {
    bool pass = true;
    std::size_t mismatches = 0;
    std::vector<Mismatch> first;

    std::string summary() const;
};

VerifyResult verify(std::span<const double> result, std::span<const double> reference);

struct RunOutcome {
    std::vector<ReportRow> rows;
    int exit_code = 0; ///< 0 ok, 2 verification or volume mismatch
    std::string diagnostics;
};

/// Executes the configured kernel(s). Usage problems throw ArgumentError.
RunOutcome run(const RunConfig& config);

enum class SweepAxis { block_size, ranks, grid };

/// One run per value on the identical input; rows in sweep order.
RunOutcome sweep(const RunConfig& base, SweepAxis axis, std::span<const std::string> values);

} // namespace minipgas::bench

#endif // MINIPGAS_BENCH_BENCH_HPP
