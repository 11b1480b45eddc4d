#ifndef MINIPGAS_SPMV_RUN_HPP
#define MINIPGAS_SPMV_RUN_HPP

#include <string>
#include <string_view>

#include "minipgas/pgas/comm_stats.hpp"
#include "minipgas/spmv/exchange.hpp"

namespace minipgas::spmv {

enum class Strategy { v1, v2 };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

struct SpmvOptions {
    pgas::CompletionPolicy completion = pgas::CompletionPolicy::eager;
    std::uint64_t completion_seed = 0;
    bool check_overlap = false;
    /// Stale-ghost detection in the local multiply.
    bool check_phases = false;
};

struct SpmvRunReport {
    int iterations = 0;
    Strategy strategy = Strategy::v1;
    Index block_size = 0;
    int ranks = 0;
    Index n = 0;
    double total_seconds = 0.0;
    double seconds_per_iteration = 0.0;
    double gflops = 0.0;
    /// Traffic of the iteration loop only (setup collectives excluded).
    pgas::CommStats measured;
    /// Model bytes per step times iterations.
    PairVolume predicted;
    bool volume_match = false;
    /// Final iterate, original (unpadded) length.
    sparse::DenseVector x;
};

/// Iterates { exchange; y = M x; x = y } on P ranks with block size B.
SpmvRunReport run_spmv(const sparse::EllpackMatrix& m, const sparse::DenseVector& x0, int iterations,
                       Strategy strategy, Index block_size, int ranks, const SpmvOptions& options = {});

/// Serial reference: x_{k+1} = M x_k, `iterations` times.
sparse::DenseVector spmv_iterate(const sparse::EllpackMatrix& m, sparse::DenseVector x, int iterations);

} // namespace minipgas::spmv

#endif // MINIPGAS_SPMV_RUN_HPP
