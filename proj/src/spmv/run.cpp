#include "minipgas/spmv/run.hpp"

#include <chrono>

namespace minipgas::spmv {

std::string_view to_string(Strategy s) { return s == Strategy::v1 ? "v1" : "v2"; }

Strategy parse_strategy(std::string_view s) {
    if (s == "v1")
        return Strategy::v1;
    if (s == "v2")
        return Strategy::v2;
    throw ArgumentError("unknown strategy '" + std::string(s) + "' (expected v1 or v2)");
}

sparse::DenseVector spmv_iterate(const sparse::EllpackMatrix& m, sparse::DenseVector x, int iterations) {
    for (int i = 0; i < iterations; ++i)
        x = sparse::spmv_serial(m, x);
    return x;
}

namespace {

struct RankResult {
    std::vector<double> x_owned;
    pgas::CommStats measured;
    PairVolume per_step;
    double seconds = 0.0;
};

} // namespace

SpmvRunReport run_spmv(const sparse::EllpackMatrix& m, const sparse::DenseVector& x0, int iterations,
                       Strategy strategy, Index block_size, int ranks, const SpmvOptions& options) {
    if (iterations < 1)
        throw ArgumentError("run_spmv needs iterations >= 1");
    const BlockCyclicLayout layout = build_layout(m.n, block_size, ranks);
    const sparse::EllpackMatrix padded = pad_matrix(m, layout);
    const sparse::DenseVector x_padded = pad_vector(x0, layout);

    pgas::WorldConfig cfg;
    cfg.ranks = ranks;
    cfg.completion = options.completion;
    cfg.seed = options.completion_seed;
    cfg.check_overlap = options.check_overlap;
    pgas::World world(cfg);

    auto results = world.run([&](Rank& rank) {
        const LocalSlice slice = distribute_matrix(rank, padded, layout);
        const IndexSet need = analyze_requirements(rank, slice, layout);

        CommPlanV1 p1;
        CommPlanV2 p2;
        PairVolume per_step;
        if (strategy == Strategy::v1) {
            p1 = plan_v1(gather_requirements(rank, need), layout);
            per_step = comm_volume_model(p1);
        } else {
            p2 = plan_v2(rank, need, layout);
            per_step = comm_volume_model(p2);
        }

        DistVector x = make_dist_vector(rank, layout, x_padded);
        const GlobalRef<double> y = rank.allocate<double>(static_cast<std::size_t>(layout.rows_per_rank()));
        GhostedVector gv = make_ghosted(layout, need);
        const auto resolved = resolve_columns(rank, slice, layout, gv.ghost_indices);

        rank.barrier();
        const pgas::CommStats before = rank.comm_stats();
        rank.barrier();
        const auto t0 = std::chrono::steady_clock::now();

        for (int it = 0; it < iterations; ++it) {
            if (strategy == Strategy::v1)
                exchange_v1(rank, x, p1, layout, gv);
            else
                exchange_v2(rank, x, p2, layout, gv);
            spmv_local(rank, slice, resolved, gv, y, x.version, options.check_phases);
            auto yv = rank.local_view(y);
            auto xv = rank.local_view(x.owned);
            std::copy(yv.begin(), yv.end(), xv.begin());
            ++x.version;
            // no rank may start the next exchange (overwriting SRBs or
            // reading x) before every rank has consumed this one
            rank.barrier();
        }

        const auto t1 = std::chrono::steady_clock::now();
        RankResult out;
        out.measured = rank.comm_stats() - before;
        out.per_step = per_step;
        out.seconds = std::chrono::duration<double>(t1 - t0).count();
        auto xv = rank.local_view(x.owned);
        out.x_owned.assign(xv.begin(), xv.end());
        return out;
    });

    SpmvRunReport rep;
    rep.iterations = iterations;
    rep.strategy = strategy;
    rep.block_size = block_size;
    rep.ranks = ranks;
    rep.n = m.n;
    rep.total_seconds = results[0].seconds;
    rep.seconds_per_iteration = rep.total_seconds / iterations;
    const double flops = static_cast<double>(sparse::flops_count(m)) * iterations;
    rep.gflops = rep.total_seconds > 0.0 ? flops / rep.total_seconds / 1e9 : 0.0;
    rep.measured = results[0].measured;
    rep.predicted = results[0].per_step;
    rep.predicted *= static_cast<std::uint64_t>(iterations);
    rep.volume_match = pgas::volumes_match(rep.measured, rep.predicted);

    sparse::DenseVector full(layout.n_padded);
    for (int r = 0; r < ranks; ++r) {
        const auto& part = results[static_cast<std::size_t>(r)].x_owned;
        for (Index l = 0; l < layout.rows_per_rank(); ++l)
            full[layout.global_row(RankId{r}, l)] = part[static_cast<std::size_t>(l)];
    }
    rep.x = full.head(m.n);
    return rep;
}

} // namespace minipgas::spmv
