// minipgas: benchmark driver for the distributed SpMV and 2D heat kernels.
//
//   minipgas spmv  --synthetic n=4096,rnz=6,bw=32 --P 8 --B 64 --strategy both --iters 5 --verify
//   minipgas heat  --M 64 --N 64 --grid 2x2 --steps 50 --verify
//   minipgas sweep --synthetic n=4096,rnz=6,bw=32 --P 8 --B-values 16,64,256 --strategy v1

#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "minipgas/bench/bench.hpp"

namespace {

using namespace minipgas;
using bench::Index;

struct Flags {
    std::optional<int> ranks;
    Index block_size = 64;
    std::string strategy = "both";
    std::string synthetic;
    std::string matrix;
    int iterations = 1;
    std::optional<std::uint64_t> seed;
    Index M = 64, N = 64;
    std::string grid;
    double r = 0.25;
    int steps = 100;
    std::optional<double> boundary, interior;
    std::string init = "hot-boundary";
    bool verify = false;
    bool check_overlap = false;
    std::string perturb = "none";
    std::string output;
    // sweep
    std::string kernel = "spmv";
    std::vector<std::string> b_values, p_values, grid_values;
};

void add_common(CLI::App* app, Flags& f) {
    app->add_option("--P", f.ranks, "World size (default: MINIPGAS_RANKS or cores, max 8)");
    app->add_option("--output", f.output, "CSV output path (default stdout)");
    app->add_flag("--verify", f.verify, "Compare against the serial reference");
    app->add_flag("--check-overlap", f.check_overlap, "Debug mode: journal writes per phase");
    app->add_option("--perturb", f.perturb, "Test hook: none|result|volume")
        ->check(CLI::IsMember({"none", "result", "volume"}))
        ->group("");
}

void add_spmv(CLI::App* app, Flags& f) {
    app->add_option("--synthetic", f.synthetic, "Banded random matrix, e.g. n=4096,rnz=6,bw=32[,seed=7]");
    app->add_option("--matrix", f.matrix, "Matrix Market file");
    app->add_option("--B", f.block_size, "BLOCKSIZE of the block-cyclic distribution");
    app->add_option("--strategy", f.strategy, "v1 (whole blocks), v2 (condensed) or both")
        ->check(CLI::IsMember({"v1", "v2", "both"}));
    app->add_option("--iters", f.iterations, "SpMV iterations (x := M x)");
    app->add_option("--seed", f.seed, "Seed for synthetic matrix and initial vector");
}

void add_heat(CLI::App* app, Flags& f) {
    app->add_option("--M", f.M, "Global rows");
    app->add_option("--N", f.N, "Global columns");
    app->add_option("--grid", f.grid, "Process grid MxN (default 1xP)");
    app->add_option("--steps", f.steps, "Time steps");
    app->add_option("--r", f.r, "Stability factor alpha dt / h^2, in (0, 0.25]");
    app->add_option("--init", f.init, "Initial condition preset: hot-boundary|uniform");
    app->add_option("--boundary", f.boundary, "Dirichlet boundary value (overrides preset)");
    app->add_option("--interior", f.interior, "Initial interior value (overrides preset)");
}

bench::RunConfig to_config(const Flags& f, bench::Kernel kernel) {
    bench::RunConfig c;
    c.kernel = kernel;
    c.verify = f.verify;
    c.check_overlap = f.check_overlap;
    c.perturb = f.perturb == "result"   ? bench::Perturbation::result
                : f.perturb == "volume" ? bench::Perturbation::volume
                                        : bench::Perturbation::none;
    c.ranks = f.ranks ? *f.ranks : bench::default_ranks();
    if (kernel == bench::Kernel::spmv) {
        c.block_size = f.block_size;
        c.strategy = bench::parse_strategy_choice(f.strategy);
        c.iterations = f.iterations;
        if (!f.synthetic.empty())
            c.synthetic = bench::parse_synthetic(f.synthetic);
        if (!f.matrix.empty())
            c.matrix_path = f.matrix;
        if (f.seed)
            c.seed = *f.seed;
    } else {
        c.M = f.M;
        c.N = f.N;
        c.r = f.r;
        c.steps = f.steps;
        c.init = heat::InitSpec::preset(f.init);
        if (f.boundary)
            c.init.boundary = *f.boundary;
        if (f.interior)
            c.init.interior = *f.interior;
        if (!f.grid.empty()) {
            c.grid = heat::parse_grid(f.grid);
            if (!f.ranks)
                c.ranks = c.grid.ranks();
        } else {
            c.grid = heat::ProcessGrid{1, c.ranks};
        }
    }
    return c;
}

int emit(const bench::RunOutcome& out, const std::string& path) {
    if (path.empty()) {
        bench::write_csv(std::cout, out.rows);
    } else {
        std::ofstream file(path);
        if (!file) {
            std::cerr << "minipgas: cannot write '" << path << "'\n";
            return 1;
        }
        bench::write_csv(file, out.rows);
    }
    if (!out.diagnostics.empty())
        std::cerr << out.diagnostics;
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"minipgas: PGAS SpMV and heat-equation benchmarks"};
    app.require_subcommand(1);
    Flags f;

    auto* spmv_cmd = app.add_subcommand("spmv", "Distributed sparse matrix-vector multiplication");
    add_common(spmv_cmd, f);
    add_spmv(spmv_cmd, f);

    auto* heat_cmd = app.add_subcommand("heat", "2D heat equation with halo exchange");
    add_common(heat_cmd, f);
    add_heat(heat_cmd, f);

    auto* sweep_cmd = app.add_subcommand("sweep", "One run per B, P or grid value on identical input");
    add_common(sweep_cmd, f);
    add_spmv(sweep_cmd, f);
    add_heat(sweep_cmd, f);
    sweep_cmd->add_option("--kernel", f.kernel, "spmv or heat")->check(CLI::IsMember({"spmv", "heat"}));
    auto* bv = sweep_cmd->add_option("--B-values", f.b_values, "Block sizes to sweep")->delimiter(',');
    auto* pv = sweep_cmd->add_option("--P-values", f.p_values, "World sizes to sweep")->delimiter(',');
    auto* gv = sweep_cmd->add_option("--grid-values", f.grid_values, "Heat grids to sweep")->delimiter(',');
    bv->excludes(pv)->excludes(gv);
    pv->excludes(gv);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*spmv_cmd)
            return emit(bench::run(to_config(f, bench::Kernel::spmv)), f.output);
        if (*heat_cmd)
            return emit(bench::run(to_config(f, bench::Kernel::heat)), f.output);

        const auto kernel = f.kernel == "heat" ? bench::Kernel::heat : bench::Kernel::spmv;
        bench::RunConfig base = to_config(f, kernel);
        if (!f.b_values.empty())
            return emit(bench::sweep(base, bench::SweepAxis::block_size, f.b_values), f.output);
        if (!f.p_values.empty())
            return emit(bench::sweep(base, bench::SweepAxis::ranks, f.p_values), f.output);
        if (!f.grid_values.empty()) {
            base.grid = heat::parse_grid(f.grid_values.front());
            base.ranks = base.grid.ranks();
            return emit(bench::sweep(base, bench::SweepAxis::grid, f.grid_values), f.output);
        }
        std::cerr << "minipgas sweep: give --B-values, --P-values or --grid-values\n";
        return 1;
    } catch (const ArgumentError& e) {
        std::cerr << "minipgas: usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "minipgas: error: " << e.what() << '\n';
        return 1;
    }
}
