#include "minipgas/bench/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <random>
#include <sstream>
#include <thread>

#include "minipgas/sparse/io.hpp"

namespace minipgas::bench {

const char* const csv_header =
    "kernel,strategy,P,B,grid,size,iters,wall_s,avg_step_s,gflops,bytes_measured,bytes_predicted,"
    "volume_match,verify_pass,seed";

namespace {

template <typename T>
T parse_number(std::string_view text, std::string_view what) {
    T value{};
    auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw ArgumentError("invalid " + std::string(what) + " '" + std::string(text) + "'");
    return value;
}

std::string fixed6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

sparse::DenseVector initial_vector(Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed ^ 0x5DEECE66Dull);
    sparse::DenseVector x(n);
    for (Index i = 0; i < n; ++i)
        x[i] = 2.0 * (static_cast<double>(rng() >> 11) * 0x1.0p-53) - 1.0;
    return x;
}

std::string pair_diff(const pgas::CommStats& measured, const pgas::PairVolume& predicted,
                      std::string_view label) {
    std::ostringstream os;
    for (int a = 0; a < measured.ranks(); ++a)
        for (int b = 0; b < measured.ranks(); ++b) {
            const auto got = measured.pair(pgas::RankId{a}, pgas::RankId{b}).bytes;
            const auto want = predicted.at(pgas::RankId{a}, pgas::RankId{b});
            if (got != want)
                os << label << ": pair " << a << "->" << b << " measured " << got << " bytes, predicted "
                   << want << '\n';
        }
    return os.str();
}

struct SpmvInput {
    sparse::EllpackMatrix matrix;
    sparse::DenseVector x0;
    std::uint64_t seed;
};

SpmvInput load_spmv_input(const RunConfig& c) {
    SpmvInput in;
    sparse::CooMatrix coo;
    in.seed = c.seed;
    if (c.synthetic) {
        if (c.synthetic->seed)
            in.seed = *c.synthetic->seed;
        coo = sparse::generate_synthetic(c.synthetic->n, c.synthetic->r_nz, c.synthetic->bandwidth, in.seed);
    } else {
        coo = sparse::read_matrix_market(*c.matrix_path);
    }
    in.matrix = sparse::from_coo(coo);
    in.x0 = initial_vector(in.matrix.n, in.seed);
    return in;
}

RunOutcome run_spmv_kernel(const RunConfig& c, const SpmvInput& in) {
    RunOutcome out;
    std::vector<spmv::Strategy> strategies;
    if (c.strategy != StrategyChoice::v2)
        strategies.push_back(spmv::Strategy::v1);
    if (c.strategy != StrategyChoice::v1)
        strategies.push_back(spmv::Strategy::v2);

    spmv::SpmvOptions opts;
    opts.check_overlap = c.check_overlap;
    opts.check_phases = c.check_overlap;

    std::optional<sparse::DenseVector> reference;
    if (c.verify)
        reference = spmv::spmv_iterate(in.matrix, in.x0, c.iterations);

    std::vector<sparse::DenseVector> finals;
    std::ostringstream diag;
    for (auto s : strategies) {
        spmv::SpmvRunReport rep = spmv::run_spmv(in.matrix, in.x0, c.iterations, s, c.block_size, c.ranks, opts);
        if (c.perturb == Perturbation::result && rep.x.size() > 0)
            rep.x[0] += 1.0;
        if (c.perturb == Perturbation::volume && rep.ranks > 1)
            rep.measured.pair(pgas::RankId{0}, pgas::RankId{1}).bytes += 8;
        rep.volume_match = pgas::volumes_match(rep.measured, rep.predicted);

        ReportRow row;
        row.kernel = "spmv";
        row.strategy = std::string(spmv::to_string(s));
        row.ranks = c.ranks;
        row.block_size = c.block_size;
        row.size = std::to_string(in.matrix.n);
        row.iters = c.iterations;
        row.wall_s = rep.total_seconds;
        row.avg_step_s = rep.seconds_per_iteration;
        row.gflops = rep.gflops;
        row.bytes_measured = rep.measured.total().bytes;
        row.bytes_predicted = rep.predicted.total();
        row.volume_match = rep.volume_match;
        row.seed = in.seed;
        if (!rep.volume_match) {
            diag << pair_diff(rep.measured, rep.predicted, row.strategy);
            out.exit_code = 2;
        }
        if (reference) {
            const VerifyResult v = verify({rep.x.data(), static_cast<std::size_t>(rep.x.size())},
                                          {reference->data(), static_cast<std::size_t>(reference->size())});
            row.verify_pass = v.pass;
            if (!v.pass) {
                diag << row.strategy << " vs serial reference: " << v.summary();
                out.exit_code = 2;
            }
        }
        finals.push_back(std::move(rep.x));
        out.rows.push_back(std::move(row));
    }

    if (finals.size() == 2) {
        const VerifyResult v = verify({finals[1].data(), static_cast<std::size_t>(finals[1].size())},
                                      {finals[0].data(), static_cast<std::size_t>(finals[0].size())});
        if (!v.pass) {
            diag << "v2 vs v1: " << v.summary();
            out.exit_code = 2;
            for (auto& row : out.rows)
                if (row.verify_pass)
                    row.verify_pass = false;
        }
    }
    out.diagnostics = diag.str();
    return out;
}

RunOutcome run_heat_kernel(const RunConfig& c) {
    RunOutcome out;
    heat::HeatOptions opts;
    opts.check_overlap = c.check_overlap;
    heat::HeatRunReport rep = heat::run_heat(c.M, c.N, c.steps, c.grid, c.r, c.init, opts);
    if (c.perturb == Perturbation::result && rep.field.size() > 0) {
        rep.field(0, 0) += 1.0;
        rep.checksum += 1.0;
    }
    if (c.perturb == Perturbation::volume && c.grid.ranks() > 1)
        rep.measured.pair(pgas::RankId{0}, pgas::RankId{1}).bytes += 8;
    rep.volume_match = pgas::volumes_match(rep.measured, rep.predicted);

    ReportRow row;
    row.kernel = "heat";
    row.ranks = c.grid.ranks();
    row.grid = std::to_string(c.grid.mprocs) + "x" + std::to_string(c.grid.nprocs);
    row.size = std::to_string(c.M) + "x" + std::to_string(c.N);
    row.iters = c.steps;
    row.wall_s = rep.total_seconds;
    row.avg_step_s = rep.avg_seconds_per_step;
    row.bytes_measured = rep.measured.total().bytes;
    row.bytes_predicted = rep.predicted.total();
    row.volume_match = rep.volume_match;

    std::ostringstream diag;
    if (!rep.volume_match) {
        diag << pair_diff(rep.measured, rep.predicted, "heat");
        out.exit_code = 2;
    }
    if (c.verify) {
        const heat::HeatRunReport ref = heat::run_heat(c.M, c.N, c.steps, heat::ProcessGrid{1, 1}, c.r, c.init);
        VerifyResult v = verify({rep.field.data(), static_cast<std::size_t>(rep.field.size())},
                                {ref.field.data(), static_cast<std::size_t>(ref.field.size())});
        if (rep.checksum != ref.checksum)
            v.pass = false;
        row.verify_pass = v.pass;
        if (!v.pass) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "checksum %.17g, 1-rank reference %.17g\n", rep.checksum, ref.checksum);
            diag << "heat vs 1-rank reference: " << buf << v.summary();
            out.exit_code = 2;
        }
    }
    out.rows.push_back(std::move(row));
    out.diagnostics = diag.str();
    return out;
}

void append(RunOutcome& into, RunOutcome&& from) {
    for (auto& r : from.rows)
        into.rows.push_back(std::move(r));
    into.diagnostics += from.diagnostics;
    into.exit_code = std::max(into.exit_code, from.exit_code);
}

} // namespace

StrategyChoice parse_strategy_choice(std::string_view s) {
    if (s == "v1")
        return StrategyChoice::v1;
    if (s == "v2")
        return StrategyChoice::v2;
    if (s == "both")
        return StrategyChoice::both;
    throw ArgumentError("strategy must be v1, v2 or both, got '" + std::string(s) + "'");
}

SyntheticParams parse_synthetic(std::string_view text) {
    SyntheticParams p;
    bool have_n = false, have_rnz = false, have_bw = false;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = text.substr(0, comma);
        text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
        const auto eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ArgumentError("synthetic parameter '" + std::string(item) + "' is not key=value");
        const auto key = item.substr(0, eq);
        const auto value = item.substr(eq + 1);
        if (key == "n") {
            p.n = parse_number<Index>(value, "n");
            have_n = true;
        } else if (key == "rnz") {
            p.r_nz = parse_number<Index>(value, "rnz");
            have_rnz = true;
        } else if (key == "bw") {
            p.bandwidth = parse_number<Index>(value, "bw");
            have_bw = true;
        } else if (key == "seed") {
            p.seed = parse_number<std::uint64_t>(value, "seed");
        } else {
            throw ArgumentError("unknown synthetic parameter '" + std::string(key) + "'");
        }
    }
    if (!have_n || !have_rnz || !have_bw)
        throw ArgumentError("--synthetic needs n=, rnz= and bw=");
    return p;
}

void RunConfig::validate() const {
    if (ranks < 1)
        throw ArgumentError("P must be >= 1");
    if (kernel == Kernel::spmv) {
        if (matrix_path.has_value() == synthetic.has_value())
            throw ArgumentError("spmv needs exactly one of --matrix or --synthetic");
        if (block_size < 1)
            throw ArgumentError("B must be >= 1");
        if (iterations < 1)
            throw ArgumentError("--iters must be >= 1");
        if (synthetic) {
            if (synthetic->n < 1 || synthetic->bandwidth < 1)
                throw ArgumentError("synthetic n and bw must be >= 1");
            if (synthetic->r_nz < 0 || synthetic->r_nz >= synthetic->n)
                throw ArgumentError("synthetic rnz must satisfy 0 <= rnz < n");
        }
    } else {
        if (grid.ranks() != ranks)
            throw ArgumentError("P (" + std::to_string(ranks) + ") does not match grid " +
                                std::to_string(grid.mprocs) + "x" + std::to_string(grid.nprocs));
        if (steps < 1)
            throw ArgumentError("--steps must be >= 1");
        heat::check_stability(r);
        (void)heat::decompose(M, N, grid);
    }
}

int default_ranks() {
    if (const char* env = std::getenv("MINIPGAS_RANKS"); env != nullptr && *env != '\0') {
        const int p = parse_number<int>(env, "MINIPGAS_RANKS");
        if (p < 1)
            throw ArgumentError("MINIPGAS_RANKS must be >= 1");
        return p;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

std::string format_row(const ReportRow& row) {
    std::ostringstream os;
    os << row.kernel << ',' << row.strategy << ',' << row.ranks << ',';
    if (row.block_size)
        os << *row.block_size;
    os << ',' << row.grid << ',' << row.size << ',' << row.iters << ',' << fixed6(row.wall_s) << ','
       << fixed6(row.avg_step_s) << ',';
    if (row.gflops)
        os << fixed6(*row.gflops);
    os << ',' << row.bytes_measured << ',' << row.bytes_predicted << ','
       << (row.volume_match ? "true" : "false") << ',';
    if (row.verify_pass)
        os << (*row.verify_pass ? "true" : "false");
    os << ',';
    if (row.seed)
        os << *row.seed;
    return os.str();
}

void write_csv(std::ostream& out, std::span<const ReportRow> rows) {
    out << csv_header << '\n';
    for (const auto& r : rows)
        out << format_row(r) << '\n';
}

std::string VerifyResult::summary() const {
    if (pass)
        return "identical\n";
    std::ostringstream os;
    os << mismatches << " mismatching position(s)\n";
    char buf[128];
    for (const auto& m : first) {
        std::snprintf(buf, sizeof buf, "  [%zu] got %.17g expected %.17g\n", m.index, m.actual, m.expected);
        os << buf;
    }
    return os.str();
}

VerifyResult verify(std::span<const double> result, std::span<const double> reference) {
    VerifyResult v;
    if (result.size() != reference.size()) {
        v.pass = false;
        v.mismatches = std::max(result.size(), reference.size());
        return v;
    }
    for (std::size_t i = 0; i < result.size(); ++i) {
        if (result[i] == reference[i])
            continue;
        v.pass = false;
        ++v.mismatches;
        if (v.first.size() < 10)
            v.first.push_back({i, result[i], reference[i]});
    }
    return v;
}

RunOutcome run(const RunConfig& config) {
    config.validate();
    if (config.kernel == Kernel::heat)
        return run_heat_kernel(config);
    return run_spmv_kernel(config, load_spmv_input(config));
}

RunOutcome sweep(const RunConfig& base, SweepAxis axis, std::span<const std::string> values) {
    if (values.empty())
        throw ArgumentError("sweep needs at least one value");
    if ((axis == SweepAxis::grid) != (base.kernel == Kernel::heat))
        throw ArgumentError("grid sweeps apply to heat; B and P sweeps to spmv");
    RunOutcome out;
    std::optional<SpmvInput> input;
    for (const auto& v : values) {
        RunConfig c = base;
        switch (axis) {
        case SweepAxis::block_size:
            c.block_size = parse_number<Index>(v, "B value");
            break;
        case SweepAxis::ranks:
            c.ranks = parse_number<int>(v, "P value");
            break;
        case SweepAxis::grid:
            c.grid = heat::parse_grid(v);
            c.ranks = c.grid.ranks();
            break;
        }
        c.validate();
        if (c.kernel == Kernel::heat) {
            append(out, run_heat_kernel(c));
        } else {
            if (!input)
                input = load_spmv_input(c);
            append(out, run_spmv_kernel(c, *input));
        }
    }
    return out;
}

} // namespace minipgas::bench
