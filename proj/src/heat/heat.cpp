#include "minipgas/heat/heat.hpp"

#include <charconv>
#include <chrono>
#include <string>

namespace minipgas::heat {

std::optional<RankId> ProcessGrid::up(RankId r) const {
    if (iproc(r) == 0)
        return std::nullopt;
    return RankId{r.value - nprocs};
}

std::optional<RankId> ProcessGrid::down(RankId r) const {
    if (iproc(r) == mprocs - 1)
        return std::nullopt;
    return RankId{r.value + nprocs};
}

std::optional<RankId> ProcessGrid::left(RankId r) const {
    if (kproc(r) == 0)
        return std::nullopt;
    return RankId{r.value - 1};
}

std::optional<RankId> ProcessGrid::right(RankId r) const {
    if (kproc(r) == nprocs - 1)
        return std::nullopt;
    return RankId{r.value + 1};
}

ProcessGrid parse_grid(std::string_view text) {
    const auto x = text.find('x');
    ProcessGrid g{0, 0};
    if (x != std::string_view::npos) {
        const auto a = text.substr(0, x);
        const auto b = text.substr(x + 1);
        auto ra = std::from_chars(a.data(), a.data() + a.size(), g.mprocs);
        auto rb = std::from_chars(b.data(), b.data() + b.size(), g.nprocs);
        if (ra.ec == std::errc{} && ra.ptr == a.data() + a.size() && rb.ec == std::errc{} &&
            rb.ptr == b.data() + b.size() && g.mprocs >= 1 && g.nprocs >= 1)
            return g;
    }
    throw ArgumentError("grid must look like MxN with M, N >= 1, got '" + std::string(text) + "'");
}

std::vector<SubdomainGeometry> decompose(Index M, Index N, const ProcessGrid& grid) {
    if (grid.mprocs < 1 || grid.nprocs < 1)
        throw ArgumentError("process grid dimensions must be >= 1");
    if (M < 1 || N < 1)
        throw ArgumentError("domain dimensions must be >= 1");
    if (M % grid.mprocs != 0 || N % grid.nprocs != 0)
        throw ArgumentError("domain " + std::to_string(M) + "x" + std::to_string(N) +
                            " does not divide evenly over a " + std::to_string(grid.mprocs) + "x" +
                            std::to_string(grid.nprocs) +
                            " grid; choose M divisible by the grid rows and N by the grid columns");
    const Index m = M / grid.mprocs;
    const Index n = N / grid.nprocs;
    std::vector<SubdomainGeometry> out;
    out.reserve(static_cast<std::size_t>(grid.ranks()));
    for (int r = 0; r < grid.ranks(); ++r) {
        const RankId id{r};
        SubdomainGeometry g;
        g.rank = id;
        g.row0 = grid.iproc(id) * m;
        g.col0 = grid.kproc(id) * n;
        g.m = m;
        g.n = n;
        g.up = grid.up(id);
        g.down = grid.down(id);
        g.left = grid.left(id);
        g.right = grid.right(id);
        out.push_back(g);
    }
    return out;
}

InitSpec InitSpec::preset(std::string_view name) {
    if (name == "hot-boundary" || name == "default")
        return {1.0, 0.0};
    if (name == "uniform")
        return {1.0, 1.0};
    throw ArgumentError("unknown init preset '" + std::string(name) + "'");
}

Subdomain make_subdomain(Rank& rank, const SubdomainGeometry& geo) {
    Subdomain s;
    s.geo = geo;
    const auto cells = static_cast<std::size_t>((geo.m + 2) * (geo.n + 2));
    s.field[0] = rank.allocate<double>(cells);
    s.field[1] = rank.allocate<double>(cells);
    s.scratch_left = rank.allocate<double>(static_cast<std::size_t>(geo.m));
    s.scratch_right = rank.allocate<double>(static_cast<std::size_t>(geo.m));
    s.recv_left.assign(static_cast<std::size_t>(geo.m), 0.0);
    s.recv_right.assign(static_cast<std::size_t>(geo.m), 0.0);

    const auto P = static_cast<std::size_t>(rank.rank_n());
    for (auto* dir : {&s.field_dir[0], &s.field_dir[1], &s.scratch_left_dir, &s.scratch_right_dir})
        dir->resize(P);
    for (int r = 0; r < rank.rank_n(); ++r) {
        const auto i = static_cast<std::size_t>(r);
        s.field_dir[0][i] = rank.broadcast(s.field[0], RankId{r});
        s.field_dir[1][i] = rank.broadcast(s.field[1], RankId{r});
        s.scratch_left_dir[i] = rank.broadcast(s.scratch_left, RankId{r});
        s.scratch_right_dir[i] = rank.broadcast(s.scratch_right, RankId{r});
    }
    return s;
}

FieldMap field_view(Rank& rank, const Subdomain& sub, int buffer) {
    auto v = rank.local_view(sub.field[buffer]);
    return FieldMap(v.data(), sub.geo.m + 2, sub.geo.n + 2);
}

void init_field(Rank& rank, Subdomain& sub, const InitSpec& init) {
    const auto& g = sub.geo;
    for (int b = 0; b < 2; ++b) {
        FieldMap f = field_view(rank, sub, b);
        f.setZero();
        f.block(1, 1, g.m, g.n).setConstant(init.interior);
        if (!g.up)
            f.row(0).setConstant(init.boundary);
        if (!g.down)
            f.row(g.m + 1).setConstant(init.boundary);
        if (!g.left)
            f.col(0).setConstant(init.boundary);
        if (!g.right)
            f.col(g.n + 1).setConstant(init.boundary);
    }
    sub.current = 0;
}

void halo_exchange(Rank& rank, Subdomain& sub) {
    const auto& g = sub.geo;
    const int cur = sub.current;
    FieldMap f = field_view(rank, sub, cur);
    const auto m = static_cast<std::size_t>(g.m);
    const auto n = static_cast<std::size_t>(g.n);
    const auto stride = static_cast<std::size_t>(sub.stride());

    if (g.left) {
        auto s = rank.local_view(sub.scratch_left);
        for (std::size_t i = 0; i < m; ++i)
            s[i] = f(static_cast<Index>(i) + 1, 1);
    }
    if (g.right) {
        auto s = rank.local_view(sub.scratch_right);
        for (std::size_t i = 0; i < m; ++i)
            s[i] = f(static_cast<Index>(i) + 1, g.n);
    }
    // packed scratch and the previous step's interior must be complete everywhere
    rank.barrier();

    auto mine = rank.local_view(sub.field[cur]);
    std::vector<pgas::Future> requests;
    if (g.up) {
        // neighbor's last interior row -> our halo row 0
        auto src = sub.field_dir[cur][static_cast<std::size_t>(g.up->value)].slice(m * stride + 1, n);
        requests.push_back(rank.rget(src, mine.subspan(1, n)));
    }
    if (g.down) {
        auto src = sub.field_dir[cur][static_cast<std::size_t>(g.down->value)].slice(stride + 1, n);
        requests.push_back(rank.rget(src, mine.subspan((m + 1) * stride + 1, n)));
    }
    if (g.left) {
        auto src = sub.scratch_right_dir[static_cast<std::size_t>(g.left->value)];
        requests.push_back(rank.rget(src, std::span<double>(sub.recv_left)));
    }
    if (g.right) {
        auto src = sub.scratch_left_dir[static_cast<std::size_t>(g.right->value)];
        requests.push_back(rank.rget(src, std::span<double>(sub.recv_right)));
    }
    for (const auto& r : requests)
        r.wait();
    rank.barrier();

    if (g.left)
        for (std::size_t i = 0; i < m; ++i)
            f(static_cast<Index>(i) + 1, 0) = sub.recv_left[i];
    if (g.right)
        for (std::size_t i = 0; i < m; ++i)
            f(static_cast<Index>(i) + 1, g.n + 1) = sub.recv_right[i];
}

void ftcs_step(const Eigen::Ref<const Field>& cur, Eigen::Ref<Field> next, double r) {
    const Index rows = cur.rows() - 2;
    const Index cols = cur.cols() - 2;
    for (Index i = 1; i <= rows; ++i)
        for (Index j = 1; j <= cols; ++j) {
            const double c = cur(i, j);
            next(i, j) = c + r * (cur(i - 1, j) + cur(i + 1, j) + cur(i, j - 1) + cur(i, j + 1) - 4.0 * c);
        }
}

void step(Rank& rank, Subdomain& sub, double r) {
    FieldMap cur = field_view(rank, sub, sub.current);
    FieldMap next = field_view(rank, sub, 1 - sub.current);
    ftcs_step(cur, next, r);
    sub.current = 1 - sub.current;
}

void check_stability(double r) {
    if (!(r > 0.0 && r <= 0.25))
        throw ArgumentError("stability factor r must lie in (0, 0.25], got " + std::to_string(r));
}

pgas::PairVolume halo_volume_model(const std::vector<SubdomainGeometry>& geos, int ranks) {
    pgas::PairVolume v(ranks);
    for (const auto& g : geos) {
        const auto row_bytes = static_cast<std::uint64_t>(g.n) * 8;
        const auto col_bytes = static_cast<std::uint64_t>(g.m) * 8;
        if (g.up)
            v.at(*g.up, g.rank) += row_bytes;
        if (g.down)
            v.at(*g.down, g.rank) += row_bytes;
        if (g.left)
            v.at(*g.left, g.rank) += col_bytes;
        if (g.right)
            v.at(*g.right, g.rank) += col_bytes;
    }
    return v;
}

namespace {

struct RankResult {
    Field interior;
    pgas::CommStats measured;
    double seconds = 0.0;
};

} // namespace

HeatRunReport run_heat(Index M, Index N, int steps, const ProcessGrid& grid, double r,
                       const InitSpec& init, const HeatOptions& options) {
    if (steps < 1)
        throw ArgumentError("run_heat needs steps >= 1");
    check_stability(r);
    const auto geos = decompose(M, N, grid);

    pgas::WorldConfig cfg;
    cfg.ranks = grid.ranks();
    cfg.completion = options.completion;
    cfg.seed = options.completion_seed;
    cfg.check_overlap = options.check_overlap;
    pgas::World world(cfg);

    auto results = world.run([&](Rank& rank) {
        Subdomain sub = make_subdomain(rank, geos[static_cast<std::size_t>(rank.rank_me())]);
        init_field(rank, sub, init);

        rank.barrier();
        const pgas::CommStats before = rank.comm_stats();
        rank.barrier();
        const auto t0 = std::chrono::steady_clock::now();
        for (int s = 0; s < steps; ++s) {
            halo_exchange(rank, sub);
            step(rank, sub, r);
        }
        rank.barrier();
        const auto t1 = std::chrono::steady_clock::now();

        RankResult out;
        out.measured = rank.comm_stats() - before;
        out.seconds = std::chrono::duration<double>(t1 - t0).count();
        out.interior = field_view(rank, sub, sub.current).block(1, 1, sub.geo.m, sub.geo.n);
        return out;
    });

    HeatRunReport rep;
    rep.steps = steps;
    rep.grid = grid;
    rep.M = M;
    rep.N = N;
    rep.total_seconds = results[0].seconds;
    rep.avg_seconds_per_step = rep.total_seconds / steps;
    rep.measured = results[0].measured;
    rep.predicted = halo_volume_model(geos, grid.ranks());
    rep.predicted *= static_cast<std::uint64_t>(steps);
    rep.volume_match = pgas::volumes_match(rep.measured, rep.predicted);

    rep.field.resize(M, N);
    for (const auto& g : geos)
        rep.field.block(g.row0, g.col0, g.m, g.n) = results[static_cast<std::size_t>(g.rank.value)].interior;
    double sum = 0.0;
    for (Index i = 0; i < M; ++i)
        for (Index j = 0; j < N; ++j)
            sum += rep.field(i, j);
    rep.checksum = sum;
    return rep;
}

} // namespace minipgas::heat
