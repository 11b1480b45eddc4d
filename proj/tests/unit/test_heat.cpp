#include <doctest.h>

#include <cmath>
#include <random>

#include "minipgas/heat/heat.hpp"

using namespace minipgas;
using namespace minipgas::heat;

namespace {

Field random_field(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-3.0, 5.0);
    Field f(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            f(i, j) = d(rng);
    return f;
}

/// Interior of an (m+2)x(n+2) buffer after init, as seen by each rank.
std::vector<Field> initial_interiors(Index M, Index N, const ProcessGrid& grid, const InitSpec& init) {
    const auto geos = decompose(M, N, grid);
    pgas::WorldConfig c;
    c.ranks = grid.ranks();
    pgas::World w(c);
    return w.run([&](Rank& r) {
        Subdomain sub = make_subdomain(r, geos[static_cast<std::size_t>(r.rank_me())]);
        init_field(r, sub, init);
        return Field(field_view(r, sub, sub.current));
    });
}

} // namespace

TEST_CASE("process grid neighbours") {
    const ProcessGrid g{2, 3};
    CHECK(g.ranks() == 6);
    CHECK(g.iproc(RankId{4}) == 1);
    CHECK(g.kproc(RankId{4}) == 1);
    CHECK(g.up(RankId{4}) == RankId{1});
    CHECK_FALSE(g.down(RankId{4}).has_value());
    CHECK(g.left(RankId{4}) == RankId{3});
    CHECK(g.right(RankId{4}) == RankId{5});
    CHECK_FALSE(g.left(RankId{3}).has_value());
    CHECK_FALSE(g.right(RankId{2}).has_value());

    const auto p = parse_grid("4x2");
    CHECK(p.mprocs == 4);
    CHECK(p.nprocs == 2);
    CHECK_THROWS_AS((void)parse_grid("4by2"), ArgumentError);
    CHECK_THROWS_AS((void)parse_grid("0x2"), ArgumentError);
}

TEST_CASE("decompose examples") {
    const auto four = decompose(8, 8, {2, 2});
    REQUIRE(four.size() == 4);
    for (const auto& g : four) {
        CHECK(g.m == 4);
        CHECK(g.n == 4);
    }
    CHECK(four[3].row0 == 4);
    CHECK(four[3].col0 == 4);
    CHECK(four[1].row0 == 0);
    CHECK(four[1].col0 == 4);

    const auto big = decompose(20000, 20000, {4, 4});
    CHECK(big.size() == 16);
    for (const auto& g : big) {
        CHECK(g.m == 5000);
        CHECK(g.n == 5000);
    }

    CHECK_THROWS_AS((void)decompose(10, 12, {3, 1}), ArgumentError);
    CHECK_THROWS_AS((void)decompose(12, 10, {1, 3}), ArgumentError);
}

TEST_CASE("decomposition tiles the domain exactly once") {
    for (auto grid : {ProcessGrid{1, 1}, ProcessGrid{2, 3}, ProcessGrid{4, 1}, ProcessGrid{3, 4}}) {
        const Index M = 24, N = 36;
        Eigen::ArrayXXi cover = Eigen::ArrayXXi::Zero(M, N);
        for (const auto& g : decompose(M, N, grid))
            cover.block(g.row0, g.col0, g.m, g.n) += 1;
        CHECK((cover == 1).all());
    }
}

TEST_CASE("init presets") {
    CHECK(InitSpec::preset("hot-boundary").boundary == 1.0);
    CHECK(InitSpec::preset("hot-boundary").interior == 0.0);
    CHECK(InitSpec::preset("default").interior == 0.0);
    CHECK(InitSpec::preset("uniform").interior == 1.0);
    CHECK_THROWS_AS((void)InitSpec::preset("lukewarm"), ArgumentError);

    const auto f = initial_interiors(6, 6, {1, 1}, {5.0, 5.0});
    CHECK((f[0] == 5.0).all());

    const auto hot = initial_interiors(6, 6, {1, 1}, {});
    CHECK((hot[0].block(1, 1, 6, 6) == 0.0).all());
    CHECK((hot[0].row(0).segment(1, 6) == 1.0).all());
    CHECK((hot[0].col(7).segment(1, 6) == 1.0).all());
}

TEST_CASE("init is decomposition independent") {
    const InitSpec init{2.5, -1.0};
    const auto whole = initial_interiors(8, 12, {1, 1}, init)[0];
    const auto geos = decompose(8, 12, {2, 2});
    const auto parts = initial_interiors(8, 12, {2, 2}, init);
    for (std::size_t r = 0; r < 4; ++r) {
        const auto& g = geos[r];
        CHECK((parts[r].block(1, 1, g.m, g.n) == whole.block(1 + g.row0, 1 + g.col0, g.m, g.n)).all());
        // inter-rank halos start at zero
        if (g.right)
            CHECK((parts[r].col(g.n + 1).segment(1, g.m) == 0.0).all());
        else
            CHECK((parts[r].col(g.n + 1).segment(1, g.m) == 2.5).all());
    }
}

TEST_CASE("ftcs fixed point on a constant field") {
    for (double r : {0.05, 0.1, 0.2, 0.25}) {
        for (double c : {0.0, 1.0, -3.75, 1e-7, 123456.789}) {
            Field cur = Field::Constant(10, 12, c);
            Field next = Field::Constant(10, 12, std::nan(""));
            ftcs_step(cur, next, r);
            CHECK((next.block(1, 1, 8, 10) == c).all());
        }
    }
}

TEST_CASE("single hot cell") {
    Field cur = Field::Zero(7, 7);
    cur(3, 3) = 1.0;
    Field next = Field::Zero(7, 7);
    ftcs_step(cur, next, 0.25);
    CHECK(next(3, 3) == 0.0);
    CHECK(next(2, 3) == 0.25);
    CHECK(next(4, 3) == 0.25);
    CHECK(next(3, 2) == 0.25);
    CHECK(next(3, 4) == 0.25);
    CHECK(next.sum() == 1.0);
}

TEST_CASE("max principle on random fields") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        for (double r : {0.1, 0.25}) {
            Field cur = random_field(18, 14, seed);
            Field next = cur;
            for (int s = 0; s < 5; ++s) {
                ftcs_step(cur, next, r);
                const double lo = cur.minCoeff();
                const double hi = cur.maxCoeff();
                const auto inner = next.block(1, 1, 16, 12);
                CHECK(inner.minCoeff() >= lo);
                CHECK(inner.maxCoeff() <= hi);
                std::swap(cur, next);
            }
        }
    }
}

TEST_CASE("stability bound on r") {
    CHECK_NOTHROW(check_stability(0.25));
    CHECK_NOTHROW(check_stability(1e-6));
    CHECK_THROWS_AS(check_stability(0.2500001), ArgumentError);
    CHECK_THROWS_AS(check_stability(0.0), ArgumentError);
    CHECK_THROWS_AS(check_stability(-0.1), ArgumentError);
    CHECK_THROWS_AS((void)run_heat(8, 8, 1, {1, 1}, 0.3, {}), ArgumentError);
}

TEST_CASE("halo exchange delivers neighbour boundary cells") {
    const Index M = 6, N = 8;
    const ProcessGrid grid{2, 2};
    const auto geos = decompose(M, N, grid);
    pgas::WorldConfig c;
    c.ranks = 4;
    c.completion = pgas::CompletionPolicy::randomized;
    c.seed = 3;
    pgas::World w(c);
    w.run([&](Rank& r) {
        const auto& g = geos[static_cast<std::size_t>(r.rank_me())];
        Subdomain sub = make_subdomain(r, g);
        init_field(r, sub, {});
        auto f = field_view(r, sub, sub.current);
        // interior value encodes the global cell
        for (Index i = 1; i <= g.m; ++i)
            for (Index j = 1; j <= g.n; ++j)
                f(i, j) = static_cast<double>((g.row0 + i - 1) * 100 + (g.col0 + j - 1));
        r.barrier();
        halo_exchange(r, sub);
        auto h = field_view(r, sub, sub.current);
        auto global = [](Index gi, Index gj) { return static_cast<double>(gi * 100 + gj); };
        for (Index j = 1; j <= g.n; ++j) {
            if (g.up)
                CHECK(h(0, j) == global(g.row0 - 1, g.col0 + j - 1));
            else
                CHECK(h(0, j) == 1.0);
            if (g.down)
                CHECK(h(g.m + 1, j) == global(g.row0 + g.m, g.col0 + j - 1));
        }
        for (Index i = 1; i <= g.m; ++i) {
            if (g.left)
                CHECK(h(i, 0) == global(g.row0 + i - 1, g.col0 - 1));
            if (g.right)
                CHECK(h(i, g.n + 1) == global(g.row0 + i - 1, g.col0 + g.n));
            else
                CHECK(h(i, g.n + 1) == 1.0);
        }
    });
}

TEST_CASE("halo volumes of the small grids") {
    const auto row_split = decompose(4, 8, {1, 2});
    const auto v = halo_volume_model(row_split, 2);
    CHECK(v.at(RankId{0}, RankId{1}) == 32);
    CHECK(v.at(RankId{1}, RankId{0}) == 32);

    const auto col_split = decompose(8, 6, {2, 1});
    const auto u = halo_volume_model(col_split, 2);
    CHECK(u.at(RankId{0}, RankId{1}) == 48);
    CHECK(u.at(RankId{1}, RankId{0}) == 48);

    const auto one = run_heat(8, 8, 3, {1, 1}, 0.25, {});
    CHECK(one.measured.total().bytes == 0);
    CHECK(one.volume_match);

    const auto a = run_heat(4, 8, 1, {1, 2}, 0.25, {});
    CHECK(a.measured.pair(RankId{0}, RankId{1}).bytes == 32);
    CHECK(a.measured.pair(RankId{1}, RankId{0}).bytes == 32);
    const auto b = run_heat(8, 6, 1, {2, 1}, 0.25, {});
    CHECK(b.measured.pair(RankId{0}, RankId{1}).bytes == 48);
}

TEST_CASE("run_heat is decomposition independent") {
    const InitSpec init{1.0, 0.0};
    const auto ref = run_heat(24, 24, 30, {1, 1}, 0.25, init);
    for (auto grid : {ProcessGrid{2, 2}, ProcessGrid{3, 2}, ProcessGrid{1, 4}, ProcessGrid{4, 1}, ProcessGrid{2, 3}}) {
        HeatOptions opt;
        opt.completion = pgas::CompletionPolicy::randomized;
        opt.completion_seed = 17;
        const auto rep = run_heat(24, 24, 30, grid, 0.25, init, opt);
        CHECK((rep.field == ref.field).all());
        CHECK(rep.checksum == ref.checksum);
        CHECK(rep.volume_match);
    }
}

TEST_CASE("uniform field keeps a constant checksum") {
    const auto a = run_heat(16, 16, 1, {2, 2}, 0.2, {3.0, 3.0});
    const auto b = run_heat(16, 16, 40, {2, 2}, 0.2, {3.0, 3.0});
    CHECK(a.checksum == 3.0 * 256);
    CHECK(b.checksum == a.checksum);
}

TEST_CASE("per-step bytes follow the internal edge count") {
    // sum over internal edges of 2 * length * 8
    const auto rep = run_heat(64, 64, 10, {2, 2}, 0.25, {});
    CHECK(rep.measured.total().bytes == 10u * 2048);
    CHECK(rep.volume_match);

    const auto strip = run_heat(64, 64, 7, {1, 8}, 0.25, {});
    CHECK(strip.measured.total().bytes == 7u * 7 * 2 * 64 * 8);
    CHECK(strip.volume_match);
}

TEST_CASE("average step time times steps is the loop time") {
    const auto rep = run_heat(32, 32, 20, {2, 2}, 0.25, {});
    CHECK(rep.steps == 20);
    CHECK(rep.avg_seconds_per_step * 20 == doctest::Approx(rep.total_seconds).epsilon(1e-12));
    CHECK(rep.total_seconds > 0.0);
}

TEST_CASE("no write conflicts under overlap checking") {
    HeatOptions opt;
    opt.check_overlap = true;
    CHECK_NOTHROW((void)run_heat(16, 16, 5, {2, 2}, 0.25, {}, opt));
}
