#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <numeric>
#include <random>
#include <thread>

#include "minipgas/pgas/world.hpp"

using namespace minipgas;
using namespace minipgas::pgas;

namespace {

WorldConfig config(int P, CompletionPolicy policy = CompletionPolicy::eager, std::uint64_t seed = 0) {
    WorldConfig c;
    c.ranks = P;
    c.completion = policy;
    c.seed = seed;
    return c;
}

GlobalRef<double> peer_of(Rank& r, const GlobalRef<double>& mine) {
    GlobalRef<double> peer;
    for (int p = 0; p < r.rank_n(); ++p) {
        auto ref = r.broadcast(mine, RankId{p});
        if (p == 1 - r.rank_me())
            peer = ref;
    }
    return peer;
}

} // namespace

TEST_CASE("spawn_world returns results in rank order") {
    CHECK(spawn_world(1, [](Rank& r) { return r.rank_me(); }) == std::vector<int>{0});
    CHECK(spawn_world(4, [](Rank& r) { return r.rank_me(); }) == std::vector<int>{0, 1, 2, 3});
    CHECK_THROWS_AS(spawn_world(0, [](Rank&) {}), ArgumentError);
}

TEST_CASE("a failing rank surfaces as a world error naming it") {
    try {
        spawn_world(4, [](Rank& r) {
            if (r.rank_me() == 2)
                throw std::runtime_error("boom");
            r.barrier();
        });
        FAIL("expected WorldError");
    } catch (const WorldError& e) {
        CHECK(e.rank() == 2);
        CHECK(std::string(e.what()).find("boom") != std::string::npos);
    }
}

TEST_CASE("allocate_shared zero-initializes and never aliases") {
    World w(config(4));
    w.run([](Rank& r) {
        auto a = r.allocate<double>(10);
        CHECK(a.owner == r.id());
        CHECK(a.span == 10);
        for (double v : r.local_view(a))
            CHECK(v == 0.0);

        auto empty = r.allocate<std::int32_t>(0);
        CHECK(empty.empty());
        CHECK(r.local_view(empty).empty());

        auto b = r.allocate<double>(10);
        CHECK(a.segment != b.segment);
        std::ranges::fill(r.local_view(a), 7.0);
        for (double v : r.local_view(b))
            CHECK(v == 0.0);
    });
}

TEST_CASE("allocation beyond the segment budget is a resource error") {
    WorldConfig c = config(1);
    c.segment_budget_bytes = 800;
    World w(c);
    w.run([](Rank& r) {
        (void)r.allocate<double>(100);
        CHECK_THROWS_AS((void)r.allocate<double>(1), ResourceError);
        CHECK_NOTHROW((void)r.allocate<double>(0));
    });
}

TEST_CASE("broadcast delivers root's value and accounts P-1 messages") {
    World w(config(4));
    auto got = w.run([](Rank& r) { return r.broadcast(r.rank_me() == 0 ? 42 : -1, RankId{0}); });
    CHECK(got == std::vector<int>{42, 42, 42, 42});
    const CommStats s = w.comm_stats();
    CHECK(s.total().messages == 3);
    CHECK(s.pair(RankId{0}, RankId{3}) == Counters{1, sizeof(int)});

    World one(config(1));
    CHECK(one.run([](Rank& r) { return r.broadcast(5, RankId{0}); }) == std::vector<int>{5});
    CHECK(one.comm_stats().total().messages == 0);
}

TEST_CASE("broadcast of a per-source table is identical everywhere") {
    World w(config(8));
    auto tables = w.run([](Rank& r) {
        std::vector<std::vector<long>> table;
        for (int src = 0; src < r.rank_n(); ++src) {
            std::vector<long> row;
            if (src == r.rank_me())
                for (int d = 0; d < r.rank_n(); ++d)
                    row.push_back(src * 100 + d);
            table.push_back(r.broadcast(row, RankId{src}));
        }
        return table;
    });
    for (const auto& t : tables)
        CHECK(t == tables.front());
    CHECK(tables.front()[3][5] == 305);
}

TEST_CASE("broadcast with mismatched roots is a collective error") {
    WorldConfig c = config(3);
    World w(c);
    CHECK_THROWS_AS(w.run([](Rank& r) { (void)r.broadcast(1, RankId{r.rank_me() == 1 ? 1 : 0}); }), WorldError);
}

TEST_CASE("rput is visible after wait and barrier, with exact accounting") {
    World w(config(2));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(8);
        auto dir0 = r.broadcast(seg, RankId{0});
        if (r.rank_me() == 1) {
            const double src[] = {1.5, 2.5};
            r.rput(std::span<const double>(src), dir0.slice(4, 2)).wait();
        }
        r.barrier();
        if (r.rank_me() == 0) {
            auto v = r.local_view(seg);
            CHECK(v[4] == 1.5);
            CHECK(v[5] == 2.5);
            CHECK(v[3] == 0.0);
        }
    });
    const CommStats s = w.comm_stats();
    CHECK(s.pair(RankId{1}, RankId{0}).messages == 1);
    CHECK(s.pair(RankId{1}, RankId{0}).bytes == 16);
}

TEST_CASE("rput payload and zero-span transfers") {
    World w(config(2, CompletionPolicy::deferred));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(6);
        auto dir1 = r.broadcast(seg, RankId{1});
        r.barrier();
        const CommStats before = r.comm_stats();
        r.barrier();
        if (r.rank_me() == 0) {
            std::vector<double> six(6, 1.0);
            Future f = r.rput(std::span<const double>(six), dir1);
            f.wait();
            Future z = r.rput(std::span<const double>(), dir1.slice(0, 0));
            CHECK(z.ready());
        }
        r.barrier();
        const CommStats d = r.comm_stats() - before;
        CHECK(d.pair(RankId{0}, RankId{1}) == Counters{1, 48});
        CHECK(d.total() == Counters{1, 48});
    });
}

TEST_CASE("rget reads remote values and attributes bytes to owner->caller") {
    World w(config(3, CompletionPolicy::deferred));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(100);
        auto view = r.local_view(seg);
        std::iota(view.begin(), view.end(), 100.0 * r.rank_me());
        auto dir2 = r.broadcast(seg, RankId{2});
        r.barrier();
        const CommStats before = r.comm_stats();
        r.barrier();
        if (r.rank_me() == 0) {
            std::vector<double> buf(3);
            r.rget(dir2.slice(10, 3), std::span<double>(buf)).wait();
            CHECK(buf == std::vector<double>{210, 211, 212});
            std::vector<double> all(100);
            r.rget(dir2, std::span<double>(all)).wait();
            CHECK(all[99] == 299.0);
        }
        r.barrier();
        const CommStats d = r.comm_stats() - before;
        CHECK(d.pair(RankId{2}, RankId{0}) == Counters{2, 24 + 800});
    });
}

TEST_CASE("self transfers cost no network bytes but count as local copies") {
    World w(config(2));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(4);
        auto v = r.local_view(seg);
        v[0] = 3.0;
        std::vector<double> out(4);
        r.rget(seg, std::span<double>(out)).wait();
        CHECK(out[0] == 3.0);
    });
    const CommStats s = w.comm_stats();
    CHECK(s.total().bytes == 0);
    CHECK(s.local_copies(RankId{0}) == Counters{1, 32});
    CHECK(s.local_copies(RankId{1}) == Counters{1, 32});
}

TEST_CASE("transfer argument errors") {
    World w(config(1));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(4);
        std::vector<double> three(3);
        CHECK_THROWS_AS((void)r.rput(std::span<const double>(three), seg), ArgumentError);
        CHECK_THROWS_AS((void)r.rget(seg, std::span<double>(three)), ArgumentError);
        CHECK_THROWS_AS((void)seg.slice(2, 3), ArgumentError);

        // a reference forged with the wrong element type
        GlobalRef<std::int32_t> forged{seg.owner, seg.segment, 0, 4};
        std::vector<std::int32_t> ints(4);
        CHECK_THROWS_AS((void)r.rput(std::span<const std::int32_t>(ints), forged), TypeError);
        CHECK_THROWS_AS((void)r.local_view(forged), TypeError);

        GlobalRef<double> past_end{seg.owner, seg.segment, 3, 2};
        CHECK_THROWS_AS((void)r.local_view(past_end), ArgumentError);
    });
}

TEST_CASE("local_view rejects non-owners") {
    World w(config(2));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(10);
        auto dir0 = r.broadcast(seg, RankId{0});
        if (r.rank_me() == 1)
            CHECK_THROWS_AS((void)r.local_view(dir0), OwnershipError);
        else
            CHECK(r.local_view(dir0).size() == 10);
    });
}

TEST_CASE("writes through local_view are what remote rgets observe") {
    World w(config(2));
    w.run([](Rank& r) {
        auto y = r.allocate<double>(5);
        auto dir0 = r.broadcast(y, RankId{0});
        if (r.rank_me() == 0) {
            auto v = r.local_view(y);
            for (std::size_t i = 0; i < v.size(); ++i)
                v[i] = 0.5 * static_cast<double>(i);
        }
        r.barrier();
        if (r.rank_me() == 1) {
            std::vector<double> got(5);
            r.rget(dir0, std::span<double>(got)).wait();
            CHECK(got == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
        }
    });
}

TEST_CASE("when_all readiness") {
    CHECK(when_all(std::span<const Future>{}).ready());
    CHECK(make_ready_future().ready());

    World w(config(2, CompletionPolicy::deferred));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(1);
        auto peer = peer_of(r, seg);
        const double one = 1.0;
        Future pending = r.rput(std::span<const double>(&one, 1), peer);
        CHECK_FALSE(pending.ready());
        Future both = when_all(pending, make_ready_future());
        CHECK_FALSE(both.ready());
        pending.wait();
        CHECK(both.ready());
        both.wait();
        both.wait(); // idempotent
        r.barrier();
    });
}

TEST_CASE("chained conjoining of rput futures completes exactly when all transfers do") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        World w(config(2, CompletionPolicy::randomized, seed));
        w.run([](Rank& r) {
            auto seg = r.allocate<double>(7);
            auto peer = peer_of(r, seg);
            std::vector<Future> parts;
            Future chain = make_ready_future();
            for (int i = 0; i < 7; ++i) {
                const double v = i + 1.0;
                parts.push_back(r.rput(std::span<const double>(&v, 1), peer.slice(static_cast<std::size_t>(i), 1)));
                chain = when_all(chain, parts.back());
            }
            while (!chain.ready()) {
                CHECK_FALSE(std::all_of(parts.begin(), parts.end(), [](const Future& f) { return f.ready(); }));
                REQUIRE(r.progress());
            }
            CHECK(std::all_of(parts.begin(), parts.end(), [](const Future& f) { return f.ready(); }));
            r.barrier();
            auto v = r.local_view(seg);
            for (int i = 0; i < 7; ++i)
                CHECK(v[static_cast<std::size_t>(i)] == i + 1.0);
        });
    }
}

TEST_CASE("barrier orders writes before reads") {
    World w(config(2, CompletionPolicy::deferred));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(3);
        auto dir1 = r.broadcast(seg, RankId{1});
        if (r.rank_me() == 0) {
            const double v[] = {9.0, 8.0, 7.0};
            r.rput(std::span<const double>(v), dir1).wait();
        }
        r.barrier();
        if (r.rank_me() == 1) {
            auto view = r.local_view(seg);
            CHECK(view[0] == 9.0);
            CHECK(view[2] == 7.0);
        }
    });
    CHECK(spawn_world(1, [](Rank& r) {
              r.barrier();
              return r.epoch();
          }) == std::vector<std::uint64_t>{1});
}

TEST_CASE("mismatched barrier counts fail instead of hanging") {
    WorldConfig c = config(2);
    c.barrier_timeout = std::chrono::milliseconds(200);
    World w(c);
    CHECK_THROWS_AS(w.run([](Rank& r) {
                        r.barrier();
                        if (r.rank_me() == 0)
                            r.barrier();
                    }),
                    WorldError);
}

TEST_CASE("barrier timeout is a collective error") {
    WorldConfig c = config(2);
    c.barrier_timeout = std::chrono::milliseconds(50);
    World w(c);
    try {
        w.run([](Rank& r) {
            if (r.rank_me() == 1)
                std::this_thread::sleep_for(std::chrono::milliseconds(300));
            r.barrier();
        });
        FAIL("expected timeout");
    } catch (const WorldError& e) {
        CHECK(e.rank() == 0);
        CHECK(std::string(e.what()).find("timed out") != std::string::npos);
    }
}

TEST_CASE("overlap journal rejects conflicting writes within a phase") {
    WorldConfig c = config(3);
    c.check_overlap = true;
    World w(c);
    CHECK_THROWS_AS(w.run([](Rank& r) {
                        auto seg = r.allocate<double>(8);
                        auto dir0 = r.broadcast(seg, RankId{0});
                        std::vector<double> four(4, 1.0);
                        if (r.rank_me() == 1)
                            r.rput(std::span<const double>(four), dir0.slice(0, 4)).wait();
                        r.barrier();
                        if (r.rank_me() == 2)
                            r.rput(std::span<const double>(four), dir0.slice(2, 4)).wait();
                        r.barrier();
                        // same bytes, different phases: fine. Now a conflict:
                        if (r.rank_me() != 0)
                            r.rput(std::span<const double>(four), dir0.slice(r.rank_me() == 1 ? 0 : 3, 4)).wait();
                        r.barrier();
                    }),
                    WorldError);

    World ok(c);
    CHECK_NOTHROW(ok.run([](Rank& r) {
        auto seg = r.allocate<double>(8);
        auto dir0 = r.broadcast(seg, RankId{0});
        std::vector<double> four(4, 1.0);
        if (r.rank_me() != 0)
            r.rput(std::span<const double>(four), dir0.slice(r.rank_me() == 1 ? 0 : 4, 4)).wait();
        r.barrier();
    }));
}

TEST_CASE("future state observations are monotone") {
    World w(config(2, CompletionPolicy::randomized, 11));
    w.run([](Rank& r) {
        auto seg = r.allocate<double>(16);
        auto peer = peer_of(r, seg);
        std::vector<double> data(16, 2.0);
        std::vector<Future> fs;
        for (std::size_t i = 0; i < 16; ++i)
            fs.push_back(r.rput(std::span<const double>(data).subspan(i, 1), peer.slice(i, 1)));
        std::vector<bool> seen_ready(fs.size(), false);
        while (r.progress()) {
            for (std::size_t i = 0; i < fs.size(); ++i) {
                const bool now = fs[i].ready();
                CHECK((now || !seen_ready[i]));
                seen_ready[i] = seen_ready[i] || now;
            }
        }
        for (const auto& f : fs)
            CHECK(f.ready());
        r.barrier();
    });
}

TEST_CASE("accounting is deterministic across executions") {
    auto program = [](Rank& r) {
        auto seg = r.allocate<double>(32);
        std::vector<GlobalRef<double>> dir;
        for (int p = 0; p < r.rank_n(); ++p)
            dir.push_back(r.broadcast(seg, RankId{p}));
        std::vector<double> buf(8);
        Future all = make_ready_future();
        for (int p = 0; p < r.rank_n(); ++p)
            all = when_all(all, r.rget(dir[static_cast<std::size_t>(p)].slice(static_cast<std::size_t>(r.rank_me()) * 2, 2),
                                       std::span<double>(buf).subspan(0, 2)));
        all.wait();
        r.barrier();
    };
    World a(config(4, CompletionPolicy::randomized, 1));
    World b(config(4, CompletionPolicy::randomized, 2));
    a.run(program);
    b.run(program);
    CHECK(a.comm_stats() == b.comm_stats());
    CHECK(World(config(4)).comm_stats().total() == Counters{});
}
