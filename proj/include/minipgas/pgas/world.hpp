#ifndef MINIPGAS_PGAS_WORLD_HPP
#define MINIPGAS_PGAS_WORLD_HPP

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <type_traits>
#include <vector>

#include "minipgas/pgas/comm_stats.hpp"
#include "minipgas/pgas/future.hpp"
#include "minipgas/pgas/types.hpp"

namespace minipgas::pgas {

struct WorldConfig {
    int ranks = 1;
    /// Per-rank shared segment budget.
    std::size_t segment_budget_bytes = std::size_t{1} << 30;
    std::chrono::milliseconds barrier_timeout{30'000};
    CompletionPolicy completion = CompletionPolicy::eager;
    std::uint64_t seed = 0;
    /// Journal rput destinations per phase and reject overlaps.
    bool check_overlap = false;
};

class World;

/// Execution context of one SPMD rank. Handed to the program by World::run.
class Rank {
public:
    Rank(World& world, RankId id);

    Rank(const Rank&) = delete;
    Rank& operator=(const Rank&) = delete;

    RankId id() const { return id_; }
    int rank_me() const { return id_.value; }
    int rank_n() const;
    World& world() { return *world_; }

    /// Zero-initialized segment of `count` elements in this rank's partition.
    template <SegmentElement T>
    GlobalRef<T> allocate(std::size_t count);

    /// Direct access to memory owned by this rank; no accounting.
    template <SegmentElement T>
    std::span<T> local_view(const GlobalRef<T>& ref);

    /// One-sided put. The source is captured at initiation.
    template <SegmentElement T>
    Future rput(std::span<const T> src, const GlobalRef<T>& dst);

    /// One-sided get. `dst` must stay alive until the future is ready.
    template <SegmentElement T>
    Future rget(const GlobalRef<T>& src, std::span<T> dst);

    void barrier();

    /// Root's value on every rank; P-1 messages from root.
    template <typename T>
        requires std::is_trivially_copyable_v<T>
    T broadcast(const T& value, RankId root);

    template <typename T>
        requires std::is_trivially_copyable_v<T>
    std::vector<T> broadcast(const std::vector<T>& value, RankId root);

    /// Completes one pending operation of this rank, if any.
    bool progress() { return engine_.progress_one(); }
    std::size_t pending_operations() const { return engine_.pending(); }

    CommStats comm_stats() const;

    /// Number of barriers this rank has passed.
    std::uint64_t epoch() const { return epoch_; }

private:
    friend class World;

    std::vector<std::byte> broadcast_bytes(std::span<const std::byte> bytes, RankId root);

    World* world_;
    RankId id_;
    detail::ProgressEngine engine_;
    std::uint64_t epoch_ = 0;
};

/// SPMD container: P ranks sharing a partitioned segment registry and traffic counters.
class World {
public:
    explicit World(WorldConfig config);

    World(const World&) = delete;
    World& operator=(const World&) = delete;
    ~World();

    int size() const { return config_.ranks; }
    const WorldConfig& config() const { return config_; }

    CommStats comm_stats() const;

    /// Runs `program(Rank&)` concurrently on every rank and returns after all
    /// finish. Results come back in rank order. The first rank to fail is
    /// reported as a WorldError naming it.
    template <typename F>
    auto run(F&& program) {
        using R = std::invoke_result_t<F&, Rank&>;
        if constexpr (std::is_void_v<R>) {
            run_impl([&](Rank& r) { program(r); });
        } else {
            std::vector<std::optional<R>> slots(static_cast<std::size_t>(size()));
            run_impl([&](Rank& r) { slots[static_cast<std::size_t>(r.rank_me())].emplace(program(r)); });
            std::vector<R> out;
            out.reserve(slots.size());
            for (auto& s : slots)
                out.push_back(std::move(*s));
            return out;
        }
    }

private:
    friend class Rank;

    struct Segment {
        ElemKind kind;
        std::size_t count;
        std::unique_ptr<std::byte[]> data;
    };

    struct Partition {
        mutable std::mutex mu;
        std::vector<std::unique_ptr<Segment>> segments;
        std::size_t bytes_used = 0;
    };

    struct JournalEntry {
        RankId initiator;
        RankId owner;
        SegmentId segment;
        std::size_t begin;
        std::size_t end;
    };

    struct CollectiveSlot {
        int root = -1;
        std::vector<std::byte> data;
    };

    void run_impl(const std::function<void(Rank&)>& program);

    SegmentId allocate_segment(RankId owner, ElemKind kind, std::size_t count);
    std::byte* resolve(RankId owner, SegmentId seg, ElemKind kind, std::size_t offset,
                       std::size_t span);
    void account(RankId src, RankId dst, std::size_t bytes);
    void journal_write(RankId initiator, std::uint64_t epoch, RankId owner, SegmentId seg,
                       std::size_t offset, std::size_t span);
    void barrier_arrive(Rank& rank);
    void abort();

    WorldConfig config_;
    std::vector<std::unique_ptr<Partition>> partitions_;

    mutable std::mutex stats_mu_;
    CommStats stats_;

    std::mutex journal_mu_;
    std::map<std::uint64_t, std::vector<JournalEntry>> journal_;

    std::mutex barrier_mu_;
    std::condition_variable barrier_cv_;
    int arrived_ = 0;
    int exited_ = 0;
    std::uint64_t generation_ = 0;
    bool aborted_ = false;

    std::vector<CollectiveSlot> slots_;
};

/// Convenience: default-configured world of P ranks running `program` once.
template <typename F>
auto spawn_world(int ranks, F&& program) {
    WorldConfig cfg;
    cfg.ranks = ranks;
    World world(cfg);
    return world.run(std::forward<F>(program));
}

// ---------------------------------------------------------------------------

template <SegmentElement T>
GlobalRef<T> Rank::allocate(std::size_t count) {
    SegmentId seg = world_->allocate_segment(id_, kind_of<T>(), count);
    return GlobalRef<T>{id_, seg, 0, count};
}

template <SegmentElement T>
std::span<T> Rank::local_view(const GlobalRef<T>& ref) {
    if (ref.owner != id_)
        throw OwnershipError("rank " + std::to_string(id_.value) +
                             " requested a local view of memory owned by rank " +
                             std::to_string(ref.owner.value));
    std::byte* p = world_->resolve(ref.owner, ref.segment, kind_of<T>(), ref.offset, ref.span);
    return {reinterpret_cast<T*>(p), ref.span};
}

template <SegmentElement T>
Future Rank::rput(std::span<const T> src, const GlobalRef<T>& dst) {
    if (src.size() != dst.span)
        throw ArgumentError("rput: source length " + std::to_string(src.size()) +
                            " != destination span " + std::to_string(dst.span));
    std::byte* target = world_->resolve(dst.owner, dst.segment, kind_of<T>(), dst.offset, dst.span);
    if (dst.span == 0)
        return make_ready_future();
    if (world_->config_.check_overlap)
        world_->journal_write(id_, epoch_, dst.owner, dst.segment, dst.offset, dst.span);

    auto state = std::make_shared<detail::FutureState>();
    state->engine = &engine_;
    const std::size_t bytes = dst.size_bytes();
    World* w = world_;
    const RankId me = id_;
    const RankId owner = dst.owner;
    if (engine_.policy() == CompletionPolicy::eager) {
        engine_.enqueue(
            [=] {
                std::memcpy(target, src.data(), bytes);
                w->account(me, owner, bytes);
            },
            state);
    } else {
        std::vector<T> snapshot(src.begin(), src.end());
        engine_.enqueue(
            [=, snapshot = std::move(snapshot)] {
                std::memcpy(target, snapshot.data(), bytes);
                w->account(me, owner, bytes);
            },
            state);
    }
    return Future{state};
}

template <SegmentElement T>
Future Rank::rget(const GlobalRef<T>& src, std::span<T> dst) {
    if (dst.size() != src.span)
        throw ArgumentError("rget: destination length " + std::to_string(dst.size()) +
                            " != source span " + std::to_string(src.span));
    const std::byte* from = world_->resolve(src.owner, src.segment, kind_of<T>(), src.offset, src.span);
    if (src.span == 0)
        return make_ready_future();

    auto state = std::make_shared<detail::FutureState>();
    state->engine = &engine_;
    const std::size_t bytes = src.size_bytes();
    World* w = world_;
    const RankId me = id_;
    const RankId owner = src.owner;
    engine_.enqueue(
        [=] {
            std::memcpy(dst.data(), from, bytes);
            w->account(owner, me, bytes);
        },
        state);
    return Future{state};
}

template <typename T>
    requires std::is_trivially_copyable_v<T>
T Rank::broadcast(const T& value, RankId root) {
    auto bytes = broadcast_bytes(std::as_bytes(std::span<const T, 1>(&value, 1)), root);
    T out;
    std::memcpy(&out, bytes.data(), sizeof(T));
    return out;
}

template <typename T>
    requires std::is_trivially_copyable_v<T>
std::vector<T> Rank::broadcast(const std::vector<T>& value, RankId root) {
    auto bytes = broadcast_bytes(std::as_bytes(std::span<const T>(value)), root);
    std::vector<T> out(bytes.size() / sizeof(T));
    if (!out.empty())
        std::memcpy(out.data(), bytes.data(), bytes.size());
    return out;
}

} // namespace minipgas::pgas

#endif // MINIPGAS_PGAS_WORLD_HPP
