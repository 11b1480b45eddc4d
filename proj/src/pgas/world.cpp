#include "minipgas/pgas/world.hpp"

#include <exception>
#include <string>
#include <thread>

namespace minipgas::pgas {

namespace {

/// Raised in ranks woken because another rank already failed.
class WorldAborted : public CollectiveError {
public:
    WorldAborted() : CollectiveError("world aborted by a failing rank") {}
};

std::uint64_t rank_seed(std::uint64_t seed, int rank) {
    // splitmix64 step keeps per-rank streams decorrelated
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * static_cast<std::uint64_t>(rank + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace

Rank::Rank(World& world, RankId id)
    : world_(&world), id_(id),
      engine_(world.config().completion, rank_seed(world.config().seed, id.value)) {}

int Rank::rank_n() const { return world_->size(); }

void Rank::barrier() { world_->barrier_arrive(*this); }

CommStats Rank::comm_stats() const { return world_->comm_stats(); }

std::vector<std::byte> Rank::broadcast_bytes(std::span<const std::byte> bytes, RankId root) {
    if (root.value < 0 || root.value >= rank_n())
        throw ArgumentError("broadcast: root " + std::to_string(root.value) + " outside world");
    auto& slot = world_->slots_[static_cast<std::size_t>(id_.value)];
    slot.root = root.value;
    if (root == id_)
        slot.data.assign(bytes.begin(), bytes.end());
    else
        slot.data.clear();
    barrier();
    for (const auto& s : world_->slots_) {
        if (s.root != root.value) {
            barrier();
            throw CollectiveError("broadcast: ranks disagree on root (" + std::to_string(s.root) +
                                  " vs " + std::to_string(root.value) + ")");
        }
    }
    std::vector<std::byte> out = world_->slots_[static_cast<std::size_t>(root.value)].data;
    if (root == id_) {
        for (int d = 0; d < rank_n(); ++d)
            if (d != id_.value)
                world_->account(id_, RankId{d}, out.size());
    }
    barrier();
    return out;
}

// ---------------------------------------------------------------------------

World::World(WorldConfig config) : config_(config) {
    if (config_.ranks < 1)
        throw ArgumentError("world size must be >= 1, got " + std::to_string(config_.ranks));
    partitions_.reserve(static_cast<std::size_t>(config_.ranks));
    for (int r = 0; r < config_.ranks; ++r)
        partitions_.push_back(std::make_unique<Partition>());
    stats_ = CommStats(config_.ranks);
    slots_.resize(static_cast<std::size_t>(config_.ranks));
}

World::~World() = default;

CommStats World::comm_stats() const {
    std::lock_guard lock(stats_mu_);
    return stats_;
}

void World::run_impl(const std::function<void(Rank&)>& program) {
    const int P = size();
    {
        std::lock_guard lock(barrier_mu_);
        arrived_ = 0;
        exited_ = 0;
        aborted_ = false;
    }

    std::vector<std::unique_ptr<Rank>> ranks;
    ranks.reserve(static_cast<std::size_t>(P));
    for (int r = 0; r < P; ++r) {
        ranks.push_back(std::make_unique<Rank>(*this, RankId{r}));
        ranks.back()->epoch_ = generation_;
    }

    struct Failure {
        std::exception_ptr error;
        std::string what;
        bool secondary = false;
    };
    std::vector<Failure> failures(static_cast<std::size_t>(P));

    auto body = [&](int r) {
        Rank& rank = *ranks[static_cast<std::size_t>(r)];
        try {
            program(rank);
            rank.engine_.drain();
        } catch (const WorldAborted& e) {
            failures[static_cast<std::size_t>(r)] = {std::current_exception(), e.what(), true};
            abort();
        } catch (const std::exception& e) {
            failures[static_cast<std::size_t>(r)] = {std::current_exception(), e.what(), false};
            abort();
        } catch (...) {
            failures[static_cast<std::size_t>(r)] = {std::current_exception(), "unknown exception", false};
            abort();
        }
        {
            std::lock_guard lock(barrier_mu_);
            ++exited_;
        }
        barrier_cv_.notify_all();
    };

    std::vector<std::thread> threads;
    threads.reserve(static_cast<std::size_t>(P));
    for (int r = 0; r < P; ++r)
        threads.emplace_back(body, r);
    for (auto& t : threads)
        t.join();

    int first_secondary = -1;
    for (int r = 0; r < P; ++r) {
        const auto& f = failures[static_cast<std::size_t>(r)];
        if (!f.error)
            continue;
        if (!f.secondary)
            throw WorldError(r, f.what);
        if (first_secondary < 0)
            first_secondary = r;
    }
    if (first_secondary >= 0)
        throw WorldError(first_secondary, failures[static_cast<std::size_t>(first_secondary)].what);
}

SegmentId World::allocate_segment(RankId owner, ElemKind kind, std::size_t count) {
    Partition& part = *partitions_.at(static_cast<std::size_t>(owner.value));
    const std::size_t bytes = count * elem_size(kind);
    std::lock_guard lock(part.mu);
    if (bytes > config_.segment_budget_bytes - part.bytes_used)
        throw ResourceError("rank " + std::to_string(owner.value) + ": allocation of " +
                            std::to_string(bytes) + " bytes exceeds segment budget (" +
                            std::to_string(config_.segment_budget_bytes - part.bytes_used) +
                            " bytes left)");
    auto seg = std::make_unique<Segment>();
    seg->kind = kind;
    seg->count = count;
    seg->data = std::make_unique<std::byte[]>(bytes > 0 ? bytes : 1);
    part.bytes_used += bytes;
    part.segments.push_back(std::move(seg));
    return part.segments.size() - 1;
}

std::byte* World::resolve(RankId owner, SegmentId seg, ElemKind kind, std::size_t offset,
                          std::size_t span) {
    if (owner.value < 0 || owner.value >= size())
        throw ArgumentError("GlobalRef owner " + std::to_string(owner.value) + " outside world");
    Partition& part = *partitions_[static_cast<std::size_t>(owner.value)];
    Segment* s = nullptr;
    {
        std::lock_guard lock(part.mu);
        if (seg >= part.segments.size())
            throw ArgumentError("GlobalRef names unknown segment " + std::to_string(seg) +
                                " on rank " + std::to_string(owner.value));
        s = part.segments[seg].get();
    }
    if (s->kind != kind)
        throw TypeError("element kind of reference does not match segment");
    if (offset > s->count || span > s->count - offset)
        throw ArgumentError("GlobalRef range [" + std::to_string(offset) + ", " +
                            std::to_string(offset + span) + ") exceeds segment of " +
                            std::to_string(s->count) + " elements");
    return s->data.get() + offset * elem_size(kind);
}

void World::account(RankId src, RankId dst, std::size_t bytes) {
    std::lock_guard lock(stats_mu_);
    Counters& c = src == dst ? stats_.local_copies(src) : stats_.pair(src, dst);
    c.messages += 1;
    c.bytes += bytes;
}

void World::journal_write(RankId initiator, std::uint64_t epoch, RankId owner, SegmentId seg,
                          std::size_t offset, std::size_t span) {
    std::lock_guard lock(journal_mu_);
    auto& phase = journal_[epoch];
    for (const auto& e : phase) {
        if (e.owner == owner && e.segment == seg && e.begin < offset + span && offset < e.end)
            throw OverlapError("rput by rank " + std::to_string(initiator.value) + " to [" +
                               std::to_string(offset) + ", " + std::to_string(offset + span) +
                               ") of segment " + std::to_string(seg) + " on rank " +
                               std::to_string(owner.value) + " overlaps a write by rank " +
                               std::to_string(e.initiator.value) + " in the same phase");
    }
    phase.push_back({initiator, owner, seg, offset, offset + span});
}

void World::barrier_arrive(Rank& rank) {
    std::unique_lock lock(barrier_mu_);
    if (aborted_)
        throw WorldAborted();
    const std::uint64_t gen = generation_;
    if (++arrived_ == size()) {
        arrived_ = 0;
        ++generation_;
        {
            std::lock_guard jl(journal_mu_);
            journal_.erase(journal_.begin(), journal_.upper_bound(gen));
        }
        rank.epoch_ = generation_;
        lock.unlock();
        barrier_cv_.notify_all();
        return;
    }
    const auto deadline = std::chrono::steady_clock::now() + config_.barrier_timeout;
    const bool done = barrier_cv_.wait_until(lock, deadline, [&] {
        return generation_ != gen || aborted_ || exited_ > 0;
    });
    if (generation_ != gen) {
        rank.epoch_ = generation_;
        return;
    }
    if (aborted_)
        throw WorldAborted();
    --arrived_;
    if (!done)
        throw CollectiveError("barrier timed out after " +
                              std::to_string(config_.barrier_timeout.count()) + " ms (" +
                              std::to_string(arrived_ + 1) + " of " + std::to_string(size()) +
                              " ranks arrived)");
    throw CollectiveError("barrier can never complete: a rank exited without entering it");
}

void World::abort() {
    {
        std::lock_guard lock(barrier_mu_);
        aborted_ = true;
    }
    barrier_cv_.notify_all();
}

} // namespace minipgas::pgas
