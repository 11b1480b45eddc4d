#ifndef MINIPGAS_PGAS_FUTURE_HPP
#define MINIPGAS_PGAS_FUTURE_HPP

#include <atomic>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <random>
#include <span>
#include <vector>

namespace minipgas::pgas {

/// When a one-sided transfer actually moves its data.
enum class CompletionPolicy {
    eager,      ///< at initiation; futures are born ready
    deferred,   ///< on progress, oldest first
    randomized, ///< on progress, uniformly random pending op first (seeded)
};

namespace detail {

struct FutureState;

/// Per-rank queue of initiated but not yet completed operations.
///
/// Only the owning rank touches its engine; progress happens inside
/// Future::wait and Rank::progress, never in the background.
class ProgressEngine {
public:
    ProgressEngine(CompletionPolicy policy, std::uint64_t seed) : policy_(policy), rng_(seed) {}

    ProgressEngine(const ProgressEngine&) = delete;
    ProgressEngine& operator=(const ProgressEngine&) = delete;

    CompletionPolicy policy() const { return policy_; }

    void enqueue(std::function<void()> work, std::shared_ptr<FutureState> state);

    /// Completes one pending operation. Returns false if none was pending.
    bool progress_one();

    void drain() {
        while (progress_one()) {
        }
    }

    std::size_t pending() const { return pending_.size(); }

private:
    struct Pending {
        std::function<void()> work;
        std::shared_ptr<FutureState> state;
    };

    CompletionPolicy policy_;
    std::mt19937_64 rng_;
    std::vector<Pending> pending_;
};

struct FutureState {
    std::atomic<bool> ready{false};
    ProgressEngine* engine = nullptr;
    // Non-empty only for conjoined futures; always leaves, never conjoined states.
    std::vector<std::shared_ptr<FutureState>> deps;

    bool is_ready() {
        if (ready.load(std::memory_order_acquire))
            return true;
        if (deps.empty())
            return false;
        for (const auto& d : deps)
            if (!d->ready.load(std::memory_order_acquire))
                return false;
        ready.store(true, std::memory_order_release);
        return true;
    }
};

} // namespace detail

/// Completion handle of a one-sided operation, or a conjunction of such handles.
///
/// State moves pending -> ready exactly once. Waitable only by the rank that
/// initiated the underlying operations.
class Future {
public:
    /// Trivially ready future.
    Future();

    bool ready() const { return state_->is_ready(); }

    /// Drives the initiating rank's progress until ready. Idempotent.
    void wait() const;

    explicit Future(std::shared_ptr<detail::FutureState> s) : state_(std::move(s)) {}

private:
    friend Future when_all(std::span<const Future> futures);

    std::shared_ptr<detail::FutureState> state_;
};

inline Future make_ready_future() { return Future{}; }

/// Ready iff every argument is ready; the empty conjunction is ready.
Future when_all(std::span<const Future> futures);

inline Future when_all(std::initializer_list<Future> futures) {
    return when_all(std::span<const Future>(futures.begin(), futures.size()));
}

inline Future when_all(const Future& a, const Future& b) { return when_all({a, b}); }

} // namespace minipgas::pgas

#endif // MINIPGAS_PGAS_FUTURE_HPP
