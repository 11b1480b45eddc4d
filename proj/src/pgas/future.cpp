#include "minipgas/pgas/future.hpp"

#include "minipgas/error.hpp"

namespace minipgas::pgas {

namespace detail {

void ProgressEngine::enqueue(std::function<void()> work, std::shared_ptr<FutureState> state) {
    if (policy_ == CompletionPolicy::eager) {
        work();
        state->ready.store(true, std::memory_order_release);
        return;
    }
    pending_.push_back(Pending{std::move(work), std::move(state)});
}

bool ProgressEngine::progress_one() {
    if (pending_.empty())
        return false;
    std::size_t pick = 0;
    if (policy_ == CompletionPolicy::randomized)
        pick = static_cast<std::size_t>(rng_() % pending_.size());
    Pending op = std::move(pending_[pick]);
    pending_.erase(pending_.begin() + static_cast<std::ptrdiff_t>(pick));
    op.work();
    op.state->ready.store(true, std::memory_order_release);
    return true;
}

} // namespace detail

namespace {

std::shared_ptr<detail::FutureState> ready_state() {
    static const auto s = [] {
        auto st = std::make_shared<detail::FutureState>();
        st->ready.store(true);
        return st;
    }();
    return s;
}

} // namespace

Future::Future() : state_(ready_state()) {}

void Future::wait() const {
    while (!state_->is_ready()) {
        if (state_->engine == nullptr || !state_->engine->progress_one())
            throw Error("wait on a future whose operations are not pending on this rank");
    }
}

Future when_all(std::span<const Future> futures) {
    auto out = std::make_shared<detail::FutureState>();
    for (const Future& f : futures) {
        const auto& s = f.state_;
        if (s->is_ready())
            continue;
        if (out->engine == nullptr)
            out->engine = s->engine;
        if (s->deps.empty()) {
            out->deps.push_back(s);
        } else {
            for (const auto& d : s->deps)
                if (!d->ready.load(std::memory_order_acquire))
                    out->deps.push_back(d);
        }
    }
    if (out->deps.empty())
        return Future{};
    return Future{std::move(out)};
}

} // namespace minipgas::pgas
