#ifndef MINIPGAS_PGAS_COMM_STATS_HPP
#define MINIPGAS_PGAS_COMM_STATS_HPP

#include <cstdint>
#include <vector>

#include "minipgas/pgas/types.hpp"

namespace minipgas::pgas {

struct Counters {
    std::uint64_t messages = 0;
    std::uint64_t bytes = 0;

    Counters& operator+=(const Counters& o) {
        messages += o.messages;
        bytes += o.bytes;
        return *this;
    }
    friend Counters operator-(Counters a, const Counters& b) {
        a.messages -= b.messages;
        a.bytes -= b.bytes;
        return a;
    }
    bool operator==(const Counters&) const = default;
};

/// Snapshot of between-rank traffic per ordered (src, dst) pair.
///
/// Self-transfers never appear in the pair table; they are tallied per rank
/// in `local_copies`.
class CommStats {
public:
    CommStats() = default;
    explicit CommStats(int ranks)
        : ranks_(ranks), pairs_(static_cast<std::size_t>(ranks) * ranks), local_(ranks) {}

    int ranks() const { return ranks_; }

    const Counters& pair(RankId src, RankId dst) const { return pairs_[index(src, dst)]; }
    Counters& pair(RankId src, RankId dst) { return pairs_[index(src, dst)]; }

    const Counters& local_copies(RankId r) const { return local_[r.value]; }
    Counters& local_copies(RankId r) { return local_[r.value]; }

    /// Sum over all ordered pairs (local copies excluded).
    Counters total() const {
        Counters t;
        for (const auto& c : pairs_)
            t += c;
        return t;
    }

    friend CommStats operator-(const CommStats& a, const CommStats& b) {
        CommStats d(a.ranks_);
        for (std::size_t i = 0; i < a.pairs_.size(); ++i)
            d.pairs_[i] = a.pairs_[i] - b.pairs_[i];
        for (std::size_t i = 0; i < a.local_.size(); ++i)
            d.local_[i] = a.local_[i] - b.local_[i];
        return d;
    }

    bool operator==(const CommStats&) const = default;

private:
    std::size_t index(RankId s, RankId d) const {
        return static_cast<std::size_t>(s.value) * ranks_ + d.value;
    }

    int ranks_ = 0;
    std::vector<Counters> pairs_;
    std::vector<Counters> local_;
};

/// Bytes per ordered (src, dst) pair.
class PairVolume {
public:
    PairVolume() = default;
    explicit PairVolume(int ranks)
        : ranks_(ranks), bytes_(static_cast<std::size_t>(ranks) * ranks, 0) {}

    int ranks() const { return ranks_; }
    std::uint64_t& at(RankId src, RankId dst) { return bytes_[index(src, dst)]; }
    std::uint64_t at(RankId src, RankId dst) const { return bytes_[index(src, dst)]; }

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (auto b : bytes_)
            t += b;
        return t;
    }

    PairVolume& operator*=(std::uint64_t k) {
        for (auto& b : bytes_)
            b *= k;
        return *this;
    }

    bool operator==(const PairVolume&) const = default;

private:
    std::size_t index(RankId s, RankId d) const {
        return static_cast<std::size_t>(s.value) * ranks_ + d.value;
    }

    int ranks_ = 0;
    std::vector<std::uint64_t> bytes_;
};

/// True iff every ordered pair's measured payload equals the prediction.
inline bool volumes_match(const CommStats& measured, const PairVolume& predicted) {
    if (measured.ranks() != predicted.ranks())
        return false;
    for (int a = 0; a < measured.ranks(); ++a)
        for (int b = 0; b < measured.ranks(); ++b)
            if (measured.pair(RankId{a}, RankId{b}).bytes != predicted.at(RankId{a}, RankId{b}))
                return false;
    return true;
}

} // namespace minipgas::pgas

#endif // MINIPGAS_PGAS_COMM_STATS_HPP
