#include <algorithm>
#include <random>
#include <string>

#include "minipgas/sparse/io.hpp"

namespace minipgas::sparse {

namespace {

// Distribution helpers are spelled out so output does not depend on the
// standard library's distribution implementations.
double unit_double(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) { return rng() % bound; }

} // namespace

CooMatrix generate_synthetic(Index n, Index r_nz, Index bandwidth, std::uint64_t seed) {
    if (n < 1)
        throw ArgumentError("synthetic matrix needs n >= 1");
    if (r_nz < 0 || r_nz >= n)
        throw ArgumentError("synthetic matrix needs 0 <= r_nz < n (r_nz=" + std::to_string(r_nz) +
                            ", n=" + std::to_string(n) + ")");
    if (bandwidth < 1)
        throw ArgumentError("synthetic matrix needs bandwidth >= 1");

    std::mt19937_64 rng(seed);
    CooMatrix coo;
    coo.n = n;
    std::vector<Index> candidates;
    for (Index r = 0; r < n; ++r) {
        coo.entries.push_back({r, r, 1.0 + unit_double(rng)});

        candidates.clear();
        for (Index c = std::max<Index>(0, r - bandwidth); c <= std::min(n - 1, r + bandwidth); ++c)
            if (c != r)
                candidates.push_back(c);
        const auto want = static_cast<Index>(below(rng, static_cast<std::uint64_t>(r_nz) + 1));
        const Index count = std::min<Index>(want, static_cast<Index>(candidates.size()));
        for (Index k = 0; k < count; ++k) {
            const auto remaining = static_cast<std::uint64_t>(candidates.size()) - k;
            const auto pick = static_cast<std::size_t>(k) + below(rng, remaining);
            std::swap(candidates[static_cast<std::size_t>(k)], candidates[pick]);
            double v = 0.0;
            while (v == 0.0)
                v = 2.0 * unit_double(rng) - 1.0;
            coo.entries.push_back({r, candidates[static_cast<std::size_t>(k)], v});
        }
    }
    return coo;
}

} // namespace minipgas::sparse
