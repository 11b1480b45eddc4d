#ifndef MINIPGAS_SPARSE_COO_HPP
#define MINIPGAS_SPARSE_COO_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "minipgas/error.hpp"

namespace minipgas::sparse {

using Index = std::int64_t;

template <typename Scalar>
struct CooEntry {
    Index row = 0;
    Index col = 0;
    Scalar value{};

    bool operator==(const CooEntry&) const = default;
};

/// Square matrix in coordinate form. Entry order carries no meaning.
template <typename Scalar>
struct BasicCoo {
    Index n = 0;
    std::vector<CooEntry<Scalar>> entries;

    /// Entries sorted by (row, col); the canonical form used for comparisons.
    std::vector<CooEntry<Scalar>> sorted_entries() const {
        auto e = entries;
        std::sort(e.begin(), e.end(), [](const auto& a, const auto& b) {
            return a.row != b.row ? a.row < b.row : a.col < b.col;
        });
        return e;
    }

    /// Index range and duplicate checks.
    void validate() const {
        for (const auto& e : entries)
            if (e.row < 0 || e.row >= n || e.col < 0 || e.col >= n)
                throw StructureError("entry (" + std::to_string(e.row) + ", " + std::to_string(e.col) +
                                     ") outside " + std::to_string(n) + "x" + std::to_string(n));
        const auto s = sorted_entries();
        for (std::size_t i = 1; i < s.size(); ++i)
            if (s[i].row == s[i - 1].row && s[i].col == s[i - 1].col)
                throw StructureError("duplicate entry (" + std::to_string(s[i].row) + ", " +
                                     std::to_string(s[i].col) + ") in row " + std::to_string(s[i].row));
    }
};

using CooMatrix = BasicCoo<double>;

} // namespace minipgas::sparse

#endif // MINIPGAS_SPARSE_COO_HPP
