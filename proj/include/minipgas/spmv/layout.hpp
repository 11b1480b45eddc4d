#ifndef MINIPGAS_SPMV_LAYOUT_HPP
#define MINIPGAS_SPMV_LAYOUT_HPP

#include "minipgas/pgas/types.hpp"
#include "minipgas/sparse/ellpack.hpp"

namespace minipgas::spmv {

using sparse::Index;
using pgas::RankId;

/// Round-robin distribution of row blocks of size B over P ranks.
///
/// Block mb of rank r covers global rows [(mb P + r) B, (mb P + r + 1) B).
/// The dimension is padded up to a multiple of B P.
struct BlockCyclicLayout {
    Index n = 0;          ///< original dimension
    Index n_padded = 0;
    Index block_size = 0; ///< B
    int ranks = 0;        ///< P
    Index nblks = 0;
    Index blocks_per_rank = 0;

    Index rows_per_rank() const { return blocks_per_rank * block_size; }
    Index padding_rows() const { return n_padded - n; }

    Index global_block(Index g) const { return g / block_size; }
    RankId owner(Index g) const { return RankId{static_cast<int>(global_block(g) % ranks)}; }
    /// Block id local to the owning rank.
    Index local_block(Index g) const { return global_block(g) / ranks; }
    Index local_index(Index g) const { return local_block(g) * block_size + g % block_size; }

    Index block_offset(RankId r, Index mb) const { return (mb * ranks + r.value) * block_size; }
    Index global_row(RankId r, Index local) const {
        return block_offset(r, local / block_size) + local % block_size;
    }

    bool operator==(const BlockCyclicLayout&) const = default;
};

BlockCyclicLayout build_layout(Index n, Index block_size, int ranks);

/// Appends identity rows (diag 1, no off-diagonals) up to n_padded.
sparse::EllpackMatrix pad_matrix(const sparse::EllpackMatrix& m, const BlockCyclicLayout& layout);

/// Zero-extends x to n_padded.
sparse::DenseVector pad_vector(const sparse::DenseVector& x, const BlockCyclicLayout& layout);

} // namespace minipgas::spmv

#endif // MINIPGAS_SPMV_LAYOUT_HPP
