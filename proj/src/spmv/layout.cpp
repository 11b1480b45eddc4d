#include "minipgas/spmv/layout.hpp"

#include <string>

namespace minipgas::spmv {

BlockCyclicLayout build_layout(Index n, Index block_size, int ranks) {
    if (n < 1 || block_size < 1 || ranks < 1)
        throw ArgumentError("layout needs n, B, P >= 1 (n=" + std::to_string(n) +
                            ", B=" + std::to_string(block_size) + ", P=" + std::to_string(ranks) + ")");
    BlockCyclicLayout l;
    l.n = n;
    l.block_size = block_size;
    l.ranks = ranks;
    const Index stride = block_size * ranks;
    l.n_padded = (n + stride - 1) / stride * stride;
    l.nblks = l.n_padded / block_size;
    l.blocks_per_rank = l.nblks / ranks;
    return l;
}

sparse::EllpackMatrix pad_matrix(const sparse::EllpackMatrix& m, const BlockCyclicLayout& layout) {
    if (m.n != layout.n)
        throw ArgumentError("layout built for n=" + std::to_string(layout.n) + ", matrix has n=" +
                            std::to_string(m.n));
    const Index np = layout.n_padded;
    sparse::EllpackMatrix p;
    p.n = np;
    p.r_nz = m.r_nz;
    p.diag = sparse::DenseVector::Ones(np);
    p.diag.head(m.n) = m.diag;
    p.offdiag_vals = sparse::DenseVector::Zero(np * m.r_nz);
    p.offdiag_vals.head(m.offdiag_vals.size()) = m.offdiag_vals;
    p.offdiag_cols.resize(np * m.r_nz);
    p.offdiag_cols.head(m.offdiag_cols.size()) = m.offdiag_cols;
    for (Index r = m.n; r < np; ++r)
        for (Index k = 0; k < m.r_nz; ++k)
            p.offdiag_cols[p.slot(r, k)] = static_cast<std::int32_t>(r);
    return p;
}

sparse::DenseVector pad_vector(const sparse::DenseVector& x, const BlockCyclicLayout& layout) {
    if (x.size() != layout.n)
        throw ArgumentError("vector length " + std::to_string(x.size()) + " != layout n " +
                            std::to_string(layout.n));
    sparse::DenseVector p = sparse::DenseVector::Zero(layout.n_padded);
    p.head(layout.n) = x;
    return p;
}

} // namespace minipgas::spmv
