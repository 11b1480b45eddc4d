#ifndef MINIPGAS_SPARSE_ELLPACK_HPP
#define MINIPGAS_SPARSE_ELLPACK_HPP

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "minipgas/sparse/coo.hpp"

namespace minipgas::sparse {

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using DenseVector = Vector<double>;
using ColumnVector = Eigen::Matrix<std::int32_t, Eigen::Dynamic, 1>;

/// Modified ELLPACK: M = D + A with D as a length-n array and A as two flat
/// row-major arrays of length n * r_nz.
///
/// Row r owns slots [r * r_nz, (r + 1) * r_nz). Off-diagonal entries sit in
/// ascending column order; unused slots hold value 0 and column r.
template <typename Scalar>
struct Ellpack {
    Index n = 0;
    Index r_nz = 0;
    Vector<Scalar> diag;
    Vector<Scalar> offdiag_vals;
    ColumnVector offdiag_cols;

    Index slot(Index row, Index k) const { return row * r_nz + k; }

    bool operator==(const Ellpack& o) const {
        return n == o.n && r_nz == o.r_nz && diag == o.diag && offdiag_vals == o.offdiag_vals &&
               offdiag_cols == o.offdiag_cols;
    }
};

using EllpackMatrix = Ellpack<double>;

/// Requires a nonzero diagonal in every row. Explicit zero off-diagonal
/// entries are dropped.
template <typename Scalar>
Ellpack<Scalar> from_coo(const BasicCoo<Scalar>& coo) {
    coo.validate();
    if (coo.n > std::numeric_limits<std::int32_t>::max())
        throw StructureError("dimension exceeds 32-bit column index range");
    const Index n = coo.n;
    const auto entries = coo.sorted_entries();

    Ellpack<Scalar> m;
    m.n = n;
    m.diag = Vector<Scalar>::Zero(n);
    std::vector<bool> has_diag(static_cast<std::size_t>(n), false);
    std::vector<Index> row_count(static_cast<std::size_t>(n), 0);
    for (const auto& e : entries) {
        if (e.row == e.col) {
            m.diag[e.row] = e.value;
            has_diag[static_cast<std::size_t>(e.row)] = e.value != Scalar(0);
        } else if (e.value != Scalar(0)) {
            ++row_count[static_cast<std::size_t>(e.row)];
        }
    }
    for (Index r = 0; r < n; ++r)
        if (!has_diag[static_cast<std::size_t>(r)])
            throw StructureError("row " + std::to_string(r) + " has no nonzero diagonal entry");
    for (Index c : row_count)
        m.r_nz = std::max(m.r_nz, c);

    m.offdiag_vals = Vector<Scalar>::Zero(n * m.r_nz);
    m.offdiag_cols.resize(n * m.r_nz);
    for (Index r = 0; r < n; ++r)
        for (Index k = 0; k < m.r_nz; ++k)
            m.offdiag_cols[m.slot(r, k)] = static_cast<std::int32_t>(r);

    std::vector<Index> fill(static_cast<std::size_t>(n), 0);
    for (const auto& e : entries) {
        if (e.row == e.col || e.value == Scalar(0))
            continue;
        const Index s = m.slot(e.row, fill[static_cast<std::size_t>(e.row)]++);
        m.offdiag_vals[s] = e.value;
        m.offdiag_cols[s] = static_cast<std::int32_t>(e.col);
    }
    return m;
}

/// Enumerates stored nonzeros (diagonal and non-padding slots) in (row, col) order.
template <typename Scalar>
BasicCoo<Scalar> to_coo(const Ellpack<Scalar>& m) {
    BasicCoo<Scalar> coo;
    coo.n = m.n;
    for (Index r = 0; r < m.n; ++r) {
        bool diag_done = false;
        for (Index k = 0; k < m.r_nz; ++k) {
            const Index s = m.slot(r, k);
            if (m.offdiag_vals[s] == Scalar(0))
                continue;
            if (!diag_done && m.offdiag_cols[s] > r) {
                coo.entries.push_back({r, r, m.diag[r]});
                diag_done = true;
            }
            coo.entries.push_back({r, m.offdiag_cols[s], m.offdiag_vals[s]});
        }
        if (!diag_done)
            coo.entries.push_back({r, r, m.diag[r]});
    }
    return coo;
}

/// y(r) = diag[r] x(r) + sum_k vals[r, k] x(cols[r, k]), accumulated left to right.
template <typename Scalar, typename Derived>
Vector<Scalar> spmv_serial(const Ellpack<Scalar>& m, const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != m.n)
        throw ArgumentError("spmv: vector length " + std::to_string(x.size()) +
                            " != matrix dimension " + std::to_string(m.n));
    Vector<Scalar> y(m.n);
    for (Index r = 0; r < m.n; ++r) {
        Scalar acc = m.diag[r] * x[r];
        for (Index k = 0; k < m.r_nz; ++k) {
            const Index s = m.slot(r, k);
            acc += m.offdiag_vals[s] * x[m.offdiag_cols[s]];
        }
        y[r] = acc;
    }
    return y;
}

/// Row-by-row dense expansion of the COO matrix: diagonal term first, then
/// every other column in ascending order, zeros included.
template <typename Scalar, typename Derived>
Vector<Scalar> spmv_dense_oracle(const BasicCoo<Scalar>& coo, const Eigen::MatrixBase<Derived>& x) {
    if (x.size() != coo.n)
        throw ArgumentError("spmv: vector length " + std::to_string(x.size()) +
                            " != matrix dimension " + std::to_string(coo.n));
    const Index n = coo.n;
    const auto entries = coo.sorted_entries();
    Vector<Scalar> y(n);
    Vector<Scalar> row(n);
    std::size_t e = 0;
    for (Index i = 0; i < n; ++i) {
        row.setZero();
        for (; e < entries.size() && entries[e].row == i; ++e)
            row[entries[e].col] = entries[e].value;
        Scalar acc = row[i] * x[i];
        for (Index j = 0; j < n; ++j)
            if (j != i)
                acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

/// 2 (n + nnz_offdiag): one multiply and one add per genuine nonzero.
template <typename Scalar>
std::int64_t flops_count(const Ellpack<Scalar>& m) {
    std::int64_t nnz = 0;
    for (Index s = 0; s < m.offdiag_vals.size(); ++s)
        if (m.offdiag_vals[s] != Scalar(0))
            ++nnz;
    return 2 * (m.n + nnz);
}

} // namespace minipgas::sparse

#endif // MINIPGAS_SPARSE_ELLPACK_HPP
