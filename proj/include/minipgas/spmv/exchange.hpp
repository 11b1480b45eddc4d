#ifndef MINIPGAS_SPMV_EXCHANGE_HPP
#define MINIPGAS_SPMV_EXCHANGE_HPP

#include <cstdint>
#include <vector>

#include "minipgas/spmv/plan.hpp"

namespace minipgas::spmv {

/// Block-cyclic vector: this rank's rows in a shared segment plus every
/// rank's segment reference. `version` advances whenever the owned rows change.
struct DistVector {
    GlobalRef<double> owned;
    std::vector<GlobalRef<double>> directory;
    std::uint64_t version = 0;
};

/// Collective. Allocates the owned part and fills it from the padded global vector.
DistVector make_dist_vector(Rank& rank, const BlockCyclicLayout& layout,
                            const sparse::DenseVector& padded);

/// Operand of the local multiply: owned rows followed by ghosts. Ghosts are
/// kept compactly, ordered by global index.
struct GhostedVector {
    Index owned_size = 0;
    IndexSet ghost_indices;
    std::vector<double> values; ///< owned_size + ghost_indices.size()
    std::uint64_t version = 0;  ///< DistVector::version the contents reflect

    double ghost(Index g) const;
};

GhostedVector make_ghosted(const BlockCyclicLayout& layout, IndexSet ghost_indices);

/// Pull whole blocks with rget, conjoin, wait, barrier, then extract ghosts.
void exchange_v1(Rank& rank, const DistVector& x, const CommPlanV1& plan,
                 const BlockCyclicLayout& layout, GhostedVector& gv);

/// Pack unique values per destination, rput into the destination SRB,
/// conjoin, wait, barrier, then scatter the local SRB into ghosts.
void exchange_v2(Rank& rank, const DistVector& x, const CommPlanV2& plan,
                 const BlockCyclicLayout& layout, GhostedVector& gv);

/// Maps every slot column of the slice to a position in GhostedVector::values.
std::vector<std::int32_t> resolve_columns(Rank& rank, const LocalSlice& slice,
                                          const BlockCyclicLayout& layout,
                                          const IndexSet& ghost_indices);

/// y_owned(r) = diag[r] x(r) + sum_k vals[r, k] x(col[r, k]) per local row,
/// same accumulation order as spmv_serial. With `check_version` a GhostedVector
/// older than `current_version` raises PhaseError.
void spmv_local(Rank& rank, const LocalSlice& slice, const std::vector<std::int32_t>& resolved,
                const GhostedVector& gv, const GlobalRef<double>& y_owned,
                std::uint64_t current_version, bool check_version);

} // namespace minipgas::spmv

#endif // MINIPGAS_SPMV_EXCHANGE_HPP
