#ifndef MINIPGAS_SPMV_PLAN_HPP
#define MINIPGAS_SPMV_PLAN_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "minipgas/pgas/world.hpp"
#include "minipgas/spmv/layout.hpp"

namespace minipgas::spmv {

using pgas::GlobalRef;
using pgas::Rank;

/// One rank's rows of the padded matrix, resident in its own shared segments.
struct LocalSlice {
    RankId rank{};
    Index rows = 0;
    Index r_nz = 0;
    GlobalRef<double> diag;
    GlobalRef<double> offdiag_vals;
    GlobalRef<std::int32_t> offdiag_cols;
};

/// Collective in spirit (every rank takes its own rows); performs no communication.
LocalSlice distribute_matrix(Rank& rank, const sparse::EllpackMatrix& padded,
                             const BlockCyclicLayout& layout);

/// Copy of the slice as an Ellpack over the rank's local rows (column indices stay global).
sparse::EllpackMatrix local_matrix(Rank& rank, const LocalSlice& slice);

/// Reassembles the padded matrix from per-rank local matrices, in rank order.
sparse::EllpackMatrix gather_matrix(std::span<const sparse::EllpackMatrix> locals,
                                    const BlockCyclicLayout& layout);

/// Sorted, duplicate-free global indices.
using IndexSet = std::vector<Index>;

/// Global indices referenced by nonzero slots of the slice and not owned by its rank.
IndexSet analyze_requirements(Rank& rank, const LocalSlice& slice, const BlockCyclicLayout& layout);

/// Every rank's requirement set, rank-ordered. Collective (one broadcast per rank).
std::vector<IndexSet> gather_requirements(Rank& rank, const IndexSet& mine);

using pgas::PairVolume;

/// Whole-block schedule: for each (owner, consumer) the owner-local block ids
/// containing at least one index the consumer needs.
struct CommPlanV1 {
    int ranks = 0;
    Index block_size = 0;
    std::vector<std::vector<Index>> pair_blocks; ///< [owner * P + consumer], ascending

    const std::vector<Index>& blocks(RankId owner, RankId consumer) const {
        return pair_blocks[static_cast<std::size_t>(owner.value) * ranks + consumer.value];
    }
};

CommPlanV1 plan_v1(std::span<const IndexSet> requirements, const BlockCyclicLayout& layout);

/// Where a consumer's Shared Receive Buffer lives, on every rank.
struct SrbBinding {
    GlobalRef<double> local;
    std::vector<GlobalRef<double>> directory; ///< SRB of each rank
};

/// Condensed schedule: for each (owner, consumer) the sorted unique indices
/// the consumer needs from the owner, packed into the consumer's SRB with
/// sources concatenated in ascending rank order.
struct CommPlanV2 {
    int ranks = 0;
    std::vector<std::vector<Index>> pair_indices; ///< [owner * P + consumer]
    std::vector<Index> pair_offsets;              ///< SRB offset of owner's region on consumer
    std::vector<Index> srb_sizes;                 ///< per consumer
    /// Per consumer: SRB position -> position in the consumer's ghost list.
    std::vector<std::vector<Index>> scatter;
    std::optional<SrbBinding> srb;

    const std::vector<Index>& indices(RankId owner, RankId consumer) const {
        return pair_indices[static_cast<std::size_t>(owner.value) * ranks + consumer.value];
    }
    Index offset(RankId owner, RankId consumer) const {
        return pair_offsets[static_cast<std::size_t>(owner.value) * ranks + consumer.value];
    }
    Index srb_size(RankId consumer) const { return srb_sizes[static_cast<std::size_t>(consumer.value)]; }
};

/// Pure part of the condensed plan (no SRB allocated).
CommPlanV2 condense(std::span<const IndexSet> requirements, const BlockCyclicLayout& layout);

/// Collective: gathers requirement sets, condenses, allocates this rank's SRB
/// and publishes every SRB reference.
CommPlanV2 plan_v2(Rank& rank, const IndexSet& mine, const BlockCyclicLayout& layout);

/// Predicted bytes per step: |blocks| B 8 per pair.
PairVolume comm_volume_model(const CommPlanV1& plan);
/// Predicted bytes per step: |unique indices| 8 per pair.
PairVolume comm_volume_model(const CommPlanV2& plan);

} // namespace minipgas::spmv

#endif // MINIPGAS_SPMV_PLAN_HPP
