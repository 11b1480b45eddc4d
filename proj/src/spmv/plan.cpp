#include "minipgas/spmv/plan.hpp"

#include <algorithm>
#include <string>

namespace minipgas::spmv {

LocalSlice distribute_matrix(Rank& rank, const sparse::EllpackMatrix& padded,
                             const BlockCyclicLayout& layout) {
    if (padded.n != layout.n_padded)
        throw ArgumentError("distribute_matrix expects the padded matrix (n=" +
                            std::to_string(layout.n_padded) + "), got n=" + std::to_string(padded.n));
    const RankId me = rank.id();
    const Index rows = layout.rows_per_rank();
    const Index rnz = padded.r_nz;

    LocalSlice s;
    s.rank = me;
    s.rows = rows;
    s.r_nz = rnz;
    s.diag = rank.allocate<double>(static_cast<std::size_t>(rows));
    s.offdiag_vals = rank.allocate<double>(static_cast<std::size_t>(rows * rnz));
    s.offdiag_cols = rank.allocate<std::int32_t>(static_cast<std::size_t>(rows * rnz));

    auto diag = rank.local_view(s.diag);
    auto vals = rank.local_view(s.offdiag_vals);
    auto cols = rank.local_view(s.offdiag_cols);
    for (Index mb = 0; mb < layout.blocks_per_rank; ++mb) {
        const Index offset = layout.block_offset(me, mb);
        const Index local0 = mb * layout.block_size;
        for (Index i = 0; i < layout.block_size; ++i) {
            const Index g = offset + i;
            const Index l = local0 + i;
            diag[static_cast<std::size_t>(l)] = padded.diag[g];
            for (Index k = 0; k < rnz; ++k) {
                vals[static_cast<std::size_t>(l * rnz + k)] = padded.offdiag_vals[padded.slot(g, k)];
                cols[static_cast<std::size_t>(l * rnz + k)] = padded.offdiag_cols[padded.slot(g, k)];
            }
        }
    }
    return s;
}

sparse::EllpackMatrix local_matrix(Rank& rank, const LocalSlice& slice) {
    auto diag = rank.local_view(slice.diag);
    auto vals = rank.local_view(slice.offdiag_vals);
    auto cols = rank.local_view(slice.offdiag_cols);
    sparse::EllpackMatrix m;
    m.n = slice.rows;
    m.r_nz = slice.r_nz;
    m.diag = Eigen::Map<const sparse::DenseVector>(diag.data(), static_cast<Index>(diag.size()));
    m.offdiag_vals = Eigen::Map<const sparse::DenseVector>(vals.data(), static_cast<Index>(vals.size()));
    m.offdiag_cols = Eigen::Map<const sparse::ColumnVector>(cols.data(), static_cast<Index>(cols.size()));
    return m;
}

sparse::EllpackMatrix gather_matrix(std::span<const sparse::EllpackMatrix> locals,
                                    const BlockCyclicLayout& layout) {
    if (static_cast<int>(locals.size()) != layout.ranks)
        throw ArgumentError("gather_matrix needs one local matrix per rank");
    const Index rnz = locals.empty() ? 0 : locals.front().r_nz;
    sparse::EllpackMatrix m;
    m.n = layout.n_padded;
    m.r_nz = rnz;
    m.diag.resize(m.n);
    m.offdiag_vals.resize(m.n * rnz);
    m.offdiag_cols.resize(m.n * rnz);
    for (int r = 0; r < layout.ranks; ++r) {
        const auto& loc = locals[static_cast<std::size_t>(r)];
        for (Index l = 0; l < loc.n; ++l) {
            const Index g = layout.global_row(RankId{r}, l);
            m.diag[g] = loc.diag[l];
            for (Index k = 0; k < rnz; ++k) {
                m.offdiag_vals[m.slot(g, k)] = loc.offdiag_vals[loc.slot(l, k)];
                m.offdiag_cols[m.slot(g, k)] = loc.offdiag_cols[loc.slot(l, k)];
            }
        }
    }
    return m;
}

IndexSet analyze_requirements(Rank& rank, const LocalSlice& slice, const BlockCyclicLayout& layout) {
    auto vals = rank.local_view(slice.offdiag_vals);
    auto cols = rank.local_view(slice.offdiag_cols);
    IndexSet need;
    for (std::size_t s = 0; s < vals.size(); ++s) {
        if (vals[s] == 0.0)
            continue;
        const Index g = cols[s];
        if (layout.owner(g) != slice.rank)
            need.push_back(g);
    }
    std::sort(need.begin(), need.end());
    need.erase(std::unique(need.begin(), need.end()), need.end());
    return need;
}

std::vector<IndexSet> gather_requirements(Rank& rank, const IndexSet& mine) {
    std::vector<IndexSet> all(static_cast<std::size_t>(rank.rank_n()));
    for (int r = 0; r < rank.rank_n(); ++r)
        all[static_cast<std::size_t>(r)] = rank.broadcast(r == rank.rank_me() ? mine : IndexSet{}, RankId{r});
    return all;
}

CommPlanV1 plan_v1(std::span<const IndexSet> requirements, const BlockCyclicLayout& layout) {
    const int P = layout.ranks;
    CommPlanV1 plan;
    plan.ranks = P;
    plan.block_size = layout.block_size;
    plan.pair_blocks.resize(static_cast<std::size_t>(P) * P);
    for (int consumer = 0; consumer < P; ++consumer) {
        for (Index g : requirements[static_cast<std::size_t>(consumer)]) {
            const RankId owner = layout.owner(g);
            auto& blocks = plan.pair_blocks[static_cast<std::size_t>(owner.value) * P + consumer];
            const Index mb = layout.local_block(g);
            // requirement sets are sorted, so block ids arrive non-decreasing per owner
            if (blocks.empty() || blocks.back() != mb)
                blocks.push_back(mb);
        }
    }
    return plan;
}

CommPlanV2 condense(std::span<const IndexSet> requirements, const BlockCyclicLayout& layout) {
    const int P = layout.ranks;
    CommPlanV2 plan;
    plan.ranks = P;
    plan.pair_indices.resize(static_cast<std::size_t>(P) * P);
    plan.pair_offsets.assign(static_cast<std::size_t>(P) * P, 0);
    plan.srb_sizes.assign(static_cast<std::size_t>(P), 0);
    plan.scatter.resize(static_cast<std::size_t>(P));

    for (int consumer = 0; consumer < P; ++consumer) {
        const IndexSet& need = requirements[static_cast<std::size_t>(consumer)];
        for (Index g : need)
            plan.pair_indices[static_cast<std::size_t>(layout.owner(g).value) * P + consumer].push_back(g);

        Index offset = 0;
        auto& scatter = plan.scatter[static_cast<std::size_t>(consumer)];
        scatter.reserve(need.size());
        for (int owner = 0; owner < P; ++owner) {
            const std::size_t pair = static_cast<std::size_t>(owner) * P + consumer;
            plan.pair_offsets[pair] = offset;
            for (Index g : plan.pair_indices[pair]) {
                const auto pos = std::lower_bound(need.begin(), need.end(), g) - need.begin();
                scatter.push_back(static_cast<Index>(pos));
            }
            offset += static_cast<Index>(plan.pair_indices[pair].size());
        }
        plan.srb_sizes[static_cast<std::size_t>(consumer)] = offset;
    }
    return plan;
}

CommPlanV2 plan_v2(Rank& rank, const IndexSet& mine, const BlockCyclicLayout& layout) {
    const auto all = gather_requirements(rank, mine);
    CommPlanV2 plan = condense(all, layout);

    SrbBinding srb;
    srb.local = rank.allocate<double>(static_cast<std::size_t>(plan.srb_size(rank.id())));
    srb.directory.resize(static_cast<std::size_t>(rank.rank_n()));
    for (int r = 0; r < rank.rank_n(); ++r)
        srb.directory[static_cast<std::size_t>(r)] = rank.broadcast(srb.local, RankId{r});
    plan.srb = std::move(srb);
    return plan;
}

PairVolume comm_volume_model(const CommPlanV1& plan) {
    PairVolume v(plan.ranks);
    for (int a = 0; a < plan.ranks; ++a)
        for (int b = 0; b < plan.ranks; ++b)
            v.at(RankId{a}, RankId{b}) =
                plan.blocks(RankId{a}, RankId{b}).size() * static_cast<std::uint64_t>(plan.block_size) * 8;
    return v;
}

PairVolume comm_volume_model(const CommPlanV2& plan) {
    PairVolume v(plan.ranks);
    for (int a = 0; a < plan.ranks; ++a)
        for (int b = 0; b < plan.ranks; ++b)
            v.at(RankId{a}, RankId{b}) = plan.indices(RankId{a}, RankId{b}).size() * 8;
    return v;
}

} // namespace minipgas::spmv
