#include "minipgas/spmv/exchange.hpp"

#include <algorithm>
#include <string>

namespace minipgas::spmv {

DistVector make_dist_vector(Rank& rank, const BlockCyclicLayout& layout,
                            const sparse::DenseVector& padded) {
    if (padded.size() != layout.n_padded)
        throw ArgumentError("make_dist_vector expects a padded vector of length " +
                            std::to_string(layout.n_padded));
    DistVector x;
    x.owned = rank.allocate<double>(static_cast<std::size_t>(layout.rows_per_rank()));
    auto view = rank.local_view(x.owned);
    for (Index l = 0; l < layout.rows_per_rank(); ++l)
        view[static_cast<std::size_t>(l)] = padded[layout.global_row(rank.id(), l)];
    x.directory.resize(static_cast<std::size_t>(rank.rank_n()));
    for (int r = 0; r < rank.rank_n(); ++r)
        x.directory[static_cast<std::size_t>(r)] = rank.broadcast(x.owned, RankId{r});
    return x;
}

double GhostedVector::ghost(Index g) const {
    auto it = std::lower_bound(ghost_indices.begin(), ghost_indices.end(), g);
    if (it == ghost_indices.end() || *it != g)
        throw ArgumentError("index " + std::to_string(g) + " is not a ghost");
    return values[static_cast<std::size_t>(owned_size + (it - ghost_indices.begin()))];
}

GhostedVector make_ghosted(const BlockCyclicLayout& layout, IndexSet ghost_indices) {
    GhostedVector gv;
    gv.owned_size = layout.rows_per_rank();
    gv.ghost_indices = std::move(ghost_indices);
    gv.values.assign(static_cast<std::size_t>(gv.owned_size) + gv.ghost_indices.size(), 0.0);
    return gv;
}

namespace {

void copy_owned(Rank& rank, const DistVector& x, GhostedVector& gv) {
    auto own = rank.local_view(x.owned);
    std::copy(own.begin(), own.end(), gv.values.begin());
}

} // namespace

void exchange_v1(Rank& rank, const DistVector& x, const CommPlanV1& plan,
                 const BlockCyclicLayout& layout, GhostedVector& gv) {
    const int P = rank.rank_n();
    const RankId me = rank.id();
    const Index B = layout.block_size;

    // staging holds whole blocks, owners ascending, blocks ascending
    std::vector<Index> owner_base(static_cast<std::size_t>(P) + 1, 0);
    for (int a = 0; a < P; ++a)
        owner_base[static_cast<std::size_t>(a) + 1] =
            owner_base[static_cast<std::size_t>(a)] +
            static_cast<Index>(plan.blocks(RankId{a}, me).size());
    std::vector<double> staging(static_cast<std::size_t>(owner_base.back() * B));

    pgas::Future done = pgas::make_ready_future();
    for (int a = 0; a < P; ++a) {
        const auto& blocks = plan.blocks(RankId{a}, me);
        for (std::size_t i = 0; i < blocks.size(); ++i) {
            const Index pos = (owner_base[static_cast<std::size_t>(a)] + static_cast<Index>(i)) * B;
            auto src = x.directory[static_cast<std::size_t>(a)].slice(
                static_cast<std::size_t>(blocks[i] * B), static_cast<std::size_t>(B));
            done = pgas::when_all(
                done, rank.rget(src, std::span<double>(staging).subspan(static_cast<std::size_t>(pos),
                                                                         static_cast<std::size_t>(B))));
        }
    }
    done.wait();
    rank.barrier();

    copy_owned(rank, x, gv);
    for (std::size_t k = 0; k < gv.ghost_indices.size(); ++k) {
        const Index g = gv.ghost_indices[k];
        const RankId a = layout.owner(g);
        const auto& blocks = plan.blocks(a, me);
        const auto i = std::lower_bound(blocks.begin(), blocks.end(), layout.local_block(g)) - blocks.begin();
        const Index pos = (owner_base[static_cast<std::size_t>(a.value)] + i) * B + g % B;
        gv.values[static_cast<std::size_t>(gv.owned_size) + k] = staging[static_cast<std::size_t>(pos)];
    }
    gv.version = x.version;
}

void exchange_v2(Rank& rank, const DistVector& x, const CommPlanV2& plan,
                 const BlockCyclicLayout& layout, GhostedVector& gv) {
    if (!plan.srb)
        throw ArgumentError("exchange_v2 needs a plan with a bound Shared Receive Buffer");
    const int P = rank.rank_n();
    const RankId me = rank.id();
    auto own = rank.local_view(x.owned);

    std::vector<double> packed;
    pgas::Future done = pgas::make_ready_future();
    for (int b = 0; b < P; ++b) {
        const auto& idx = plan.indices(me, RankId{b});
        if (idx.empty())
            continue;
        packed.resize(idx.size());
        for (std::size_t i = 0; i < idx.size(); ++i)
            packed[i] = own[static_cast<std::size_t>(layout.local_index(idx[i]))];
        auto dst = plan.srb->directory[static_cast<std::size_t>(b)].slice(
            static_cast<std::size_t>(plan.offset(me, RankId{b})), idx.size());
        done = pgas::when_all(done, rank.rput(std::span<const double>(packed), dst));
    }
    done.wait();
    rank.barrier();

    copy_owned(rank, x, gv);
    auto srb = rank.local_view(plan.srb->local);
    const auto& scatter = plan.scatter[static_cast<std::size_t>(me.value)];
    for (std::size_t p = 0; p < srb.size(); ++p)
        gv.values[static_cast<std::size_t>(gv.owned_size + scatter[p])] = srb[p];
    gv.version = x.version;
}

std::vector<std::int32_t> resolve_columns(Rank& rank, const LocalSlice& slice,
                                          const BlockCyclicLayout& layout,
                                          const IndexSet& ghost_indices) {
    auto cols = rank.local_view(slice.offdiag_cols);
    auto vals = rank.local_view(slice.offdiag_vals);
    std::vector<std::int32_t> out(cols.size());
    const Index owned = layout.rows_per_rank();
    for (std::size_t s = 0; s < cols.size(); ++s) {
        const Index g = cols[s];
        if (layout.owner(g) == slice.rank) {
            out[s] = static_cast<std::int32_t>(layout.local_index(g));
            continue;
        }
        auto it = std::lower_bound(ghost_indices.begin(), ghost_indices.end(), g);
        if (it == ghost_indices.end() || *it != g) {
            // only zero slots may reference unavailable columns; they never
            // do by construction, but keep them harmless
            if (vals[s] != 0.0)
                throw ArgumentError("column " + std::to_string(g) + " missing from ghost list");
            out[s] = 0;
            continue;
        }
        out[s] = static_cast<std::int32_t>(owned + (it - ghost_indices.begin()));
    }
    return out;
}

void spmv_local(Rank& rank, const LocalSlice& slice, const std::vector<std::int32_t>& resolved,
                const GhostedVector& gv, const GlobalRef<double>& y_owned,
                std::uint64_t current_version, bool check_version) {
    if (check_version && gv.version != current_version)
        throw PhaseError("rank " + std::to_string(rank.rank_me()) + ": ghosts reflect version " +
                         std::to_string(gv.version) + " but x is at version " +
                         std::to_string(current_version));
    auto diag = rank.local_view(slice.diag);
    auto vals = rank.local_view(slice.offdiag_vals);
    auto y = rank.local_view(y_owned);
    const auto rnz = static_cast<std::size_t>(slice.r_nz);
    const double* xv = gv.values.data();
    for (std::size_t r = 0; r < static_cast<std::size_t>(slice.rows); ++r) {
        double acc = diag[r] * xv[r];
        for (std::size_t k = 0; k < rnz; ++k) {
            const std::size_t s = r * rnz + k;
            acc += vals[s] * xv[resolved[s]];
        }
        y[r] = acc;
    }
}

} // namespace minipgas::spmv
