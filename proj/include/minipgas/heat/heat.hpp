#ifndef MINIPGAS_HEAT_HEAT_HPP
#define MINIPGAS_HEAT_HEAT_HPP

#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "minipgas/pgas/world.hpp"

namespace minipgas::heat {

using Index = std::int64_t;
using pgas::GlobalRef;
using pgas::Rank;
using pgas::RankId;

/// Row-major grid, matching the layout of field segments.
using Field = Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using FieldMap = Eigen::Map<Field>;

/// mprocs x nprocs arrangement; rank = iproc * nprocs + kproc.
struct ProcessGrid {
    int mprocs = 1;
    int nprocs = 1;

    int ranks() const { return mprocs * nprocs; }
    int iproc(RankId r) const { return r.value / nprocs; }
    int kproc(RankId r) const { return r.value % nprocs; }

    std::optional<RankId> up(RankId r) const;
    std::optional<RankId> down(RankId r) const;
    std::optional<RankId> left(RankId r) const;
    std::optional<RankId> right(RankId r) const;
};

/// Parses "MxN", e.g. "2x4".
ProcessGrid parse_grid(std::string_view text);

struct SubdomainGeometry {
    RankId rank{};
    Index row0 = 0;
    Index col0 = 0;
    Index m = 0; ///< interior rows
    Index n = 0; ///< interior cols
    std::optional<RankId> up, down, left, right;
};

/// Even split of an M x N domain; requires M % mprocs == 0 and N % nprocs == 0.
std::vector<SubdomainGeometry> decompose(Index M, Index N, const ProcessGrid& grid);

struct InitSpec {
    double boundary = 1.0; ///< Dirichlet value on the physical boundary
    double interior = 0.0;

    /// "hot-boundary" (1, 0) or "uniform" (1, 1).
    static InitSpec preset(std::string_view name);
};

/// One rank's (m+2) x (n+2) field pair and horizontal scratch arrays, all in
/// shared segments. Interior cells are (1..m, 1..n).
struct Subdomain {
    SubdomainGeometry geo;
    GlobalRef<double> field[2];
    GlobalRef<double> scratch_left;  ///< packed column 1, read by the left neighbor
    GlobalRef<double> scratch_right; ///< packed column n, read by the right neighbor
    int current = 0;
    /// Per rank: both field buffers and both scratch arrays.
    std::vector<GlobalRef<double>> field_dir[2];
    std::vector<GlobalRef<double>> scratch_left_dir;
    std::vector<GlobalRef<double>> scratch_right_dir;
    std::vector<double> recv_left, recv_right;

    Index stride() const { return geo.n + 2; }
};

/// Collective: allocates this rank's buffers and publishes every rank's references.
Subdomain make_subdomain(Rank& rank, const SubdomainGeometry& geo);

FieldMap field_view(Rank& rank, const Subdomain& sub, int buffer);

/// Physical halo = boundary value (both buffers), interior = interior value,
/// inter-rank halo = 0.
void init_field(Rank& rank, Subdomain& sub, const InitSpec& init);

/// Single-layer halo refresh of the current buffer. Rows are fetched
/// directly, columns through the neighbours' packed scratch arrays.
void halo_exchange(Rank& rank, Subdomain& sub);

/// next(i,j) = cur(i,j) + r (cur(i-1,j) + cur(i+1,j) + cur(i,j-1) + cur(i,j+1) - 4 cur(i,j))
/// over the interior, row-major order. The halo of `next` is untouched.
void ftcs_step(const Eigen::Ref<const Field>& cur, Eigen::Ref<Field> next, double r);

/// ftcs_step on the current buffer, then swap buffers.
void step(Rank& rank, Subdomain& sub, double r);

void check_stability(double r);

struct HeatOptions {
    pgas::CompletionPolicy completion = pgas::CompletionPolicy::eager;
    std::uint64_t completion_seed = 0;
    bool check_overlap = false;
};

struct HeatRunReport {
    int steps = 0;
    ProcessGrid grid;
    Index M = 0, N = 0;
    double total_seconds = 0.0;
    double avg_seconds_per_step = 0.0;
    /// Sum over interior cells in global row-major order.
    double checksum = 0.0;
    pgas::CommStats measured;
    pgas::PairVolume predicted;
    bool volume_match = false;
    /// Final global interior field, M x N.
    Field field;
};

/// Predicted halo bytes per step per ordered pair: neighbor rows n*8, columns m*8.
pgas::PairVolume halo_volume_model(const std::vector<SubdomainGeometry>& geos, int ranks);

/// Runs { halo_exchange; step } `steps` times.
HeatRunReport run_heat(Index M, Index N, int steps, const ProcessGrid& grid, double r,
                       const InitSpec& init, const HeatOptions& options = {});

} // namespace minipgas::heat

#endif // MINIPGAS_HEAT_HEAT_HPP
