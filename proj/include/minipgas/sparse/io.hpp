#ifndef MINIPGAS_SPARSE_IO_HPP
#define MINIPGAS_SPARSE_IO_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "minipgas/sparse/coo.hpp"

namespace minipgas::sparse {

/// Banded random matrix: diagonal in [1, 2), up to `r_nz` distinct
/// off-diagonal columns within +-bandwidth of each row, values in [-1, 1)
/// excluding 0. Deterministic in `seed`.
CooMatrix generate_synthetic(Index n, Index r_nz, Index bandwidth, std::uint64_t seed);

/// Coordinate real general/symmetric Matrix Market. Symmetric input is
/// expanded to full storage.
CooMatrix read_matrix_market(std::istream& in);
CooMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes `general` coordinate format with 17 significant digits.
void write_matrix_market(std::ostream& out, const CooMatrix& coo);
void write_matrix_market(const std::filesystem::path& path, const CooMatrix& coo);

} // namespace minipgas::sparse

#endif // MINIPGAS_SPARSE_IO_HPP
