#pragma once

#include <filesystem>

#include "specoarse/sparse.hpp"

namespace specoarse {

/// Raw contents of a Matrix Market coordinate file. Symmetric files are
/// expanded to full storage.
struct MarketFile {
  SparseMatrix matrix;
  int unit_exponent = 0;  ///< from a `%unit_exponent: <int>` comment, 0 when absent
  bool symmetric = false;
  bool pattern = false;
};

MarketFile read_market(const std::filesystem::path& path);

/// Square, exactly symmetric matrix (symmetric or general storage).
SparseSymMatrix read_sym_matrix(const std::filesystem::path& path);
/// Diagonal-only matrix with non-negative entries; diagonal slots that are
/// absent read as 0.
DiagonalMass read_mass(const std::filesystem::path& path);
SparsityPattern read_pattern(const std::filesystem::path& path);

/// Symmetric storage (lower triangle), values printed round-trip exact.
void write_market(const SparseSymMatrix& a, const std::filesystem::path& path);
void write_market(const DiagonalMass& m, const std::filesystem::path& path);
/// General (possibly rectangular) storage.
void write_market(const SparseMatrix& a, const std::filesystem::path& path, int unit_exponent = 0);
void write_pattern(const SparsityPattern& p, const std::filesystem::path& path);

}  // namespace specoarse
