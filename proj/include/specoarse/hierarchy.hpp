#pragma once

#include <vector>

#include "specoarse/pipeline.hpp"

namespace specoarse {

struct HierarchyConfig {
  /// Target sizes, strictly descending. A leading entry equal to n is a
  /// no-op level.
  std::vector<Index> sizes;
  /// One shared k or one per coarse level.
  std::vector<Index> ks;
  PipelineConfig pipeline;
  /// Permit levels with m ≤ 2k.
  bool allow_small_m = false;
};

struct HierarchyLevel {
  Index size = 0;
  Index k = 0;
  CoarseningResult result;
  /// Level-0 node sampled by each node of this level (rows of P_total).
  std::vector<Index> roots_total;
  /// Φ̃_ℓᵀ M̃_ℓ P_total Φ_0 over min(k_0, k_ℓ) modes.
  DenseMatrix composed_map;
  double composed_offdiag = 0.0;
};

struct Hierarchy {
  SparseSymMatrix L0;
  DiagonalMass M0;
  EigenBasis basis0;  ///< computed only when there is a coarse level
  std::vector<HierarchyLevel> levels;  ///< coarse levels 1, 2, ...

  std::size_t num_levels() const { return levels.size() + 1; }
  const SparseSymMatrix& L(std::size_t level) const { return level == 0 ? L0 : levels[level - 1].result.coarse.L; }
  const DiagonalMass& M(std::size_t level) const { return level == 0 ? M0 : levels[level - 1].result.coarse.M; }
};

/// Applies the pipeline recursively, re-solving the eigenproblem on every
/// level. Errors carry the failing level index.
Hierarchy build_hierarchy(const SparseSymMatrix& L, const DiagonalMass& M, const HierarchyConfig& config);

}  // namespace specoarse
