#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "specoarse/combinatorial.hpp"
#include "specoarse/eigen_solver.hpp"
#include "specoarse/optimize.hpp"

namespace specoarse {

struct PipelineConfig {
  std::uint64_t seed = 0;
  /// Level index mixed into stage seeds (hierarchies).
  std::uint64_t level = 0;
  std::optional<double> dist_exponent;
  int medioid_iters = kDefaultMedioidIterations;
  OptimizerConfig optimizer;
  EigenOptions eigen;  ///< seed is overwritten per stage
  /// Allow m ≤ 2k (a warning is still recorded).
  bool allow_small_m = true;
};

/// Everything produced by one run of combinatorial coarsening followed by
/// operator optimization.
struct CoarseningResult {
  CoarseningAssignment assignment;
  KMedioidsResult medioids;
  CoarsePatterns patterns;
  EigenBasis fine_basis;
  CoarsenedOperator coarse;
  EigenBasis coarse_basis;  ///< smallest k pairs of (L̃, M̃), k clipped below m
  SpectralBounds coarse_bounds;
  std::vector<std::string> warnings;
};

/// The m ≤ 2k guidance text, or empty when m > 2k.
std::string small_m_warning(Index m, Index k);

/// Runs both stages on (L, M): k-medioids with m roots, fine eigenbasis of
/// size k, NADAM optimization, then a coarse eigensolve for diagnostics.
/// m == n uses the identity assignment.
CoarseningResult coarsen(const SparseSymMatrix& L, const DiagonalMass& M, Index m, Index k,
                         const PipelineConfig& config = {});

/// Optimization and diagnostics for a given assignment (skips k-medioids).
CoarseningResult coarsen_with_assignment(const SparseSymMatrix& L, const DiagonalMass& M,
                                         const CoarseningAssignment& assignment, const EigenBasis& fine_basis,
                                         const PipelineConfig& config = {});

}  // namespace specoarse
