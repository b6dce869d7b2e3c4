#include "specoarse/pipeline.hpp"

#include <string>

#include "specoarse/error.hpp"
#include "specoarse/rng.hpp"

namespace specoarse {

std::string small_m_warning(Index m, Index k) {
  if (m > 2 * k) return {};
  return "m = " + std::to_string(m) + " is not above 2k = " + std::to_string(2 * k) +
         "; coarsening works best with m > k × 2";
}

CoarseningResult coarsen(const SparseSymMatrix& L, const DiagonalMass& M, Index m, Index k,
                         const PipelineConfig& config) {
  const Index n = L.dim();
  if (M.dim() != n) {
    throw InputError("L is " + std::to_string(n) + "x" + std::to_string(n) + " but M is " +
                     std::to_string(M.dim()) + "x" + std::to_string(M.dim()));
  }
  if (m < 1 || m > n) throw InputError("m must lie in [1, n] (m = " + std::to_string(m) + ", n = " + std::to_string(n) + ")");
  if (k < 1 || k >= n) throw InputError("k must lie in [1, n) (k = " + std::to_string(k) + ")");
  if (m <= 2 * k && !config.allow_small_m) throw InputError(small_m_warning(m, k));

  const EdgeDistanceGraph graph = edge_distances(L, M, config.dist_exponent);
  KMedioidsResult medioids;
  if (m == n) {
    medioids.assignment = CoarseningAssignment::identity(n);
    medioids.objective.push_back(0.0);
    medioids.converged = true;
  } else {
    medioids = kmedioids(graph, m, stage_seed(config.seed, Stage::kMedioidInit, config.level), config.medioid_iters);
  }

  EigenOptions eo = config.eigen;
  eo.seed = stage_seed(config.seed, Stage::kFineEigen, config.level);
  const EigenBasis fine = smallest_k(L, M, k, eo);

  CoarseningResult result = coarsen_with_assignment(L, M, medioids.assignment, fine, config);
  result.medioids = std::move(medioids);
  if (const Index z = graph.zero_weight_edges(); z > 0) {
    result.warnings.insert(result.warnings.begin(),
                           std::to_string(z) + " edges have zero distance (positive off-diagonals in L)");
  }
  return result;
}

CoarseningResult coarsen_with_assignment(const SparseSymMatrix& L, const DiagonalMass& M,
                                         const CoarseningAssignment& assignment, const EigenBasis& fine_basis,
                                         const PipelineConfig& config) {
  assignment.validate();
  CoarseningResult result;
  result.assignment = assignment;
  result.medioids.assignment = assignment;
  result.fine_basis = fine_basis;
  const Index m = assignment.m;
  const Index k = fine_basis.k();
  if (auto w = small_m_warning(m, k); !w.empty()) result.warnings.push_back(std::move(w));

  const SparsityPattern adjacency = cluster_adjacency(assignment, operator_pattern(L));
  result.patterns = sparsity_patterns(assignment, adjacency);
  result.coarse = optimize(L, M, assignment, result.patterns, fine_basis, config.optimizer);
  if (!result.coarse.stalled) {
    result.warnings.push_back("optimizer reached max_iters = " + std::to_string(config.optimizer.max_iters) +
                              " without stalling");
  }

  const Index kc = std::min(k, m - 1);
  if (kc >= 1) {
    EigenOptions eo = config.eigen;
    eo.seed = stage_seed(config.seed, Stage::kCoarseEigen, config.level);
    result.coarse_basis = smallest_k(result.coarse.L, result.coarse.M, kc, eo);
    const Index fine_null = fine_basis.leading(kc).null_dim;
    if (result.coarse_basis.null_dim != fine_null) {
      result.warnings.push_back("coarse operator has " + std::to_string(result.coarse_basis.null_dim) +
                                " numerically zero eigenvalues, the input has " + std::to_string(fine_null));
    }
  }
  result.coarse_bounds = spectral_bounds(result.coarse.L, result.coarse.M);
  if (!result.coarse_bounds.psd) {
    result.warnings.push_back("coarse operator failed the numerical PSD check (min eigenvalue " +
                              std::to_string(result.coarse_bounds.min) + ")");
  }
  return result;
}

}  // namespace specoarse
