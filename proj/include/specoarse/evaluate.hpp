#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "specoarse/eigen_solver.hpp"
#include "specoarse/sparse.hpp"

namespace specoarse {

/// C = Φ̃[:, :k]ᵀ M̃ P Φ[:, :k], rows indexed by coarse modes. `roots[c]` is
/// the fine node sampled by coarse node c (the rows of P).
DenseMatrix functional_map(const EigenBasis& fine, const EigenBasis& coarse, std::span<const Index> roots,
                           const DiagonalMass& coarse_mass, Index k);

/// ‖C − diag C‖_F / ‖C‖_F on the leading square block (0 for a zero block).
double offdiag_ratio(const DenseMatrix& C);

struct ModeGroup {
  Index first = 0;
  Index size = 0;
  double score = 0.0;  ///< ‖Qaᵀ M̃ Qb‖²_F / size, in [0, 1]
};

/// Groups consecutive fine eigenvalues whose gap is at most gap_tol relative
/// to their magnitude and scores the alignment of span(PΦ_g) with span(Φ̃_g)
/// under M̃. Uses the first min(fine.k, coarse.k) modes.
std::vector<ModeGroup> grouped_alignment(const EigenBasis& fine, const EigenBasis& coarse,
                                         std::span<const Index> roots, const DiagonalMass& coarse_mass,
                                         double gap_tol = 1e-3);

struct EigenvaluePair {
  Index index = 0;
  double fine = 0.0;
  double coarse = 0.0;
  double rel_error = 0.0;  ///< |λ̃ − λ| / max(λ, first non-null λ)
};

struct EigenvalueSummary {
  double median = 0.0;
  double max = 0.0;
  Index first = 0;  ///< 0-based index range [first, last) summarized
  Index last = 0;
};

std::vector<EigenvaluePair> eigenvalue_compare(const EigenBasis& fine, const EigenBasis& coarse);
/// An empty or inverted range gives zeros. The range is clipped to the pairs.
EigenvalueSummary summarize(const std::vector<EigenvaluePair>& pairs, Index first, Index last);

/// Per-mode eigenvalue-transport check: rᵢ = ‖PM⁻¹LΦᵢ − M̃⁻¹L̃PΦᵢ‖_M̃ and the
/// Rayleigh quotient of PΦᵢ under (L̃, M̃). Then |rqᵢ − λᵢ| ≤ rᵢ/‖PΦᵢ‖_M̃.
struct TransportRecord {
  Index index = 0;
  double lambda = 0.0;
  double rayleigh = 0.0;
  double residual = 0.0;
  double norm = 0.0;  ///< ‖PΦᵢ‖_M̃
  double bound() const { return norm > 0.0 ? residual / norm : 0.0; }
};

std::vector<TransportRecord> eigen_transport(const SparseSymMatrix& L, const DiagonalMass& M,
                                             const EigenBasis& fine, const SparseSymMatrix& coarse_L,
                                             const DiagonalMass& coarse_mass, std::span<const Index> roots);

void write_matrix_csv(const DenseMatrix& C, const std::filesystem::path& path);
/// Columns index,fine,coarse,rel_error.
void write_eigenvalue_pairs_csv(const std::vector<EigenvaluePair>& pairs, const std::filesystem::path& path);

}  // namespace specoarse
