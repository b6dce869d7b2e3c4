#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>

#include "specoarse/sparse.hpp"

namespace specoarse {

/// k generalized eigenpairs of L Φ = M Φ Λ, ascending, M-orthonormal and
/// sign-canonical. The first null_dim columns span the numerical null space.
struct EigenBasis {
  Vector values;
  DenseMatrix vectors;
  Index null_dim = 0;
  DiagonalMass mass;

  Index k() const { return values.size(); }
  Index n() const { return vectors.rows(); }
  DenseMatrix null_vectors() const { return vectors.leftCols(null_dim); }
  /// Copy restricted to the first `count` pairs (null_dim recomputed).
  EigenBasis leading(Index count) const;
};

struct EigenOptions {
  std::uint64_t seed = 0;
  /// Ritz residual tolerance, relative to the shifted-inverted eigenvalue.
  double tol = 1e-10;
  /// Block width; the solver resolves eigenvalue multiplicities up to it.
  Index block_size = 6;
  /// 0 selects min(n, max(2k + 1, 20)).
  Index krylov_dim = 0;
  /// 0 selects 30·k restarts.
  int max_restarts = 0;
  /// Defaults to −1e-6 · tr(M⁻¹L)/n.
  std::optional<double> shift;
};

/// 1e-8 · max(|λ_last|, 1).
double zero_threshold(const Vector& values);
/// Leading count of values with |λ| ≤ zero_threshold(values).
Index null_dimension(const Vector& values);

/// Flips each column so its largest-magnitude entry (lowest index on ties)
/// is positive.
void canonicalize_signs(DenseMatrix& vectors);

/// Smallest k eigenpairs by block shift-invert Lanczos on M^{-1/2} L M^{-1/2}
/// with thick restarts and full reorthogonalization. Problems whose Krylov
/// space would cover the whole space are solved densely. Throws InputError on
/// bad shapes or k ≥ n, NumericalError when the iteration does not converge
/// or the shifted operator is not positive definite.
EigenBasis smallest_k(const SparseSymMatrix& L, const DiagonalMass& M, Index k,
                      const EigenOptions& options = {});

/// Extreme generalized eigenvalues with a PSD verdict: min ≥ −rel_tol · max.
/// Dense for n ≤ 1500; otherwise max comes from Lanczos and the verdict from
/// the inertia of L + rel_tol·max·M (min is then only a bound).
struct SpectralBounds {
  double min = 0.0;
  double max = 0.0;
  bool psd = false;
  bool exact_min = false;
};
SpectralBounds spectral_bounds(const SparseSymMatrix& L, const DiagonalMass& M, double rel_tol = 1e-8);

void write_eigenvalues_csv(const Vector& values, const std::filesystem::path& path);
void write_eigenvectors_csv(const DenseMatrix& vectors, const std::filesystem::path& path);

}  // namespace specoarse
