#pragma once

#include <filesystem>
#include <vector>

#include "specoarse/combinatorial.hpp"
#include "specoarse/eigen_solver.hpp"
#include "specoarse/sparse.hpp"

namespace specoarse {

struct OptimizerConfig {
  double gamma = 0.02;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  int stall_window = 10;
  int max_iters = 1000;
  /// An energy counts as an improvement when below best · (1 − stall_rel_tol).
  double stall_rel_tol = 1e-12;

  /// Throws InputError when a field is out of range.
  void validate() const;
};

/// Sparse n×m matrix whose values live exactly on a fixed pattern.
struct InterpolationMatrix {
  SparsityPattern pattern;
  std::vector<double> values;  ///< aligned with the pattern's flat positions

  Index rows() const { return pattern.rows(); }
  Index cols() const { return pattern.cols(); }
  SparseMatrix to_matrix() const;
  DenseMatrix dense() const;

  /// Zero values on the pattern.
  static InterpolationMatrix zeros(SparsityPattern pattern);
  /// Kᵀ on S_G: G(v, cluster_of[v]) = 1. Throws if S_G lacks those slots.
  static InterpolationMatrix from_assignment(const CoarseningAssignment& a, SparsityPattern pattern);
};

/// Quantities fixed over one optimization run.
struct Precomputation {
  SparseMatrix L;
  DiagonalMass coarse_mass;  ///< M̃ = K M Kᵀ
  DenseMatrix A;             ///< P M⁻¹ L Φ, m×k
  DenseMatrix B;             ///< P Φ, m×k
  DenseMatrix restricted_null;  ///< P Φ₀, m×null_dim
  DenseMatrix null_vectors;     ///< Φ₀, n×null_dim
};

Precomputation precompute(const SparseSymMatrix& L, const DiagonalMass& M, const CoarseningAssignment& a,
                          const EigenBasis& basis);

/// ½ ‖A − M̃⁻¹ GᵀLG B‖²_M̃.
double energy(const InterpolationMatrix& G, const Precomputation& pre);

/// ∂E/∂G on the pattern of G: (LG)ᵢ· Z·ⱼ with Z = −(B Rᵀ + R Bᵀ) and
/// R = A − M̃⁻¹ GᵀLG B.
std::vector<double> sparse_gradient(const InterpolationMatrix& G, const Precomputation& pre);

/// Nearest pattern-respecting G (entrywise Euclidean) with G·PΦ₀ = Φ₀.
/// Throws NumericalError naming the first row whose constraint is rank
/// deficient on its support.
void project_nullspace(InterpolationMatrix& G, const DenseMatrix& restricted_null, const DenseMatrix& null_vectors);

struct NadamState {
  std::vector<double> m;
  std::vector<double> v;
  int t = 0;
};

/// One NADAM update direction; advances state. The caller applies G −= γΔ.
std::vector<double> nadam_step(const std::vector<double>& grad, NadamState& state, const OptimizerConfig& config);

struct EnergyRecord {
  int iteration = 0;
  double energy = 0.0;
  double best_energy = 0.0;
};

struct CoarsenedOperator {
  SparseSymMatrix L;
  DiagonalMass M;
  InterpolationMatrix G;
  CoarseningAssignment assignment;
  std::vector<EnergyRecord> trace;
  double initial_energy = 0.0;  ///< at the projected Kᵀ start
  double final_energy = 0.0;    ///< best energy, the one G achieves
  int iterations = 0;
  bool stalled = false;  ///< stopped by the stall rule rather than max_iters
};

/// L̃ = (GᵀLG + (GᵀLG)ᵀ)/2 restricted to `coarse_pattern`, M̃ = KMKᵀ.
/// Throws NumericalError when GᵀLG has an entry outside the pattern larger
/// than 1e-12 · max|L̃|.
CoarsenedOperator assemble_coarse(const InterpolationMatrix& G, const SparseSymMatrix& L,
                                  const CoarseningAssignment& a, const DiagonalMass& M,
                                  const SparsityPattern& coarse_pattern);

/// Projected NADAM descent on the energy from G = Kᵀ; returns the best
/// iterate. Throws NumericalError on divergence.
CoarsenedOperator optimize(const SparseSymMatrix& L, const DiagonalMass& M, const CoarseningAssignment& a,
                           const CoarsePatterns& patterns, const EigenBasis& basis,
                           const OptimizerConfig& config = {});

/// Columns iteration,energy,best_energy.
void write_energy_csv(const std::vector<EnergyRecord>& trace, const std::filesystem::path& path);

}  // namespace specoarse
