#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace specoarse {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
using SparseMatrix = Eigen::SparseMatrix<double>;
using RowSparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Triplet = Eigen::Triplet<double>;

/// Compress, sort and drop entries that are exactly 0.0 (no epsilon pruning).
void canonicalize(SparseMatrix& a);

/// Exact sparse product, canonicalized. Throws InputError on inner
/// dimension mismatch.
SparseMatrix spmm(const SparseMatrix& a, const SparseMatrix& b);

/// Sparse symmetric real matrix with a unit exponent (power of length).
///
/// Both triangles are stored so products need no special casing; the
/// constructors guarantee exact symmetry and canonical storage.
class SparseSymMatrix {
 public:
  SparseSymMatrix() = default;

  /// Each triplet (i, j, v) with i != j contributes v to both (i, j) and
  /// (j, i); duplicates are summed.
  static SparseSymMatrix from_symmetric_triplets(Index n, std::span<const Triplet> entries,
                                                 int unit_exponent = 0);

  /// Wraps a full-storage matrix. Throws InputError unless it is square and
  /// exactly symmetric.
  static SparseSymMatrix from_matrix(SparseMatrix full, int unit_exponent = 0);

  /// (a + aᵀ)/2, which is bitwise symmetric.
  static SparseSymMatrix symmetrize(const SparseMatrix& a, int unit_exponent = 0);

  Index dim() const { return matrix_.rows(); }
  int unit_exponent() const { return unit_exponent_; }
  const SparseMatrix& matrix() const { return matrix_; }
  Index nonzeros() const { return matrix_.nonZeros(); }
  double coeff(Index i, Index j) const { return matrix_.coeff(i, j); }
  double max_abs() const;
  double trace() const;

  /// Entries with row <= col, in column-major order.
  std::vector<Triplet> upper_entries() const;

 private:
  SparseMatrix matrix_;
  int unit_exponent_ = 0;
};

/// Non-negative diagonal matrix with a unit exponent.
class DiagonalMass {
 public:
  DiagonalMass() = default;
  /// Throws InputError on a negative or non-finite entry.
  explicit DiagonalMass(Vector diag, int unit_exponent = 0);

  static DiagonalMass identity(Index n) { return DiagonalMass(Vector::Ones(n), 0); }

  Index dim() const { return diag_.size(); }
  int unit_exponent() const { return unit_exponent_; }
  const Vector& diag() const { return diag_; }
  double operator[](Index i) const { return diag_[i]; }
  double total() const { return diag_.sum(); }
  bool strictly_positive() const;
  /// Throws InputError naming the first non-positive entry.
  void require_positive(const char* what) const;

 private:
  Vector diag_;
  int unit_exponent_ = 0;
};

/// Binary matrix stored as sorted compressed rows.
class SparsityPattern {
 public:
  SparsityPattern() = default;
  SparsityPattern(Index rows, Index cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Duplicates are merged; throws InputError on out-of-range positions.
  static SparsityPattern from_positions(Index rows, Index cols,
                                        std::vector<std::pair<Index, Index>> positions);
  /// Positions of the stored (nonzero) entries of a.
  static SparsityPattern of(const SparseMatrix& a);
  static SparsityPattern identity(Index n);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  Index nonzeros() const { return static_cast<Index>(col_idx_.size()); }
  std::span<const Index> row(Index i) const {
    return {col_idx_.data() + row_ptr_[i], static_cast<std::size_t>(row_ptr_[i + 1] - row_ptr_[i])};
  }
  /// Offset of row i's first entry in the flat position list.
  Index row_offset(Index i) const { return row_ptr_[i]; }
  bool contains(Index i, Index j) const;
  /// Flat position of (i, j), or -1 when absent.
  Index position(Index i, Index j) const;
  bool is_symmetric() const;

  SparsityPattern transpose() const;
  /// Same pattern with every (i, i) present (square only).
  SparsityPattern with_diagonal() const;
  /// Real matrix with value 1 at every position.
  SparseMatrix to_matrix() const;

  bool operator==(const SparsityPattern&) const = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_ptr_{0};
  std::vector<Index> col_idx_;
};

/// Boolean matrix product: (i, j) present iff some t has (i, t) in a and
/// (t, j) in b.
SparsityPattern pattern_product(const SparsityPattern& a, const SparsityPattern& b);

/// tr(xᵀ W x) = Σᵢⱼ wᵢ xᵢⱼ².
double weighted_frobenius_sq(const DenseMatrix& x, const DiagonalMass& w);

}  // namespace specoarse
