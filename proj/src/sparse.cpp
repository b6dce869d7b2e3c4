#include "specoarse/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "specoarse/error.hpp"

namespace specoarse {

void canonicalize(SparseMatrix& a) {
  a.prune([](Index, Index, double v) { return v != 0.0; });
  a.makeCompressed();
}

SparseMatrix spmm(const SparseMatrix& a, const SparseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw InputError("spmm: inner dimensions differ (" + std::to_string(a.rows()) + "x" +
                     std::to_string(a.cols()) + " times " + std::to_string(b.rows()) + "x" +
                     std::to_string(b.cols()) + ")");
  }
  SparseMatrix c = a * b;
  canonicalize(c);
  return c;
}

// ---------------------------------------------------------------------------
// SparseSymMatrix

SparseSymMatrix SparseSymMatrix::from_symmetric_triplets(Index n, std::span<const Triplet> entries,
                                                         int unit_exponent) {
  if (n <= 0) throw InputError("sparse matrix dimension must be positive");
  std::vector<Triplet> full;
  full.reserve(entries.size() * 2);
  for (const auto& t : entries) {
    if (t.row() < 0 || t.col() < 0 || t.row() >= n || t.col() >= n) {
      throw InputError("entry (" + std::to_string(t.row()) + ", " + std::to_string(t.col()) +
                       ") outside a " + std::to_string(n) + "x" + std::to_string(n) + " matrix");
    }
    full.push_back(t);
    if (t.row() != t.col()) full.emplace_back(t.col(), t.row(), t.value());
  }
  SparseSymMatrix out;
  out.matrix_.resize(n, n);
  out.matrix_.setFromTriplets(full.begin(), full.end());
  canonicalize(out.matrix_);
  out.unit_exponent_ = unit_exponent;
  return out;
}

SparseSymMatrix SparseSymMatrix::from_matrix(SparseMatrix full, int unit_exponent) {
  if (full.rows() != full.cols() || full.rows() == 0) {
    throw InputError("symmetric matrix must be square and non-empty");
  }
  canonicalize(full);
  const SparseMatrix t = full.transpose();
  for (Index j = 0; j < full.outerSize(); ++j) {
    SparseMatrix::InnerIterator a(full, j);
    SparseMatrix::InnerIterator b(t, j);
    for (; a && b; ++a, ++b) {
      if (a.row() != b.row() || a.value() != b.value()) {
        throw InputError("matrix is not symmetric near (" + std::to_string(a.row()) + ", " +
                         std::to_string(j) + ")");
      }
    }
    if (a || b) throw InputError("matrix is not symmetric in column " + std::to_string(j));
  }
  SparseSymMatrix out;
  out.matrix_ = std::move(full);
  out.unit_exponent_ = unit_exponent;
  return out;
}

SparseSymMatrix SparseSymMatrix::symmetrize(const SparseMatrix& a, int unit_exponent) {
  if (a.rows() != a.cols()) throw InputError("symmetrize: matrix must be square");
  SparseMatrix s = 0.5 * (a + SparseMatrix(a.transpose()));
  canonicalize(s);
  SparseSymMatrix out;
  out.matrix_ = std::move(s);
  out.unit_exponent_ = unit_exponent;
  return out;
}

double SparseSymMatrix::max_abs() const {
  double m = 0.0;
  for (Index k = 0; k < matrix_.nonZeros(); ++k) m = std::max(m, std::abs(matrix_.valuePtr()[k]));
  return m;
}

double SparseSymMatrix::trace() const {
  double t = 0.0;
  for (Index j = 0; j < matrix_.outerSize(); ++j) t += matrix_.coeff(j, j);
  return t;
}

std::vector<Triplet> SparseSymMatrix::upper_entries() const {
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(matrix_.nonZeros() / 2 + dim()));
  for (Index j = 0; j < matrix_.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(matrix_, j); it; ++it) {
      if (it.row() <= j) out.emplace_back(it.row(), j, it.value());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// DiagonalMass

DiagonalMass::DiagonalMass(Vector diag, int unit_exponent)
    : diag_(std::move(diag)), unit_exponent_(unit_exponent) {
  for (Index i = 0; i < diag_.size(); ++i) {
    if (!std::isfinite(diag_[i]) || diag_[i] < 0.0) {
      throw InputError("mass entry " + std::to_string(i) + " is negative or non-finite");
    }
  }
}

bool DiagonalMass::strictly_positive() const { return diag_.size() > 0 && (diag_.array() > 0.0).all(); }

void DiagonalMass::require_positive(const char* what) const {
  for (Index i = 0; i < diag_.size(); ++i) {
    if (!(diag_[i] > 0.0)) {
      throw InputError(std::string(what) + ": mass entry " + std::to_string(i) +
                       " is not strictly positive");
    }
  }
}

// ---------------------------------------------------------------------------
// SparsityPattern

SparsityPattern SparsityPattern::from_positions(Index rows, Index cols,
                                                std::vector<std::pair<Index, Index>> positions) {
  for (const auto& [i, j] : positions) {
    if (i < 0 || j < 0 || i >= rows || j >= cols) {
      throw InputError("pattern position (" + std::to_string(i) + ", " + std::to_string(j) +
                       ") out of bounds");
    }
  }
  std::sort(positions.begin(), positions.end());
  positions.erase(std::unique(positions.begin(), positions.end()), positions.end());
  SparsityPattern p(rows, cols);
  p.col_idx_.reserve(positions.size());
  for (const auto& [i, j] : positions) {
    ++p.row_ptr_[i + 1];
    p.col_idx_.push_back(j);
  }
  for (Index i = 0; i < rows; ++i) p.row_ptr_[i + 1] += p.row_ptr_[i];
  return p;
}

SparsityPattern SparsityPattern::of(const SparseMatrix& a) {
  std::vector<std::pair<Index, Index>> pos;
  pos.reserve(static_cast<std::size_t>(a.nonZeros()));
  for (Index j = 0; j < a.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      if (it.value() != 0.0) pos.emplace_back(it.row(), j);
    }
  }
  return from_positions(a.rows(), a.cols(), std::move(pos));
}

SparsityPattern SparsityPattern::identity(Index n) {
  SparsityPattern p(n, n);
  p.col_idx_.resize(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) {
    p.row_ptr_[i + 1] = i + 1;
    p.col_idx_[i] = i;
  }
  return p;
}

bool SparsityPattern::contains(Index i, Index j) const { return position(i, j) >= 0; }

Index SparsityPattern::position(Index i, Index j) const {
  if (i < 0 || i >= rows_) return -1;
  const auto r = row(i);
  const auto it = std::lower_bound(r.begin(), r.end(), j);
  if (it == r.end() || *it != j) return -1;
  return row_ptr_[i] + (it - r.begin());
}

bool SparsityPattern::is_symmetric() const {
  if (rows_ != cols_) return false;
  return *this == transpose();
}

SparsityPattern SparsityPattern::transpose() const {
  SparsityPattern t(cols_, rows_);
  for (Index j : col_idx_) ++t.row_ptr_[j + 1];
  for (Index i = 0; i < cols_; ++i) t.row_ptr_[i + 1] += t.row_ptr_[i];
  t.col_idx_.resize(col_idx_.size());
  std::vector<Index> fill(t.row_ptr_.begin(), t.row_ptr_.end() - 1);
  for (Index i = 0; i < rows_; ++i) {
    for (Index j : row(i)) t.col_idx_[fill[j]++] = i;
  }
  return t;
}

SparsityPattern SparsityPattern::with_diagonal() const {
  std::vector<std::pair<Index, Index>> pos;
  pos.reserve(col_idx_.size() + static_cast<std::size_t>(rows_));
  for (Index i = 0; i < rows_; ++i) {
    for (Index j : row(i)) pos.emplace_back(i, j);
    if (i < cols_) pos.emplace_back(i, i);
  }
  return from_positions(rows_, cols_, std::move(pos));
}

SparseMatrix SparsityPattern::to_matrix() const {
  std::vector<Triplet> t;
  t.reserve(col_idx_.size());
  for (Index i = 0; i < rows_; ++i) {
    for (Index j : row(i)) t.emplace_back(i, j, 1.0);
  }
  SparseMatrix a(rows_, cols_);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return a;
}

SparsityPattern pattern_product(const SparsityPattern& a, const SparsityPattern& b) {
  if (a.cols() != b.rows()) {
    throw InputError("pattern_product: inner dimensions differ (" + std::to_string(a.cols()) +
                     " vs " + std::to_string(b.rows()) + ")");
  }
  std::vector<std::pair<Index, Index>> pos;
  std::vector<Index> marker(static_cast<std::size_t>(b.cols()), -1);
  std::vector<Index> row_cols;
  for (Index i = 0; i < a.rows(); ++i) {
    row_cols.clear();
    for (Index t : a.row(i)) {
      for (Index j : b.row(t)) {
        if (marker[j] != i) {
          marker[j] = i;
          row_cols.push_back(j);
        }
      }
    }
    for (Index j : row_cols) pos.emplace_back(i, j);
  }
  return SparsityPattern::from_positions(a.rows(), b.cols(), std::move(pos));
}

double weighted_frobenius_sq(const DenseMatrix& x, const DiagonalMass& w) {
  if (w.dim() != x.rows()) {
    throw InputError("weighted_frobenius_sq: weight dimension " + std::to_string(w.dim()) +
                     " != rows " + std::to_string(x.rows()));
  }
  return (x.array().square().colwise() * w.diag().array()).sum();
}

}  // namespace specoarse
