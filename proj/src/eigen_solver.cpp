#include "specoarse/eigen_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include "specoarse/error.hpp"
#include "specoarse/rng.hpp"

namespace specoarse {

EigenBasis EigenBasis::leading(Index count) const {
  EigenBasis out;
  out.values = values.head(count);
  out.vectors = vectors.leftCols(count);
  out.null_dim = null_dimension(out.values);
  out.mass = mass;
  return out;
}

double zero_threshold(const Vector& values) {
  const double last = values.size() > 0 ? std::abs(values[values.size() - 1]) : 0.0;
  return 1e-8 * std::max(last, 1.0);
}

Index null_dimension(const Vector& values) {
  const double thr = zero_threshold(values);
  Index count = 0;
  while (count < values.size() && std::abs(values[count]) <= thr) ++count;
  return count;
}

void canonicalize_signs(DenseMatrix& vectors) {
  for (Index c = 0; c < vectors.cols(); ++c) {
    Index best = 0;
    for (Index r = 1; r < vectors.rows(); ++r) {
      if (std::abs(vectors(r, c)) > std::abs(vectors(best, c))) best = r;
    }
    if (vectors.rows() > 0 && vectors(best, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

namespace {

DenseMatrix random_block(Index n, Index b, std::mt19937_64& rng) {
  DenseMatrix x(n, b);
  for (Index j = 0; j < b; ++j) {
    for (Index i = 0; i < n; ++i) x(i, j) = uniform_symmetric(rng);
  }
  return x;
}

// Orthonormalizes the columns of x against q and against each other (block
// classical Gram-Schmidt, twice). Columns that collapse are replaced by
// random directions.
void orthonormalize(const Eigen::Ref<const DenseMatrix>& q, DenseMatrix& x, std::mt19937_64& rng) {
  const Index n = x.rows();
  const Vector before = x.colwise().norm();
  for (int pass = 0; pass < 2 && q.cols() > 0; ++pass) x -= q * (q.transpose() * x);
  for (Index c = 0; c < x.cols(); ++c) {
    Vector v = x.col(c);
    double ref = before[c];
    for (int attempt = 0;; ++attempt) {
      for (int pass = 0; pass < 2; ++pass) {
        if (attempt > 0 && q.cols() > 0) v -= q * (q.transpose() * v);
        for (Index d = 0; d < c; ++d) v -= x.col(d).dot(v) * x.col(d);
      }
      const double nv = v.norm();
      if (nv > 1e-10 * ref && nv > 0.0) {
        x.col(c) = v / nv;
        break;
      }
      if (attempt > 8 || q.cols() + c >= n) {
        throw NumericalError("eigensolver: cannot extend the Krylov basis");
      }
      v = random_block(n, 1, rng);
      ref = v.norm();
    }
  }
}

EigenBasis finalize(const SparseSymMatrix& L, const DiagonalMass& M, DenseMatrix phi) {
  const Index k = phi.cols();
  Vector rq(k);
  for (Index j = 0; j < k; ++j) {
    const Vector lphi = L.matrix() * phi.col(j);
    const double mnorm = (phi.col(j).array().square() * M.diag().array()).sum();
    rq[j] = phi.col(j).dot(lphi) / mnorm;
  }
  std::vector<Index> order(static_cast<std::size_t>(k));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return rq[a] < rq[b]; });
  EigenBasis out;
  out.values.resize(k);
  out.vectors.resize(phi.rows(), k);
  for (Index j = 0; j < k; ++j) {
    out.values[j] = rq[order[j]];
    out.vectors.col(j) = phi.col(order[j]);
  }
  canonicalize_signs(out.vectors);
  out.null_dim = null_dimension(out.values);
  out.mass = M;
  return out;
}

EigenBasis solve_dense(const SparseSymMatrix& L, const DiagonalMass& M, Index k) {
  const Vector inv_sqrt = M.diag().cwiseSqrt().cwiseInverse();
  const DenseMatrix c = inv_sqrt.asDiagonal() * DenseMatrix(L.matrix()) * inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (c + c.transpose()));
  if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
  return finalize(L, M, inv_sqrt.asDiagonal() * es.eigenvectors().leftCols(k));
}

void check_inputs(const SparseSymMatrix& L, const DiagonalMass& M) {
  if (M.dim() != L.dim()) {
    throw InputError("operator is " + std::to_string(L.dim()) + "x" + std::to_string(L.dim()) +
                     " but mass has dimension " + std::to_string(M.dim()));
  }
  M.require_positive("eigensolver");
}

}  // namespace

EigenBasis smallest_k(const SparseSymMatrix& L, const DiagonalMass& M, Index k, const EigenOptions& options) {
  check_inputs(L, M);
  const Index n = L.dim();
  if (k < 1 || k >= n) {
    throw InputError("requested " + std::to_string(k) + " eigenpairs of a " + std::to_string(n) +
                     "-dimensional problem (need 1 <= k < n)");
  }
  const Index b = std::clamp<Index>(options.block_size, 1, n);
  Index ncv = options.krylov_dim > 0 ? options.krylov_dim : std::min(n, std::max<Index>(2 * k + 1, 20));
  ncv = std::max(ncv, k + 3 * b);
  if (ncv + b >= n) return solve_dense(L, M, k);

  const Vector sqrt_m = M.diag().cwiseSqrt();
  double sigma;
  if (options.shift) {
    sigma = *options.shift;
  } else {
    double tr = 0.0;
    for (Index i = 0; i < n; ++i) tr += L.coeff(i, i) / M[i];
    sigma = tr > 0.0 ? -1e-6 * tr / static_cast<double>(n) : -1e-6;
  }

  SparseMatrix shifted = L.matrix();
  {
    SparseMatrix diag(n, n);
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) t.emplace_back(i, i, -sigma * M[i]);
    diag.setFromTriplets(t.begin(), t.end());
    shifted += diag;
  }
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) {
    throw NumericalError("shifted operator L - sigma*M is not positive definite (sigma = " +
                         std::to_string(sigma) + "); is L positive semi-definite?");
  }
  // Symmetric operator (C - σI)^{-1} with C = M^{-1/2} L M^{-1/2}.
  auto apply = [&](const DenseMatrix& x) -> DenseMatrix {
    const DenseMatrix rhs = sqrt_m.asDiagonal() * x;
    const DenseMatrix y = ldlt.solve(rhs);
    return sqrt_m.asDiagonal() * y;
  };

  std::mt19937_64 rng(options.seed);
  const Index cap = (ncv / b) * b;
  DenseMatrix V(n, cap), W(n, cap);
  Index cols = 0;

  auto append = [&](DenseMatrix block) {
    orthonormalize(V.leftCols(cols), block, rng);
    V.middleCols(cols, b) = block;
    W.middleCols(cols, b) = apply(block);
    cols += b;
  };

  append(random_block(n, b, rng));

  const int max_restarts = options.max_restarts > 0 ? options.max_restarts : static_cast<int>(30 * k);
  DenseMatrix ritz;
  bool converged = false;
  for (int restart = 0; restart <= max_restarts; ++restart) {
    while (cols + b <= cap) append(W.middleCols(cols - b, b));

    const DenseMatrix h = V.leftCols(cols).transpose() * W.leftCols(cols);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (h + h.transpose()));
    if (es.info() != Eigen::Success) throw NumericalError("Rayleigh-Ritz eigensolve failed");
    // descending θ
    const Vector evals = es.eigenvalues().reverse();
    const DenseMatrix evecs = es.eigenvectors().rowwise().reverse();

    const DenseMatrix yk = evecs.leftCols(k);
    const DenseMatrix vy = V.leftCols(cols) * yk;
    const DenseMatrix res = W.leftCols(cols) * yk - vy * evals.head(k).asDiagonal();
    const double theta_max = std::abs(evals[0]);
    converged = true;
    for (Index i = 0; i < k; ++i) {
      const double scale = std::max(std::abs(evals[i]), 1e-4 * theta_max);
      if (!(res.col(i).norm() <= options.tol * scale)) {
        converged = false;
        break;
      }
    }
    if (converged) {
      ritz = vy;
      break;
    }

    // thick restart: keep leading Ritz vectors plus the next Krylov block
    const Index keep = std::min(cols - b, k + (cols - k) / 2);
    DenseMatrix next = W.middleCols(cols - b, b);
    for (int pass = 0; pass < 2; ++pass) next -= V.leftCols(cols) * (V.leftCols(cols).transpose() * next);
    const DenseMatrix ykeep = evecs.leftCols(keep);
    const DenseMatrix v_new = V.leftCols(cols) * ykeep;
    const DenseMatrix w_new = W.leftCols(cols) * ykeep;
    V.leftCols(keep) = v_new;
    W.leftCols(keep) = w_new;
    cols = keep;
    append(std::move(next));
  }
  if (!converged) {
    throw NumericalError("eigensolver did not converge within " + std::to_string(max_restarts) + " restarts");
  }
  const Vector inv_sqrt = sqrt_m.cwiseInverse();
  return finalize(L, M, inv_sqrt.asDiagonal() * ritz);
}

SpectralBounds spectral_bounds(const SparseSymMatrix& L, const DiagonalMass& M, double rel_tol) {
  check_inputs(L, M);
  const Index n = L.dim();
  const Vector inv_sqrt = M.diag().cwiseSqrt().cwiseInverse();
  SpectralBounds out;
  if (n <= 1500) {
    const DenseMatrix c = inv_sqrt.asDiagonal() * DenseMatrix(L.matrix()) * inv_sqrt.asDiagonal();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(0.5 * (c + c.transpose()), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw NumericalError("dense eigensolve failed");
    out.min = es.eigenvalues()[0];
    out.max = es.eigenvalues()[n - 1];
    out.exact_min = true;
    out.psd = out.min >= -rel_tol * std::abs(out.max);
    return out;
  }
  // Largest eigenvalue by Lanczos with full reorthogonalization.
  const Index steps = std::min<Index>(n, 80);
  DenseMatrix q(n, steps);
  std::mt19937_64 rng(0x5eed);
  Vector v = random_block(n, 1, rng);
  v.normalize();
  Vector alpha(steps), beta(steps);
  Index used = 0;
  for (Index j = 0; j < steps; ++j) {
    q.col(j) = v;
    Vector w = inv_sqrt.asDiagonal() * (L.matrix() * (inv_sqrt.asDiagonal() * v));
    alpha[j] = v.dot(w);
    for (int pass = 0; pass < 2; ++pass) w -= q.leftCols(j + 1) * (q.leftCols(j + 1).transpose() * w);
    used = j + 1;
    beta[j] = w.norm();
    if (beta[j] < 1e-12 * std::abs(alpha[j])) break;
    v = w / beta[j];
  }
  DenseMatrix t = DenseMatrix::Zero(used, used);
  for (Index j = 0; j < used; ++j) {
    t(j, j) = alpha[j];
    if (j + 1 < used) t(j, j + 1) = t(j + 1, j) = beta[j];
  }
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(t, Eigen::EigenvaluesOnly);
  out.max = es.eigenvalues()[used - 1];
  const double tau = rel_tol * std::abs(out.max);
  SparseMatrix shifted = L.matrix();
  {
    SparseMatrix diag(n, n);
    std::vector<Triplet> tr;
    for (Index i = 0; i < n; ++i) tr.emplace_back(i, i, tau * M[i]);
    diag.setFromTriplets(tr.begin(), tr.end());
    shifted += diag;
  }
  Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt(shifted);
  out.psd = ldlt.info() == Eigen::Success && (ldlt.vectorD().array() > 0.0).all();
  out.min = -tau;
  out.exact_min = false;
  return out;
}

void write_eigenvalues_csv(const Vector& values, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  out << "index,value\n";
  char buf[64];
  for (Index i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n", static_cast<long long>(i), values[i]);
    out << buf;
  }
}

void write_eigenvectors_csv(const DenseMatrix& vectors, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  char buf[32];
  for (Index i = 0; i < vectors.rows(); ++i) {
    for (Index j = 0; j < vectors.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", vectors(i, j));
      out << (j ? "," : "") << buf;
    }
    out << "\n";
  }
}

}  // namespace specoarse
