#include "specoarse/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>

#include "specoarse/error.hpp"

namespace specoarse {

namespace {

DenseMatrix restrict_rows(const DenseMatrix& x, std::span<const Index> roots) {
  DenseMatrix out(static_cast<Index>(roots.size()), x.cols());
  for (std::size_t c = 0; c < roots.size(); ++c) {
    if (roots[c] < 0 || roots[c] >= x.rows()) throw InputError("root index out of range");
    out.row(static_cast<Index>(c)) = x.row(roots[c]);
  }
  return out;
}

void check_map_inputs(const EigenBasis& fine, const EigenBasis& coarse, std::span<const Index> roots,
                      const DiagonalMass& coarse_mass) {
  const Index m = static_cast<Index>(roots.size());
  if (coarse.n() != m || coarse_mass.dim() != m) {
    throw InputError("coarse basis has " + std::to_string(coarse.n()) + " rows and coarse mass " +
                     std::to_string(coarse_mass.dim()) + ", but there are " + std::to_string(m) + " roots");
  }
  if (fine.n() < m) throw InputError("more roots than fine nodes");
}

DenseMatrix weighted_orthonormal(const DenseMatrix& x, const Vector& sqrt_w) {
  const DenseMatrix w = x.array().colwise() * sqrt_w.array();
  Eigen::HouseholderQR<DenseMatrix> qr(w);
  return qr.householderQ() * DenseMatrix::Identity(w.rows(), w.cols());
}

}  // namespace

DenseMatrix functional_map(const EigenBasis& fine, const EigenBasis& coarse, std::span<const Index> roots,
                           const DiagonalMass& coarse_mass, Index k) {
  check_map_inputs(fine, coarse, roots, coarse_mass);
  if (k < 1 || k > fine.k() || k > coarse.k()) {
    throw InputError("functional map size k = " + std::to_string(k) + " exceeds the bases (" +
                     std::to_string(fine.k()) + " fine, " + std::to_string(coarse.k()) + " coarse)");
  }
  const DenseMatrix pphi = restrict_rows(fine.vectors.leftCols(k), roots);
  const DenseMatrix weighted = pphi.array().colwise() * coarse_mass.diag().array();
  return coarse.vectors.leftCols(k).transpose() * weighted;
}

double offdiag_ratio(const DenseMatrix& C) {
  const Index s = std::min(C.rows(), C.cols());
  const DenseMatrix block = C.topLeftCorner(s, s);
  const double total = block.norm();
  if (total == 0.0) return 0.0;
  DenseMatrix off = block;
  off.diagonal().setZero();
  return off.norm() / std::max(total, std::numeric_limits<double>::min());
}

std::vector<ModeGroup> grouped_alignment(const EigenBasis& fine, const EigenBasis& coarse,
                                         std::span<const Index> roots, const DiagonalMass& coarse_mass,
                                         double gap_tol) {
  check_map_inputs(fine, coarse, roots, coarse_mass);
  const Index k = std::min(fine.k(), coarse.k());
  std::vector<ModeGroup> groups;
  if (k == 0) return groups;
  const Vector lam = fine.values.head(k);
  const double zero = zero_threshold(lam);
  const Vector sqrt_w = coarse_mass.diag().cwiseSqrt();
  const DenseMatrix pphi = restrict_rows(fine.vectors.leftCols(k), roots);

  Index start = 0;
  for (Index i = 1; i <= k; ++i) {
    bool split = i == k;
    if (!split) {
      const double a = lam[i - 1];
      const double b = lam[i];
      const bool both_null = std::abs(a) <= zero && std::abs(b) <= zero;
      split = !both_null && (b - a) > gap_tol * std::max(std::abs(a), std::abs(b));
    }
    if (!split) continue;
    const Index size = i - start;
    const DenseMatrix qa = weighted_orthonormal(pphi.middleCols(start, size), sqrt_w);
    const DenseMatrix qb = weighted_orthonormal(coarse.vectors.middleCols(start, size), sqrt_w);
    groups.push_back({start, size, (qa.transpose() * qb).squaredNorm() / static_cast<double>(size)});
    start = i;
  }
  return groups;
}

std::vector<EigenvaluePair> eigenvalue_compare(const EigenBasis& fine, const EigenBasis& coarse) {
  const Index k = std::min(fine.k(), coarse.k());
  std::vector<EigenvaluePair> pairs;
  if (k == 0) return pairs;
  const Index null_dim = std::min(fine.leading(k).null_dim, k - 1);
  const double floor = std::abs(fine.values[std::max<Index>(null_dim, 0)]);
  for (Index i = 0; i < k; ++i) {
    const double lf = fine.values[i];
    const double lc = coarse.values[i];
    const double denom = std::max(std::abs(lf), floor);
    pairs.push_back({i, lf, lc, denom > 0.0 ? std::abs(lc - lf) / denom : std::abs(lc - lf)});
  }
  return pairs;
}

EigenvalueSummary summarize(const std::vector<EigenvaluePair>& pairs, Index first, Index last) {
  EigenvalueSummary s;
  s.first = std::clamp<Index>(first, 0, static_cast<Index>(pairs.size()));
  s.last = std::clamp<Index>(last, s.first, static_cast<Index>(pairs.size()));
  std::vector<double> errs;
  for (Index i = s.first; i < s.last; ++i) errs.push_back(pairs[i].rel_error);
  if (errs.empty()) return s;
  std::sort(errs.begin(), errs.end());
  const std::size_t h = errs.size() / 2;
  s.median = errs.size() % 2 ? errs[h] : 0.5 * (errs[h - 1] + errs[h]);
  s.max = errs.back();
  return s;
}

std::vector<TransportRecord> eigen_transport(const SparseSymMatrix& L, const DiagonalMass& M,
                                             const EigenBasis& fine, const SparseSymMatrix& coarse_L,
                                             const DiagonalMass& coarse_mass, std::span<const Index> roots) {
  const Index m = static_cast<Index>(roots.size());
  if (L.dim() != fine.n() || M.dim() != fine.n() || coarse_L.dim() != m || coarse_mass.dim() != m) {
    throw InputError("eigen_transport: dimensions disagree");
  }
  DenseMatrix lphi = L.matrix() * fine.vectors;
  lphi.array().colwise() /= M.diag().array();
  const DenseMatrix a = restrict_rows(lphi, roots);
  const DenseMatrix b = restrict_rows(fine.vectors, roots);
  const DenseMatrix lb = coarse_L.matrix() * b;
  const DenseMatrix r = a - DenseMatrix(lb.array().colwise() / coarse_mass.diag().array());
  std::vector<TransportRecord> out;
  for (Index i = 0; i < fine.k(); ++i) {
    TransportRecord t;
    t.index = i;
    t.lambda = fine.values[i];
    const double norm_sq = (b.col(i).array().square() * coarse_mass.diag().array()).sum();
    t.norm = std::sqrt(norm_sq);
    t.rayleigh = norm_sq > 0.0 ? b.col(i).dot(lb.col(i)) / norm_sq : 0.0;
    t.residual = std::sqrt((r.col(i).array().square() * coarse_mass.diag().array()).sum());
    out.push_back(t);
  }
  return out;
}

void write_matrix_csv(const DenseMatrix& C, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  char buf[32];
  for (Index i = 0; i < C.rows(); ++i) {
    for (Index j = 0; j < C.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", C(i, j));
      if (j) out << ',';
      out << buf;
    }
    out << '\n';
  }
  if (!out) throw InputError("failed writing " + path.string());
}

void write_eigenvalue_pairs_csv(const std::vector<EigenvaluePair>& pairs, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "index,fine,coarse,rel_error\n";
  char buf[128];
  for (const auto& p : pairs) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g\n", static_cast<long long>(p.index), p.fine, p.coarse,
                  p.rel_error);
    out << buf;
  }
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace specoarse
