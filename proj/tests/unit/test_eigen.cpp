#include <doctest.h>

#include <cmath>

#include "../support.hpp"
#include "specoarse/eigen_solver.hpp"
#include "specoarse/error.hpp"

using namespace specoarse;

namespace {

SparseSymMatrix diagonal_operator(const std::vector<double>& d) {
  std::vector<Triplet> t;
  for (std::size_t i = 0; i < d.size(); ++i) t.emplace_back(i, i, d[i]);
  return SparseSymMatrix::from_symmetric_triplets(static_cast<Index>(d.size()), t);
}

void check_invariants(const SparseSymMatrix& L, const DiagonalMass& M, const EigenBasis& b) {
  const DenseMatrix gram = b.vectors.transpose() * M.diag().asDiagonal() * b.vectors;
  CHECK((gram - DenseMatrix::Identity(b.k(), b.k())).cwiseAbs().maxCoeff() <= 1e-8);
  const DenseMatrix res = L.matrix() * b.vectors - M.diag().asDiagonal() * b.vectors * b.values.asDiagonal();
  CHECK(res.norm() <= 1e-6 * L.matrix().norm() * b.vectors.norm());
  for (Index i = 1; i < b.k(); ++i) CHECK(b.values[i] >= b.values[i - 1]);
  for (Index c = 0; c < b.k(); ++c) {
    Index best = 0;
    for (Index r = 1; r < b.n(); ++r) {
      if (std::abs(b.vectors(r, c)) > std::abs(b.vectors(best, c))) best = r;
    }
    CHECK(b.vectors(best, c) > 0.0);
  }
  for (Index i = 0; i < b.null_dim; ++i) CHECK(std::abs(b.values[i]) <= zero_threshold(b.values));
}

// sin of the largest M-principal angle between span(u) and span(v), both M-orthonormal
double subspace_sin(const DenseMatrix& u, const DenseMatrix& v, const DiagonalMass& M) {
  const DenseMatrix r = v - u * (u.transpose() * M.diag().asDiagonal() * v);
  const DenseMatrix w = M.diag().cwiseSqrt().asDiagonal() * r;
  return Eigen::JacobiSVD<DenseMatrix>(w).singularValues()[0];
}

}  // namespace

TEST_CASE("zero threshold and null dimension") {
  Vector a(3), b(3), c(3);
  a << 0, 1, 2;
  b << 1e-15, 1e-14, 5;
  c << 1, 2, 3;
  CHECK(zero_threshold(a) == doctest::Approx(2e-8));
  CHECK(null_dimension(a) == 1);
  CHECK(null_dimension(b) == 2);
  CHECK(null_dimension(c) == 0);
}

TEST_CASE("diagonal operator") {
  const auto L = diagonal_operator({0.0, 1.0, 2.0});
  const auto b = smallest_k(L, DiagonalMass::identity(3), 2);
  CHECK(std::abs(b.values[0]) <= 1e-14);
  CHECK(b.values[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((b.vectors - DenseMatrix::Identity(3, 2)).cwiseAbs().maxCoeff() <= 1e-12);
  CHECK(b.null_dim == 1);
}

TEST_CASE("path graph spectrum") {
  const auto L = fixtures::path_laplacian(4);
  const auto b = smallest_k(L, DiagonalMass::identity(4), 3);
  const double expect[] = {0.0, 2.0 - std::sqrt(2.0), 2.0};
  for (int i = 0; i < 3; ++i) CHECK(std::abs(b.values[i] - expect[i]) <= 1e-12);
  check_invariants(L, DiagonalMass::identity(4), b);
  CHECK_THROWS_AS(smallest_k(L, DiagonalMass::identity(4), 4), InputError);
  CHECK_THROWS_AS(smallest_k(L, DiagonalMass::identity(3), 2), InputError);
  CHECK_THROWS_AS(smallest_k(L, DiagonalMass(Vector::Zero(4)), 2), InputError);
}

TEST_CASE("closed mesh: constant null vector normalized in M") {
  const auto op = fixtures::sphere_operator(3);
  const auto b = smallest_k(op.L, op.M, 10);
  REQUIRE(b.null_dim == 1);
  const double c = 1.0 / std::sqrt(op.M.total());
  CHECK((b.vectors.col(0).array() - c).abs().maxCoeff() <= 1e-8 * c);
  check_invariants(op.L, op.M, b);
}

TEST_CASE("Lanczos agrees with the dense oracle under multiplicity") {
  for (const auto& op : {fixtures::sphere_operator(3),
                         OperatorPair{cotan_laplacian(shapes::bumpy_cube(9)), barycentric_mass(shapes::bumpy_cube(9))}}) {
    const auto [vals, vecs] = fixtures::dense_eigen(op.L, op.M);
    Index k = 40;
    while (vals[k] - vals[k - 1] <= 1e-5 * vals[k]) --k;
    EigenOptions opts;
    opts.seed = 12345;
    const auto b = smallest_k(op.L, op.M, k, opts);
    REQUIRE(b.n() > 2 * k + 30);
    check_invariants(op.L, op.M, b);
    const double floor = 1e-12 * vals.cwiseAbs().maxCoeff();
    for (Index i = 0; i < k; ++i) CHECK(std::abs(b.values[i] - vals[i]) <= std::max(1e-8 * std::abs(vals[i]), floor));
    Index start = 0;
    for (Index i = 1; i <= k; ++i) {
      if (i < k && vals[i] - vals[i - 1] <= 1e-5 * std::abs(vals[i])) continue;
      const double s = subspace_sin(vecs.middleCols(start, i - start), b.vectors.middleCols(start, i - start), op.M);
      CHECK(s <= 1e-6);
      start = i;
    }
  }
}

TEST_CASE("solves are deterministic for a seed") {
  const auto op = fixtures::sphere_operator(3);
  EigenOptions opts;
  opts.seed = 99;
  const auto a = smallest_k(op.L, op.M, 12, opts);
  const auto b = smallest_k(op.L, op.M, 12, opts);
  CHECK(a.values == b.values);
  CHECK(a.vectors == b.vectors);
}

TEST_CASE("spectral bounds") {
  const auto op = fixtures::sphere_operator(2);
  const auto s = spectral_bounds(op.L, op.M);
  const auto [vals, vecs] = fixtures::dense_eigen(op.L, op.M);
  CHECK(s.exact_min);
  CHECK(s.psd);
  CHECK(s.max == doctest::Approx(vals[vals.size() - 1]).epsilon(1e-10));

  const auto big = fixtures::sphere_operator(4);
  const auto sb = spectral_bounds(big.L, big.M);
  CHECK(sb.psd);
  CHECK_FALSE(sb.exact_min);
  const SparseSymMatrix neg = SparseSymMatrix::from_matrix(SparseMatrix(-1.0 * big.L.matrix()));
  CHECK_FALSE(spectral_bounds(neg, big.M).psd);
  const SparseSymMatrix neg_small = SparseSymMatrix::from_matrix(SparseMatrix(-1.0 * op.L.matrix()));
  CHECK_FALSE(spectral_bounds(neg_small, op.M).psd);
}

TEST_CASE("indefinite operators are rejected by the shift-invert path") {
  const auto op = fixtures::sphere_operator(3);
  const SparseSymMatrix neg = SparseSymMatrix::from_matrix(SparseMatrix(-1.0 * op.L.matrix()));
  CHECK_THROWS_AS(smallest_k(neg, op.M, 10), NumericalError);
}
