#include <doctest.h>

#include <queue>
#include <random>

#include "../support.hpp"
#include "specoarse/error.hpp"

using namespace specoarse;

namespace {

SparseMatrix random_sparse(Index r, Index c, double fill, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Triplet> t;
  for (Index i = 0; i < r; ++i) {
    for (Index j = 0; j < c; ++j) {
      if (u(rng) < fill) t.emplace_back(i, j, 2.0 * u(rng) - 1.0);
    }
  }
  SparseMatrix a(r, c);
  a.setFromTriplets(t.begin(), t.end());
  return a;
}

}  // namespace

TEST_CASE("spmm: identity and hand products") {
  std::mt19937_64 rng(1);
  const SparseMatrix x = random_sparse(3, 3, 0.5, rng);
  SparseMatrix id(3, 3);
  id.setIdentity();
  CHECK(DenseMatrix(spmm(id, x)).isApprox(DenseMatrix(x), 0.0));

  SparseMatrix ones(2, 2);
  std::vector<Triplet> t{{0, 0, 1}, {0, 1, 1}, {1, 0, 1}, {1, 1, 1}};
  ones.setFromTriplets(t.begin(), t.end());
  const DenseMatrix p = DenseMatrix(spmm(ones, ones));
  CHECK(p == DenseMatrix::Constant(2, 2, 2.0));
}

TEST_CASE("spmm: matches the dense product and drops cancellations") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseMatrix a = random_sparse(6, 6, 0.3, rng);
    const SparseMatrix b = random_sparse(6, 6, 0.3, rng);
    const SparseMatrix c = spmm(a, b);
    CHECK((DenseMatrix(c) - DenseMatrix(a) * DenseMatrix(b)).cwiseAbs().maxCoeff() <= 1e-14);
    for (Index k = 0; k < c.nonZeros(); ++k) CHECK(c.valuePtr()[k] != 0.0);
  }
  SparseMatrix a(1, 2), b(2, 1);
  std::vector<Triplet> ta{{0, 0, 1.0}, {0, 1, 1.0}}, tb{{0, 0, 1.0}, {1, 0, -1.0}};
  a.setFromTriplets(ta.begin(), ta.end());
  b.setFromTriplets(tb.begin(), tb.end());
  CHECK(spmm(a, b).nonZeros() == 0);
  CHECK_THROWS_AS(spmm(a, a), InputError);
}

TEST_CASE("spmm is associative on random triples") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const SparseMatrix a = random_sparse(12, 15, 0.3, rng);
    const SparseMatrix b = random_sparse(15, 9, 0.3, rng);
    const SparseMatrix c = random_sparse(9, 20, 0.3, rng);
    const DenseMatrix l = DenseMatrix(spmm(spmm(a, b), c));
    const DenseMatrix r = DenseMatrix(spmm(a, spmm(b, c)));
    CHECK((l - r).norm() <= 1e-12 * std::max(1.0, l.norm()));
  }
}

TEST_CASE("SparseSymMatrix construction") {
  std::vector<Triplet> t{{0, 1, 2.0}, {1, 1, 3.0}, {0, 1, 1.0}, {2, 2, 0.0}};
  const auto a = SparseSymMatrix::from_symmetric_triplets(3, t, 4);
  CHECK(a.coeff(0, 1) == 3.0);
  CHECK(a.coeff(1, 0) == 3.0);
  CHECK(a.nonzeros() == 3);
  CHECK(a.unit_exponent() == 4);
  CHECK_THROWS_AS(SparseSymMatrix::from_symmetric_triplets(2, t), InputError);

  SparseMatrix asym(2, 2);
  asym.insert(1, 0) = 1.0;
  CHECK_THROWS_AS(SparseSymMatrix::from_matrix(asym), InputError);
  const auto s = SparseSymMatrix::symmetrize(asym);
  CHECK(s.coeff(0, 1) == 0.5);
  CHECK(s.coeff(1, 0) == 0.5);
  CHECK(a.trace() == 3.0);
  CHECK(a.max_abs() == 3.0);
}

TEST_CASE("DiagonalMass validation") {
  CHECK_THROWS_AS(DiagonalMass(Vector::Constant(2, -1.0)), InputError);
  Vector d(2);
  d << 1.0, std::nan("");
  CHECK_THROWS_AS(DiagonalMass{d}, InputError);
  const DiagonalMass z(Vector::Zero(2));
  CHECK_FALSE(z.strictly_positive());
  CHECK_THROWS_AS(z.require_positive("test"), InputError);
  CHECK(DiagonalMass::identity(3).total() == 3.0);
}

TEST_CASE("pattern_product: identity, empty and BFS radius oracle") {
  std::mt19937_64 rng(3);
  const auto x = SparsityPattern::of(random_sparse(5, 4, 0.4, rng));
  CHECK(pattern_product(SparsityPattern::identity(5), x) == x);
  CHECK(pattern_product(SparsityPattern(3, 5), x).nonzeros() == 0);
  CHECK_THROWS_AS(pattern_product(x, x), InputError);

  const Index n = 5;
  const auto s = SparsityPattern::of(fixtures::path_laplacian(n).matrix()).with_diagonal();
  const auto cube = pattern_product(s, pattern_product(s, s));
  for (Index i = 0; i < n; ++i) {
    // breadth-first hop distance
    std::vector<int> hops(n, -1);
    std::queue<Index> q;
    hops[i] = 0;
    q.push(i);
    while (!q.empty()) {
      const Index u = q.front();
      q.pop();
      for (Index v : s.row(u)) {
        if (hops[v] < 0) {
          hops[v] = hops[u] + 1;
          q.push(v);
        }
      }
    }
    for (Index j = 0; j < n; ++j) CHECK(cube.contains(i, j) == (hops[j] <= 3));
  }
  CHECK(cube.is_symmetric());
}

TEST_CASE("pattern_product preserves symmetry of cubes") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 5; ++trial) {
    const SparseMatrix a = random_sparse(15, 15, 0.15, rng);
    const auto p = SparsityPattern::of(SparseMatrix(a + SparseMatrix(a.transpose())));
    CHECK(pattern_product(pattern_product(p, p), p).is_symmetric());
  }
}

TEST_CASE("SparsityPattern basics") {
  auto p = SparsityPattern::from_positions(2, 3, {{1, 2}, {0, 1}, {1, 2}});
  CHECK(p.nonzeros() == 2);
  CHECK(p.position(0, 1) == 0);
  CHECK(p.position(1, 2) == 1);
  CHECK(p.position(1, 1) == -1);
  CHECK(p.transpose().contains(2, 1));
  CHECK(p.transpose().transpose() == p);
  CHECK_THROWS_AS(SparsityPattern::from_positions(2, 2, {{2, 0}}), InputError);
}

TEST_CASE("weighted_frobenius_sq") {
  CHECK(weighted_frobenius_sq(DenseMatrix::Zero(3, 2), DiagonalMass::identity(3)) == 0.0);
  DenseMatrix x(2, 1);
  x << 1.0, 2.0;
  CHECK(weighted_frobenius_sq(x, DiagonalMass::identity(2)) == 5.0);

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.1, 2.0);
  DenseMatrix r(8, 3);
  Vector w(8);
  for (Index i = 0; i < 8; ++i) {
    w[i] = u(rng);
    for (Index j = 0; j < 3; ++j) r(i, j) = u(rng) - 1.0;
  }
  double oracle = 0.0;
  double by_column = 0.0;
  for (Index j = 0; j < 3; ++j) {
    double col = 0.0;
    for (Index i = 0; i < 8; ++i) col += w[i] * r(i, j) * r(i, j);
    by_column += weighted_frobenius_sq(r.col(j), DiagonalMass(w));
    oracle += col;
  }
  CHECK(std::abs(weighted_frobenius_sq(r, DiagonalMass(w)) - oracle) <= 1e-14 * oracle);
  CHECK(std::abs(by_column - oracle) <= 1e-14 * oracle);
  CHECK_THROWS_AS(weighted_frobenius_sq(r, DiagonalMass::identity(3)), InputError);
}
