#pragma once

#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "specoarse/combinatorial.hpp"
#include "specoarse/operators.hpp"
#include "specoarse/optimize.hpp"
#include "specoarse/shapes.hpp"
#include "specoarse/sparse.hpp"

namespace fixtures {

using namespace specoarse;

inline SparseSymMatrix path_laplacian(Index n, int unit_exponent = 0) {
  std::vector<Triplet> t;
  for (Index i = 0; i + 1 < n; ++i) {
    t.emplace_back(i, i + 1, -1.0);
    t.emplace_back(i, i, 1.0);
    t.emplace_back(i + 1, i + 1, 1.0);
  }
  return SparseSymMatrix::from_symmetric_triplets(n, t, unit_exponent);
}

inline EdgeDistanceGraph path_graph(Index n, double w = 1.0) {
  std::vector<EdgeDistanceGraph::Edge> e;
  for (Index i = 0; i + 1 < n; ++i) e.push_back({i, i + 1, w});
  return EdgeDistanceGraph(n, e);
}

/// Connected random graph: a random spanning tree plus extra edges.
inline EdgeDistanceGraph random_graph(Index n, Index extra, std::mt19937_64& rng) {
  std::vector<EdgeDistanceGraph::Edge> e;
  std::vector<std::pair<Index, Index>> seen;
  std::uniform_real_distribution<double> w(0.1, 2.0);
  auto add = [&](Index a, Index b) {
    if (a == b) return;
    auto key = std::minmax(a, b);
    for (const auto& s : seen) {
      if (s == std::pair<Index, Index>(key.first, key.second)) return;
    }
    seen.emplace_back(key.first, key.second);
    e.push_back({a, b, w(rng)});
  };
  for (Index v = 1; v < n; ++v) add(v, static_cast<Index>(rng() % static_cast<std::uint64_t>(v)));
  for (Index i = 0; i < extra; ++i) {
    add(static_cast<Index>(rng() % static_cast<std::uint64_t>(n)), static_cast<Index>(rng() % static_cast<std::uint64_t>(n)));
  }
  return EdgeDistanceGraph(n, e);
}

/// Cotangent operator of the flat 10×2 strip of triangles (n = 20).
inline OperatorPair strip_operator(int cols = 10, int rows = 2) {
  const TriangleMesh mesh = shapes::grid_strip(cols, rows, 1.0, 0.7);
  return {cotan_laplacian(mesh), barycentric_mass(mesh)};
}

inline OperatorPair sphere_operator(int subdivisions) {
  const TriangleMesh mesh = shapes::icosphere(subdivisions);
  return {cotan_laplacian(mesh), barycentric_mass(mesh)};
}

/// Dense generalized eigensolve, ascending, M-orthonormal.
inline std::pair<Vector, DenseMatrix> dense_eigen(const SparseSymMatrix& L, const DiagonalMass& M) {
  const DenseMatrix a = DenseMatrix(L.matrix());
  const DenseMatrix b = M.diag().asDiagonal().toDenseMatrix();
  Eigen::GeneralizedSelfAdjointEigenSolver<DenseMatrix> es(a, b);
  return {es.eigenvalues(), es.eigenvectors()};
}

inline std::filesystem::path temp_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("specoarse_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::vector<double> dijkstra(const EdgeDistanceGraph& g, Index s) {
  std::vector<double> d(g.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  d[s] = 0.0;
  q.emplace(0.0, s);
  while (!q.empty()) {
    auto [du, u] = q.top();
    q.pop();
    if (du > d[u]) continue;
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (du + w[e] < d[nb[e]]) {
        d[nb[e]] = du + w[e];
        q.emplace(d[nb[e]], nb[e]);
      }
    }
  }
  return d;
}

// Dijkstra restricted to one cluster's members
inline double cluster_cost(const EdgeDistanceGraph& g, const CoarseningAssignment& a, Index c, Index root) {
  std::vector<double> d(g.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, Index>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
  d[root] = 0.0;
  q.emplace(0.0, root);
  while (!q.empty()) {
    auto [du, u] = q.top();
    q.pop();
    if (du > d[u]) continue;
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      if (a.cluster_of[nb[e]] == c && du + w[e] < d[nb[e]]) {
        d[nb[e]] = du + w[e];
        q.emplace(d[nb[e]], nb[e]);
      }
    }
  }
  double total = 0.0;
  for (Index v = 0; v < a.n; ++v) {
    if (a.cluster_of[v] == c) total += d[v];
  }
  return total;
}

/// Dense KKT solve of min ‖x − values‖² s.t. G(x)·pphi = phi on the pattern.
inline Vector projection_oracle(const SparsityPattern& pattern, const std::vector<double>& values,
                                const DenseMatrix& pphi, const DenseMatrix& phi) {
  const Index n = pattern.rows(), d = pphi.cols();
  const Index N = static_cast<Index>(values.size());
  DenseMatrix C = DenseMatrix::Zero(n * d, N);
  Vector b(n * d);
  for (Index i = 0; i < n; ++i) {
    const auto cols = pattern.row(i);
    for (Index j = 0; j < d; ++j) {
      b[i * d + j] = phi(i, j);
      for (std::size_t e = 0; e < cols.size(); ++e) C(i * d + j, pattern.row_offset(i) + e) = pphi(cols[e], j);
    }
  }
  DenseMatrix kkt = DenseMatrix::Zero(N + n * d, N + n * d);
  kkt.topLeftCorner(N, N).setIdentity();
  kkt.topRightCorner(N, n * d) = C.transpose();
  kkt.bottomLeftCorner(n * d, N) = C;
  Vector rhs(N + n * d);
  for (Index e = 0; e < N; ++e) rhs[e] = values[e];
  rhs.tail(n * d) = b;
  return kkt.fullPivLu().solve(rhs).head(N);
}

struct ProjectionInstance {
  InterpolationMatrix g;
  DenseMatrix pphi;
  DenseMatrix phi;
};

/// Random 12×5 pattern with two or three entries per row and d constraint columns.
inline ProjectionInstance random_projection_instance(std::mt19937_64& rng, Index d) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Index n = 12, m = 5;
  std::vector<std::pair<Index, Index>> pos;
  for (Index i = 0; i < n; ++i) {
    pos.emplace_back(i, i % m);
    pos.emplace_back(i, (i + 1) % m);
    if (u(rng) > 0.0) pos.emplace_back(i, (i + 3) % m);
  }
  ProjectionInstance s{InterpolationMatrix::zeros(SparsityPattern::from_positions(n, m, pos)), DenseMatrix(m, d),
                       DenseMatrix(n, d)};
  for (double& v : s.g.values) v = u(rng);
  for (Index i = 0; i < m; ++i) {
    for (Index j = 0; j < d; ++j) s.pphi(i, j) = u(rng) + (j == 0 ? 2.0 : 0.0);
  }
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) s.phi(i, j) = u(rng);
  }
  return s;
}

}  // namespace fixtures
