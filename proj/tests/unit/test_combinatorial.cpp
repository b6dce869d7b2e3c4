#include <doctest.h>

#include <cmath>
#include <functional>
#include <queue>
#include <random>
#include <set>

#include "../support.hpp"
#include "specoarse/error.hpp"

using namespace specoarse;
using fixtures::cluster_cost;
using fixtures::dijkstra;

namespace {

void check_invariants(const EdgeDistanceGraph& g, const CoarseningAssignment& a) {
  a.validate();
  const DenseMatrix pkt = DenseMatrix(a.P().to_matrix() * SparseMatrix(a.K_matrix().transpose()));
  CHECK(pkt == DenseMatrix::Identity(a.m, a.m));
  const DenseMatrix k = DenseMatrix(a.K_matrix());
  CHECK((k.colwise().sum().array() == 1.0).all());
  CHECK(clusters_connected(g, a));
}

}  // namespace

TEST_CASE("edge distances") {
  std::vector<Triplet> t{{0, 1, -2.0}, {1, 2, 1.0}, {0, 0, 2.0}, {1, 1, 1.0}, {2, 2, 1.0}};
  const auto L = SparseSymMatrix::from_symmetric_triplets(3, t, 0);
  const DiagonalMass M(Vector::Ones(3), 2);
  const auto g = edge_distances(L, M);
  CHECK(*g.weight(0, 1) == doctest::Approx(std::sqrt(2.0) / 2.0).epsilon(1e-15));
  CHECK(*g.weight(1, 2) == 0.0);
  CHECK(g.zero_weight_edges() == 1);
  CHECK_FALSE(g.weight(0, 2).has_value());

  const DiagonalMass half(Vector::Constant(3, 0.5), 2);
  CHECK(*edge_distances(L, half).weight(0, 1) == doctest::Approx(*g.weight(0, 1) / std::sqrt(2.0)).epsilon(1e-14));

  CHECK_THROWS_AS(edge_distances(L, DiagonalMass(Vector::Ones(3), 0)), InputError);
  CHECK(*edge_distances(L, DiagonalMass(Vector::Ones(3), 0), 1.0).weight(0, 1) == doctest::Approx(1.0));
}

TEST_CASE("edge distances follow symmetric permutations") {
  const auto op = fixtures::sphere_operator(1);
  const Index n = op.L.dim();
  std::vector<Index> perm(n);
  std::iota(perm.begin(), perm.end(), Index{0});
  std::mt19937_64 rng(2);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, SparseMatrix::StorageIndex> p(n);
  for (Index i = 0; i < n; ++i) p.indices()[i] = static_cast<SparseMatrix::StorageIndex>(perm[i]);
  const SparseMatrix lp = p * op.L.matrix() * p.transpose();
  Vector mp(n);
  for (Index i = 0; i < n; ++i) mp[perm[i]] = op.M[i];
  const auto g = edge_distances(op.L, op.M);
  const auto gp = edge_distances(SparseSymMatrix::from_matrix(lp), DiagonalMass(mp, 2));
  for (Index i = 0; i < n; ++i) {
    for (Index j : g.neighbors(i)) CHECK(*gp.weight(perm[i], perm[j]) == doctest::Approx(*g.weight(i, j)).epsilon(1e-14));
  }
}

TEST_CASE("multi-source shortest paths") {
  const auto path = fixtures::path_graph(4);
  const Index src[] = {0};
  const auto sp = multi_source_shortest_paths(path, src);
  CHECK(sp.dist == std::vector<double>{0, 1, 2, 3});
  std::vector<Index> all{0, 1, 2, 3};
  for (double d : multi_source_shortest_paths(path, all).dist) CHECK(d == 0.0);

  // ties go to the lower source
  const Index ends[] = {4, 0};
  const auto tie = multi_source_shortest_paths(fixtures::path_graph(5), ends);
  CHECK(tie.nearest[2] == 0);

  // sources joined by a zero-weight edge keep themselves
  const Index pair[] = {1, 2};
  const auto zero = multi_source_shortest_paths(fixtures::path_graph(4, 0.0), pair);
  CHECK(zero.nearest == std::vector<Index>{1, 1, 2, 2});

  std::vector<EdgeDistanceGraph::Edge> e{{0, 1, 1.0}};
  const EdgeDistanceGraph split(3, e);
  const auto un = multi_source_shortest_paths(split, src);
  CHECK(std::isinf(un.dist[2]));
  CHECK(un.nearest[2] == kNoSource);
}

TEST_CASE("multi-source shortest paths match per-source Dijkstra on random graphs") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 50; ++trial) {
    const auto g = fixtures::random_graph(30, 25, rng);
    std::vector<Index> sources;
    for (Index v = 0; v < 30; ++v) {
      if (rng() % 5 == 0) sources.push_back(v);
    }
    if (sources.empty()) sources.push_back(7);
    const auto sp = multi_source_shortest_paths(g, sources);
    std::vector<std::vector<double>> per;
    for (Index s : sources) per.push_back(dijkstra(g, s));
    for (Index v = 0; v < 30; ++v) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& d : per) best = std::min(best, d[v]);
      CHECK(sp.dist[v] == doctest::Approx(best).epsilon(1e-12));
      const auto owner = std::find(sources.begin(), sources.end(), sp.nearest[v]) - sources.begin();
      CHECK(per[owner][v] == doctest::Approx(best).epsilon(1e-12));
    }
  }
}

TEST_CASE("k-medioids: trivial and path cases") {
  const auto g9 = fixtures::path_graph(9);
  const auto all = kmedioids(g9, 9, 1);
  for (Index v = 0; v < 9; ++v) CHECK(all.assignment.root_of[all.assignment.cluster_of[v]] == v);

  // Exhaustive 3-medioid oracle: the best root triple on a 9-path is {1, 4, 7}.
  double best = std::numeric_limits<double>::infinity();
  std::set<Index> best_roots;
  for (Index a = 0; a < 9; ++a) {
    for (Index b = a + 1; b < 9; ++b) {
      for (Index c = b + 1; c < 9; ++c) {
        const Index roots[] = {a, b, c};
        double cost = 0.0;
        for (double d : multi_source_shortest_paths(g9, roots).dist) cost += d;
        if (cost < best) {
          best = cost;
          best_roots = {a, b, c};
        }
      }
    }
  }
  CHECK(best_roots == std::set<Index>{1, 4, 7});
  int hits = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto r = kmedioids(g9, 3, seed);
    check_invariants(g9, r.assignment);
    if (std::set<Index>(r.assignment.root_of.begin(), r.assignment.root_of.end()) == best_roots) {
      ++hits;
      for (Index c = 0; c < 3; ++c) {
        CHECK(std::count(r.assignment.cluster_of.begin(), r.assignment.cluster_of.end(), c) == 3);
      }
    }
  }
  CHECK(hits > 0);
  CHECK_THROWS_AS(kmedioids(g9, 10, 0), InputError);
}

TEST_CASE("k-medioids: local optimality, monotone objective and determinism") {
  const auto op = fixtures::sphere_operator(3);
  const auto g = edge_distances(op.L, op.M);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto r = kmedioids(g, 40, seed);
    check_invariants(g, r.assignment);
    CHECK(r.converged);
    for (std::size_t i = 1; i < r.objective.size(); ++i) CHECK(r.objective[i] <= r.objective[i - 1] * (1 + 1e-12));
    CHECK(clustering_objective(g, r.assignment) == doctest::Approx(r.objective.back()).epsilon(1e-10));
    const auto& a = r.assignment;
    for (Index c = 0; c < a.m; ++c) {
      const double current = cluster_cost(g, a, c, a.root_of[c]);
      for (Index v = 0; v < a.n; ++v) {
        if (a.cluster_of[v] == c) CHECK(cluster_cost(g, a, c, v) >= current * (1 - 1e-12));
      }
    }
    const auto again = kmedioids(g, 40, seed);
    CHECK(again.assignment.cluster_of == a.cluster_of);
    CHECK(again.assignment.root_of == a.root_of);
  }
}

TEST_CASE("k-medioids on disconnected graphs") {
  std::vector<EdgeDistanceGraph::Edge> e;
  for (Index i = 0; i + 1 < 10; ++i) e.push_back({i, i + 1, 1.0});
  for (Index i = 10; i + 1 < 13; ++i) e.push_back({i, i + 1, 1.0});
  const EdgeDistanceGraph g(13, e);
  Index count = 0;
  const auto comp = connected_components(g, &count);
  CHECK(count == 2);
  CHECK(comp[12] == 1);
  const auto r = kmedioids(g, 4, 5);
  check_invariants(g, r.assignment);
  Index in_small = 0;
  for (Index root : r.assignment.root_of) in_small += root >= 10;
  CHECK(in_small == 1);
  CHECK_THROWS_AS(kmedioids(g, 1, 0), InputError);
}

TEST_CASE("cluster adjacency and patterns") {
  const auto op = fixtures::sphere_operator(1);
  const auto sl = operator_pattern(op.L);
  const auto id = CoarseningAssignment::identity(op.L.dim());
  CHECK(cluster_adjacency(id, sl) == sl);
  const auto singles = sparsity_patterns(id, sl);
  CHECK(singles.coarse == pattern_product(sl, pattern_product(sl, sl)));

  CoarseningAssignment one;
  one.n = op.L.dim();
  one.m = 1;
  one.cluster_of.assign(op.L.dim(), 0);
  one.root_of = {0};
  CHECK(cluster_adjacency(one, sl) == SparsityPattern::identity(1));

  const auto g = edge_distances(op.L, op.M);
  const auto a = kmedioids(g, 9, 3).assignment;
  const auto adj = cluster_adjacency(a, sl);
  for (Index c = 0; c < a.m; ++c) {
    for (Index d = 0; d < a.m; ++d) {
      bool touch = c == d;
      for (Index u = 0; u < a.n && !touch; ++u) {
        for (Index v = 0; v < a.n && !touch; ++v) {
          touch = a.cluster_of[u] == c && a.cluster_of[v] == d && op.L.coeff(u, v) != 0.0;
        }
      }
      CHECK(adj.contains(c, d) == touch);
    }
  }
  CHECK(adj.is_symmetric());
  const auto pats = sparsity_patterns(a, adj);
  CHECK(pats.coarse.is_symmetric());
  CHECK(pats.interpolation == pattern_product(a.K().transpose(), adj));
  CHECK(pats.coarse == pattern_product(pattern_product(pats.interpolation.transpose(), sl), pats.interpolation));
}

TEST_CASE("three-ring of a chain of five clusters") {
  const auto chain = SparsityPattern::of(fixtures::path_laplacian(5).matrix()).with_diagonal();
  const auto pats = sparsity_patterns(CoarseningAssignment::identity(5), chain);
  CHECK(pats.coarse.row(2).size() == 5);
  const auto chain7 = SparsityPattern::of(fixtures::path_laplacian(7).matrix()).with_diagonal();
  CHECK(sparsity_patterns(CoarseningAssignment::identity(7), chain7).coarse.row(3).size() == 7);
}

TEST_CASE("assignment helpers") {
  CoarseningAssignment a;
  a.n = 4;
  a.m = 2;
  a.cluster_of = {0, 0, 1, 1};
  a.root_of = {1, 2};
  a.validate();
  DenseMatrix x(4, 1);
  x << 10, 11, 12, 13;
  CHECK(a.restrict_rows(x)(0, 0) == 11);
  CHECK(a.restrict_rows(x)(1, 0) == 12);
  Vector m(4);
  m << 1, 2, 3, 4;
  CHECK(a.lump(DiagonalMass(m)).diag() == Vector((Vector(2) << 3, 7).finished()));
  a.root_of = {2, 1};
  CHECK_THROWS_AS(a.validate(), InputError);
  a.root_of = {1, 1};
  CHECK_THROWS_AS(a.validate(), InputError);
}
