#include "specoarse/combinatorial.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <numeric>
#include <queue>
#include <random>
#include <string>

#include "specoarse/error.hpp"
#include "specoarse/rng.hpp"

namespace specoarse {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lexicographic (distance, source) comparison used for deterministic ties.
bool better(double d1, Index s1, double d2, Index s2) {
  return d1 < d2 || (d1 == d2 && s1 < s2);
}

// Dijkstra restricted to nodes whose label equals `label`. Distances are
// written to dist[local(v)] for members; members must be listed in `local`.
class ClusterDijkstra {
 public:
  explicit ClusterDijkstra(const EdgeDistanceGraph& g) : g_(g), local_(static_cast<std::size_t>(g.size()), -1) {}

  void set_members(std::span<const Index> members) {
    for (Index v : members_) local_[v] = -1;
    members_.assign(members.begin(), members.end());
    for (std::size_t i = 0; i < members_.size(); ++i) local_[members_[i]] = static_cast<Index>(i);
  }

  // Distances from member `source` within the member set.
  const std::vector<double>& run(Index source) {
    dist_.assign(members_.size(), kInf);
    using Item = std::pair<double, Index>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist_[local_[source]] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist_[local_[u]]) continue;
      const auto nb = g_.neighbors(u);
      const auto w = g_.weights(u);
      for (std::size_t e = 0; e < nb.size(); ++e) {
        const Index lv = local_[nb[e]];
        if (lv < 0) continue;
        const double nd = d + w[e];
        if (nd < dist_[lv]) {
          dist_[lv] = nd;
          heap.emplace(nd, nb[e]);
        }
      }
    }
    return dist_;
  }

 private:
  const EdgeDistanceGraph& g_;
  std::vector<Index> local_;
  std::vector<Index> members_;
  std::vector<double> dist_;
};

std::vector<std::vector<Index>> members_by_cluster(const CoarseningAssignment& a) {
  std::vector<std::vector<Index>> members(static_cast<std::size_t>(a.m));
  for (Index v = 0; v < a.n; ++v) members[a.cluster_of[v]].push_back(v);
  return members;
}

}  // namespace

// ---------------------------------------------------------------------------
// EdgeDistanceGraph

EdgeDistanceGraph::EdgeDistanceGraph(Index n, std::span<const Edge> edges) : n_(n), offsets_(n + 1, 0) {
  for (const auto& e : edges) {
    if (e.a < 0 || e.b < 0 || e.a >= n || e.b >= n || e.a == e.b) {
      throw InputError("invalid graph edge (" + std::to_string(e.a) + ", " + std::to_string(e.b) + ")");
    }
    if (!(e.weight >= 0.0)) throw InputError("graph edge weights must be non-negative");
    ++offsets_[e.a + 1];
    ++offsets_[e.b + 1];
  }
  for (Index v = 0; v < n; ++v) offsets_[v + 1] += offsets_[v];
  neighbors_.resize(static_cast<std::size_t>(offsets_[n]));
  weights_.resize(neighbors_.size());
  std::vector<Index> fill(offsets_.begin(), offsets_.end() - 1);
  for (const auto& e : edges) {
    neighbors_[fill[e.a]] = e.b;
    weights_[fill[e.a]++] = e.weight;
    neighbors_[fill[e.b]] = e.a;
    weights_[fill[e.b]++] = e.weight;
  }
  // sort each adjacency list by neighbor for deterministic traversal
  std::vector<std::pair<Index, double>> tmp;
  for (Index v = 0; v < n; ++v) {
    tmp.clear();
    for (Index k = offsets_[v]; k < offsets_[v + 1]; ++k) tmp.emplace_back(neighbors_[k], weights_[k]);
    std::sort(tmp.begin(), tmp.end());
    for (std::size_t i = 0; i + 1 < tmp.size(); ++i) {
      if (tmp[i].first == tmp[i + 1].first) {
        throw InputError("duplicate graph edge (" + std::to_string(v) + ", " + std::to_string(tmp[i].first) + ")");
      }
    }
    for (std::size_t i = 0; i < tmp.size(); ++i) {
      neighbors_[offsets_[v] + i] = tmp[i].first;
      weights_[offsets_[v] + i] = tmp[i].second;
    }
  }
}

std::optional<double> EdgeDistanceGraph::weight(Index a, Index b) const {
  const auto nb = neighbors(a);
  const auto it = std::lower_bound(nb.begin(), nb.end(), b);
  if (it == nb.end() || *it != b) return std::nullopt;
  return weights(a)[it - nb.begin()];
}

Index EdgeDistanceGraph::zero_weight_edges() const {
  Index count = 0;
  for (Index v = 0; v < n_; ++v) {
    const auto nb = neighbors(v);
    const auto w = weights(v);
    for (std::size_t e = 0; e < nb.size(); ++e) count += nb[e] > v && w[e] == 0.0;
  }
  return count;
}

EdgeDistanceGraph edge_distances(const SparseSymMatrix& L, const DiagonalMass& M, std::optional<double> exponent) {
  if (M.dim() != L.dim()) throw InputError("edge_distances: dimensions of L and M differ");
  double e;
  if (exponent) {
    e = *exponent;
  } else {
    if (M.unit_exponent() == 0) {
      throw InputError("mass unit exponent q is 0, so (p+1)/q is undefined; pass an explicit distance exponent");
    }
    e = static_cast<double>(L.unit_exponent() + 1) / M.unit_exponent();
  }
  std::vector<EdgeDistanceGraph::Edge> edges;
  const auto& a = L.matrix();
  for (Index j = 0; j < a.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(a, j); it; ++it) {
      const Index i = it.row();
      if (i >= j) continue;
      const double d = std::pow(M[i] + M[j], e) / (-it.value());
      edges.push_back({i, j, std::max(d, 0.0)});
    }
  }
  return EdgeDistanceGraph(L.dim(), edges);
}

ShortestPaths multi_source_shortest_paths(const EdgeDistanceGraph& g, std::span<const Index> sources) {
  const Index n = g.size();
  ShortestPaths sp{std::vector<double>(static_cast<std::size_t>(n), kInf),
                   std::vector<Index>(static_cast<std::size_t>(n), kNoSource)};
  std::vector<Index> sorted(sources.begin(), sources.end());
  std::sort(sorted.begin(), sorted.end());
  std::deque<Index> queue;
  std::vector<char> queued(static_cast<std::size_t>(n), 0);
  for (Index s : sorted) {
    if (s < 0 || s >= n) throw InputError("source node out of range");
    if (sp.nearest[s] != kNoSource) continue;
    sp.dist[s] = 0.0;
    sp.nearest[s] = s;
    queue.push_back(s);
    queued[s] = 1;
  }
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    queued[u] = 0;
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const Index v = nb[e];
      if (sp.nearest[v] == v) continue;
      const double nd = sp.dist[u] + w[e];
      if (better(nd, sp.nearest[u], sp.dist[v], sp.nearest[v] == kNoSource ? n : sp.nearest[v])) {
        sp.dist[v] = nd;
        sp.nearest[v] = sp.nearest[u];
        if (!queued[v]) {
          queue.push_back(v);
          queued[v] = 1;
        }
      }
    }
  }
  return sp;
}

std::vector<Index> connected_components(const EdgeDistanceGraph& g, Index* count) {
  std::vector<Index> comp(static_cast<std::size_t>(g.size()), -1);
  Index next = 0;
  std::vector<Index> stack;
  for (Index s = 0; s < g.size(); ++s) {
    if (comp[s] >= 0) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const Index u = stack.back();
      stack.pop_back();
      for (Index v : g.neighbors(u)) {
        if (comp[v] < 0) {
          comp[v] = next;
          stack.push_back(v);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

// ---------------------------------------------------------------------------
// CoarseningAssignment

SparsityPattern CoarseningAssignment::K() const {
  std::vector<std::pair<Index, Index>> pos;
  pos.reserve(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) pos.emplace_back(cluster_of[v], v);
  return SparsityPattern::from_positions(m, n, std::move(pos));
}

SparsityPattern CoarseningAssignment::P() const {
  std::vector<std::pair<Index, Index>> pos;
  pos.reserve(static_cast<std::size_t>(m));
  for (Index c = 0; c < m; ++c) pos.emplace_back(c, root_of[c]);
  return SparsityPattern::from_positions(m, n, std::move(pos));
}

SparseMatrix CoarseningAssignment::K_matrix() const { return K().to_matrix(); }

void CoarseningAssignment::validate() const {
  if (n <= 0 || m <= 0 || m > n) throw InputError("assignment sizes invalid");
  if (static_cast<Index>(cluster_of.size()) != n || static_cast<Index>(root_of.size()) != m) {
    throw InputError("assignment vectors have wrong length");
  }
  for (Index v = 0; v < n; ++v) {
    if (cluster_of[v] < 0 || cluster_of[v] >= m) {
      throw InputError("node " + std::to_string(v) + " has invalid cluster id");
    }
  }
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  for (Index c = 0; c < m; ++c) {
    const Index r = root_of[c];
    if (r < 0 || r >= n) throw InputError("root of cluster " + std::to_string(c) + " out of range");
    if (used[r]) throw InputError("node " + std::to_string(r) + " is the root of two clusters");
    used[r] = 1;
    if (cluster_of[r] != c) {
      throw InputError("root " + std::to_string(r) + " does not belong to its cluster " + std::to_string(c));
    }
  }
}

DenseMatrix CoarseningAssignment::restrict_rows(const DenseMatrix& x) const {
  if (x.rows() != n) throw InputError("restrict_rows: expected " + std::to_string(n) + " rows");
  DenseMatrix out(m, x.cols());
  for (Index c = 0; c < m; ++c) out.row(c) = x.row(root_of[c]);
  return out;
}

DiagonalMass CoarseningAssignment::lump(const DiagonalMass& mass) const {
  if (mass.dim() != n) throw InputError("lump: mass dimension mismatch");
  Vector d = Vector::Zero(m);
  for (Index v = 0; v < n; ++v) d[cluster_of[v]] += mass[v];
  return DiagonalMass(std::move(d), mass.unit_exponent());
}

CoarseningAssignment CoarseningAssignment::identity(Index n) {
  CoarseningAssignment a;
  a.n = a.m = n;
  a.cluster_of.resize(static_cast<std::size_t>(n));
  std::iota(a.cluster_of.begin(), a.cluster_of.end(), Index{0});
  a.root_of = a.cluster_of;
  return a;
}

bool clusters_connected(const EdgeDistanceGraph& g, const CoarseningAssignment& a) {
  const auto members = members_by_cluster(a);
  ClusterDijkstra dijkstra(g);
  for (Index c = 0; c < a.m; ++c) {
    if (members[c].empty()) return false;
    dijkstra.set_members(members[c]);
    const auto& d = dijkstra.run(a.root_of[c]);
    if (std::any_of(d.begin(), d.end(), [](double x) { return std::isinf(x); })) return false;
  }
  return true;
}

double clustering_objective(const EdgeDistanceGraph& g, const CoarseningAssignment& a) {
  const auto members = members_by_cluster(a);
  ClusterDijkstra dijkstra(g);
  double total = 0.0;
  for (Index c = 0; c < a.m; ++c) {
    dijkstra.set_members(members[c]);
    for (double d : dijkstra.run(a.root_of[c])) total += d;
  }
  return total;
}

// ---------------------------------------------------------------------------
// k-medioids

namespace {

// Roots per component: proportional to size, at least one, at most size.
std::vector<Index> allocate_roots(const std::vector<Index>& sizes, Index n, Index m) {
  const std::size_t c = sizes.size();
  std::vector<double> quota(c);
  std::vector<Index> alloc(c);
  Index total = 0;
  for (std::size_t i = 0; i < c; ++i) {
    quota[i] = static_cast<double>(m) * static_cast<double>(sizes[i]) / static_cast<double>(n);
    alloc[i] = std::clamp<Index>(static_cast<Index>(std::floor(quota[i])), 1, sizes[i]);
    total += alloc[i];
  }
  while (total > m) {
    std::size_t pick = c;
    for (std::size_t i = 0; i < c; ++i) {
      if (alloc[i] > 1 && (pick == c || alloc[i] - quota[i] > alloc[pick] - quota[pick])) pick = i;
    }
    --alloc[pick];
    --total;
  }
  while (total < m) {
    std::size_t pick = c;
    for (std::size_t i = 0; i < c; ++i) {
      if (alloc[i] < sizes[i] && (pick == c || quota[i] - alloc[i] > quota[pick] - alloc[pick])) pick = i;
    }
    ++alloc[pick];
    ++total;
  }
  return alloc;
}

std::vector<Index> initial_roots(const EdgeDistanceGraph& g, Index m, std::uint64_t seed) {
  const Index n = g.size();
  Index num_comp = 0;
  const auto comp = connected_components(g, &num_comp);
  if (m < num_comp) {
    throw InputError("m = " + std::to_string(m) + " is smaller than the number of connected components (" +
                     std::to_string(num_comp) + "); a component would have no root");
  }
  std::vector<std::vector<Index>> nodes(static_cast<std::size_t>(num_comp));
  for (Index v = 0; v < n; ++v) nodes[comp[v]].push_back(v);
  std::vector<Index> sizes;
  for (const auto& c : nodes) sizes.push_back(static_cast<Index>(c.size()));
  const auto alloc = allocate_roots(sizes, n, m);

  std::mt19937_64 rng(seed);
  std::vector<Index> roots;
  roots.reserve(static_cast<std::size_t>(m));
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    auto& pool = nodes[c];
    // partial Fisher-Yates
    for (Index i = 0; i < alloc[c]; ++i) {
      const Index j = i + static_cast<Index>(uniform_index(rng, static_cast<std::uint64_t>(pool.size() - i)));
      std::swap(pool[i], pool[j]);
      roots.push_back(pool[i]);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

// Nearest-root assignment; clusters ordered by root index.
CoarseningAssignment assign(const EdgeDistanceGraph& g, const std::vector<Index>& roots, std::vector<double>& dist) {
  const Index n = g.size();
  const auto sp = multi_source_shortest_paths(g, roots);
  std::vector<Index> cluster_of_root(static_cast<std::size_t>(n), -1);
  for (std::size_t c = 0; c < roots.size(); ++c) cluster_of_root[roots[c]] = static_cast<Index>(c);
  CoarseningAssignment a;
  a.n = n;
  a.m = static_cast<Index>(roots.size());
  a.root_of = roots;
  a.cluster_of.resize(static_cast<std::size_t>(n));
  for (Index v = 0; v < n; ++v) {
    if (sp.nearest[v] == kNoSource) throw InputError("node " + std::to_string(v) + " cannot reach any root");
    a.cluster_of[v] = cluster_of_root[sp.nearest[v]];
  }
  dist = sp.dist;
  return a;
}

// Any node not connected to its root inside its cluster adopts the label of
// a neighbor that is, preferring the smallest resulting distance.
void repair_connectivity(const EdgeDistanceGraph& g, CoarseningAssignment& a, std::vector<double>& dist) {
  const Index n = g.size();
  std::vector<char> anchored(static_cast<std::size_t>(n), 0);
  std::vector<Index> stack;
  for (Index c = 0; c < a.m; ++c) {
    anchored[a.root_of[c]] = 1;
    stack.push_back(a.root_of[c]);
  }
  while (!stack.empty()) {
    const Index u = stack.back();
    stack.pop_back();
    for (Index v : g.neighbors(u)) {
      if (!anchored[v] && a.cluster_of[v] == a.cluster_of[u]) {
        anchored[v] = 1;
        stack.push_back(v);
      }
    }
  }
  if (std::all_of(anchored.begin(), anchored.end(), [](char x) { return x != 0; })) return;

  std::deque<Index> queue;
  for (Index v = 0; v < n; ++v) {
    if (!anchored[v]) dist[v] = kInf;
    else queue.push_back(v);
  }
  std::vector<char> fixed = anchored;
  while (!queue.empty()) {
    const Index u = queue.front();
    queue.pop_front();
    const auto nb = g.neighbors(u);
    const auto w = g.weights(u);
    for (std::size_t e = 0; e < nb.size(); ++e) {
      const Index v = nb[e];
      if (fixed[v]) continue;
      const double nd = dist[u] + w[e];
      if (better(nd, a.root_of[a.cluster_of[u]], dist[v],
                 std::isinf(dist[v]) ? n : a.root_of[a.cluster_of[v]])) {
        dist[v] = nd;
        a.cluster_of[v] = a.cluster_of[u];
        queue.push_back(v);
      }
    }
  }
}

}  // namespace

KMedioidsResult kmedioids(const EdgeDistanceGraph& g, Index m, std::uint64_t seed, int max_iters) {
  const Index n = g.size();
  if (m < 1 || m > n) {
    throw InputError("k-medioids needs 1 <= m <= n (m = " + std::to_string(m) + ", n = " + std::to_string(n) + ")");
  }
  KMedioidsResult result;
  std::vector<Index> roots = initial_roots(g, m, seed);
  std::vector<double> dist;
  ClusterDijkstra dijkstra(g);
  for (int iter = 0;; ++iter) {
    CoarseningAssignment a = assign(g, roots, dist);
    repair_connectivity(g, a, dist);
    double objective = 0.0;
    for (double d : dist) objective += d;
    result.objective.push_back(objective);
    result.iterations = iter;
    result.assignment = std::move(a);
    if (iter >= max_iters) break;

    // in-cluster medioid: minimal total induced-subgraph distance
    const auto members = members_by_cluster(result.assignment);
    std::vector<Index> next(roots.size());
    for (Index c = 0; c < m; ++c) {
      dijkstra.set_members(members[c]);
      Index best = roots[c];
      double best_total = kInf;
      for (Index cand : members[c]) {  // ascending node order: ties keep the lowest index
        double total = 0.0;
        for (double d : dijkstra.run(cand)) total += d;
        if (total < best_total) {
          best_total = total;
          best = cand;
        }
      }
      next[c] = best;
    }
    std::sort(next.begin(), next.end());
    if (next == roots) {
      result.converged = true;
      break;
    }
    roots = std::move(next);
  }
  return result;
}

SparsityPattern operator_pattern(const SparseSymMatrix& L) {
  return SparsityPattern::of(L.matrix()).with_diagonal();
}

SparsityPattern cluster_adjacency(const CoarseningAssignment& a, const SparsityPattern& operator_pattern) {
  if (operator_pattern.rows() != a.n || operator_pattern.cols() != a.n) {
    throw InputError("cluster_adjacency: pattern is not n x n");
  }
  std::vector<std::pair<Index, Index>> pos;
  pos.reserve(static_cast<std::size_t>(operator_pattern.nonzeros() + a.m));
  for (Index u = 0; u < a.n; ++u) {
    for (Index v : operator_pattern.row(u)) pos.emplace_back(a.cluster_of[u], a.cluster_of[v]);
  }
  for (Index c = 0; c < a.m; ++c) pos.emplace_back(c, c);
  return SparsityPattern::from_positions(a.m, a.m, std::move(pos));
}

CoarsePatterns sparsity_patterns(const CoarseningAssignment& a, const SparsityPattern& adjacency) {
  if (adjacency.rows() != a.m || adjacency.cols() != a.m) throw InputError("sparsity_patterns: Ã is not m x m");
  CoarsePatterns out;
  out.adjacency = adjacency;
  out.interpolation = pattern_product(a.K().transpose(), adjacency);
  out.coarse = pattern_product(adjacency, pattern_product(adjacency, adjacency));
  return out;
}

}  // namespace specoarse
