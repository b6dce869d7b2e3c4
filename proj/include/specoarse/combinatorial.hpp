#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "specoarse/sparse.hpp"

namespace specoarse {

/// Symmetric non-negative edge weights in compressed adjacency form.
class EdgeDistanceGraph {
 public:
  struct Edge {
    Index a;
    Index b;
    double weight;
  };

  EdgeDistanceGraph() = default;
  /// Undirected edges; each must have a != b, weight >= 0, and appear once.
  EdgeDistanceGraph(Index n, std::span<const Edge> edges);

  Index size() const { return n_; }
  Index num_edges() const { return static_cast<Index>(neighbors_.size() / 2); }
  std::span<const Index> neighbors(Index v) const {
    return {neighbors_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  std::span<const double> weights(Index v) const {
    return {weights_.data() + offsets_[v], static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
  }
  /// Weight of edge (a, b), or nullopt.
  std::optional<double> weight(Index a, Index b) const;
  /// Number of undirected edges with weight exactly 0.
  Index zero_weight_edges() const;

 private:
  Index n_ = 0;
  std::vector<Index> offsets_{0};
  std::vector<Index> neighbors_;
  std::vector<double> weights_;
};

/// D_ij = max((M_ii + M_jj)^e / (−L_ij), 0) over the stored off-diagonal
/// entries of L, with e = (p + 1)/q from the unit exponents of L and M unless
/// `exponent` overrides it. Throws InputError when q == 0 without override.
EdgeDistanceGraph edge_distances(const SparseSymMatrix& L, const DiagonalMass& M,
                                 std::optional<double> exponent = std::nullopt);

inline constexpr Index kNoSource = -1;

struct ShortestPaths {
  std::vector<double> dist;      ///< +inf where unreachable
  std::vector<Index> nearest;    ///< node index of the nearest source, kNoSource if unreachable
};

/// Label-correcting (Bellman-Ford style) multi-source shortest paths. Each
/// source owns itself; other ties in distance go to the source with the
/// lowest node index.
ShortestPaths multi_source_shortest_paths(const EdgeDistanceGraph& g, std::span<const Index> sources);

/// Connected component id per node (ids ordered by smallest member).
std::vector<Index> connected_components(const EdgeDistanceGraph& g, Index* count = nullptr);

/// Cluster membership (K) and root selection (P) of a coarsening.
struct CoarseningAssignment {
  Index n = 0;
  Index m = 0;
  std::vector<Index> cluster_of;  ///< length n, ids in [0, m)
  std::vector<Index> root_of;     ///< length m, distinct node indices

  /// m×n, K(c, v) = 1 iff cluster_of[v] == c.
  SparsityPattern K() const;
  /// m×n, P(c, root_of[c]) = 1.
  SparsityPattern P() const;
  SparseMatrix K_matrix() const;

  /// Throws InputError unless K has one 1 per column, P one per row, roots
  /// are distinct, and cluster_of[root_of[c]] == c.
  void validate() const;

  /// Rows of x at the roots (P x).
  DenseMatrix restrict_rows(const DenseMatrix& x) const;
  /// K M Kᵀ: per-cluster summed masses (summed in node order).
  DiagonalMass lump(const DiagonalMass& mass) const;

  /// Identity coarsening: every node its own singleton cluster.
  static CoarseningAssignment identity(Index n);
};

/// True iff every cluster is non-empty and connected in g.
bool clusters_connected(const EdgeDistanceGraph& g, const CoarseningAssignment& a);

/// Σ_v dist(v, root of v) restricted to each cluster's induced subgraph.
double clustering_objective(const EdgeDistanceGraph& g, const CoarseningAssignment& a);

struct KMedioidsResult {
  CoarseningAssignment assignment;
  std::vector<double> objective;  ///< per Lloyd iteration, non-increasing
  int iterations = 0;
  bool converged = false;  ///< roots stopped changing before max_iters
};

inline constexpr int kDefaultMedioidIterations = 100;

/// Lloyd-style k-medioids on shortest-path distances: alternate nearest-root
/// assignment and in-cluster medioid update until roots repeat. Initial
/// roots are a seeded uniform sample with at least one per connected
/// component, allocated by node count (largest remainder). Ties go to the
/// lowest node index. Throws InputError if m > n or m is smaller than the
/// number of components.
KMedioidsResult kmedioids(const EdgeDistanceGraph& g, Index m, std::uint64_t seed,
                          int max_iters = kDefaultMedioidIterations);

/// Pattern of L including the full diagonal (S_L).
SparsityPattern operator_pattern(const SparseSymMatrix& L);

/// Ã = K S_L Kᵀ with full diagonal.
SparsityPattern cluster_adjacency(const CoarseningAssignment& a, const SparsityPattern& operator_pattern);

struct CoarsePatterns {
  SparsityPattern adjacency;      ///< Ã, m×m
  SparsityPattern interpolation;  ///< S_G = Kᵀ Ã, n×m
  SparsityPattern coarse;         ///< S_L̃ = Ã³, m×m
};

CoarsePatterns sparsity_patterns(const CoarseningAssignment& a, const SparsityPattern& adjacency);

}  // namespace specoarse
