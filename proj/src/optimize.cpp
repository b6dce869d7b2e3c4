#include "specoarse/optimize.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "specoarse/error.hpp"
#include "specoarse/parallel.hpp"

namespace specoarse {

void OptimizerConfig::validate() const {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw InputError("gamma must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0)) throw InputError("beta1 must lie in (0, 1)");
  if (!(beta2 > 0.0 && beta2 < 1.0)) throw InputError("beta2 must lie in (0, 1)");
  if (!(epsilon > 0.0)) throw InputError("epsilon must be positive");
  if (stall_window < 1) throw InputError("stall window must be at least 1");
  if (max_iters < 0) throw InputError("max_iters must be non-negative");
  if (!(stall_rel_tol >= 0.0)) throw InputError("stall tolerance must be non-negative");
}

// ---------------------------------------------------------------------------
// InterpolationMatrix

SparseMatrix InterpolationMatrix::to_matrix() const {
  std::vector<Triplet> t;
  t.reserve(values.size());
  for (Index i = 0; i < rows(); ++i) {
    const auto r = pattern.row(i);
    const Index off = pattern.row_offset(i);
    for (std::size_t e = 0; e < r.size(); ++e) t.emplace_back(i, r[e], values[off + e]);
  }
  SparseMatrix g(rows(), cols());
  g.setFromTriplets(t.begin(), t.end());
  g.makeCompressed();
  return g;
}

DenseMatrix InterpolationMatrix::dense() const { return DenseMatrix(to_matrix()); }

InterpolationMatrix InterpolationMatrix::zeros(SparsityPattern pattern) {
  InterpolationMatrix g;
  g.values.assign(static_cast<std::size_t>(pattern.nonzeros()), 0.0);
  g.pattern = std::move(pattern);
  return g;
}

InterpolationMatrix InterpolationMatrix::from_assignment(const CoarseningAssignment& a, SparsityPattern pattern) {
  if (pattern.rows() != a.n || pattern.cols() != a.m) throw InputError("S_G shape does not match the assignment");
  InterpolationMatrix g = zeros(std::move(pattern));
  for (Index v = 0; v < a.n; ++v) {
    const Index pos = g.pattern.position(v, a.cluster_of[v]);
    if (pos < 0) throw InputError("S_G is missing the membership slot of node " + std::to_string(v));
    g.values[pos] = 1.0;
  }
  return g;
}

// ---------------------------------------------------------------------------
// energy and gradient

Precomputation precompute(const SparseSymMatrix& L, const DiagonalMass& M, const CoarseningAssignment& a,
                          const EigenBasis& basis) {
  const Index n = L.dim();
  if (M.dim() != n || a.n != n || basis.n() != n) {
    throw InputError("precompute: dimensions of L (" + std::to_string(n) + "), M (" + std::to_string(M.dim()) +
                     "), assignment (" + std::to_string(a.n) + ") and basis (" + std::to_string(basis.n()) +
                     ") differ");
  }
  M.require_positive("optimize");
  Precomputation pre;
  pre.L = L.matrix();
  pre.coarse_mass = a.lump(M);
  DenseMatrix LPhi = L.matrix() * basis.vectors;
  LPhi.array().colwise() /= M.diag().array();
  pre.A = a.restrict_rows(LPhi);
  pre.B = a.restrict_rows(basis.vectors);
  pre.null_vectors = basis.null_vectors();
  pre.restricted_null = a.restrict_rows(pre.null_vectors);
  return pre;
}

namespace {

void check_shape(const InterpolationMatrix& G, const Precomputation& pre) {
  if (G.rows() != pre.L.rows() || G.cols() != pre.B.rows()) {
    throw InputError("G is " + std::to_string(G.rows()) + "x" + std::to_string(G.cols()) + ", expected " +
                     std::to_string(pre.L.rows()) + "x" + std::to_string(pre.B.rows()));
  }
}

DenseMatrix residual(const SparseMatrix& g, const Precomputation& pre) {
  const DenseMatrix lgb = pre.L * (g * pre.B);
  DenseMatrix coarse = g.transpose() * lgb;
  coarse.array().colwise() /= pre.coarse_mass.diag().array();
  return pre.A - coarse;
}

}  // namespace

double energy(const InterpolationMatrix& G, const Precomputation& pre) {
  check_shape(G, pre);
  return 0.5 * weighted_frobenius_sq(residual(G.to_matrix(), pre), pre.coarse_mass);
}

std::vector<double> sparse_gradient(const InterpolationMatrix& G, const Precomputation& pre) {
  check_shape(G, pre);
  const SparseMatrix g = G.to_matrix();
  const DenseMatrix r = residual(g, pre);
  const DenseMatrix br = pre.B * r.transpose();
  const DenseMatrix z = -(br + br.transpose());
  const RowSparseMatrix y = pre.L * g;

  std::vector<double> grad(G.values.size(), 0.0);
  parallel_for(0, static_cast<std::size_t>(G.rows()), [&](std::size_t row) {
    const Index i = static_cast<Index>(row);
    const auto cols = G.pattern.row(i);
    const Index off = G.pattern.row_offset(i);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      double s = 0.0;
      for (RowSparseMatrix::InnerIterator it(y, i); it; ++it) s += it.value() * z(it.col(), cols[e]);
      grad[off + e] = s;
    }
  });
  return grad;
}

// ---------------------------------------------------------------------------
// projection

void project_nullspace(InterpolationMatrix& G, const DenseMatrix& restricted_null, const DenseMatrix& null_vectors) {
  const Index d = null_vectors.cols();
  if (restricted_null.cols() != d || restricted_null.rows() != G.cols() || null_vectors.rows() != G.rows()) {
    throw InputError("project_nullspace: PΦ₀ must be m×d and Φ₀ n×d");
  }
  if (d == 0) return;
  std::string failure;
  Index failed_row = -1;
  for (Index i = 0; i < G.rows(); ++i) {
    const auto cols = G.pattern.row(i);
    const Index off = G.pattern.row_offset(i);
    const Index s = static_cast<Index>(cols.size());
    DenseMatrix a(s, d);
    Vector g1(s);
    for (Index e = 0; e < s; ++e) {
      a.row(e) = restricted_null.row(cols[e]);
      g1[e] = G.values[off + e];
    }
    const Vector r = a.transpose() * g1 - null_vectors.row(i).transpose();
    if (s > 0 && r.isZero(0.0)) continue;
    const Eigen::JacobiSVD<DenseMatrix> svd(a);
    const auto& sv = svd.singularValues();
    if (s < d || sv.size() < d || !(sv[d - 1] > 1e-12 * sv[0])) {
      failed_row = i;
      break;
    }
    const Vector x = (a.transpose() * a).ldlt().solve(r);
    const Vector g = g1 - a * x;
    for (Index e = 0; e < s; ++e) G.values[off + e] = g[e];
  }
  if (failed_row >= 0) {
    throw NumericalError("null-space constraint is infeasible for row " + std::to_string(failed_row) +
                         " of G: its S_G support does not span the restricted null space");
  }
}

// ---------------------------------------------------------------------------
// NADAM

std::vector<double> nadam_step(const std::vector<double>& grad, NadamState& state, const OptimizerConfig& config) {
  if (state.m.size() != grad.size()) {
    state.m.assign(grad.size(), 0.0);
    state.v.assign(grad.size(), 0.0);
    state.t = 0;
  }
  ++state.t;
  const double b1 = config.beta1;
  const double b2 = config.beta2;
  const double c1 = 1.0 - std::pow(b1, state.t);
  const double c2 = 1.0 - std::pow(b2, state.t);
  std::vector<double> delta(grad.size());
  for (std::size_t i = 0; i < grad.size(); ++i) {
    const double g = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double m_hat = state.m[i] / c1;
    const double v_hat = state.v[i] / c2;
    delta[i] = (b1 * m_hat + (1.0 - b1) * g / c1) / (std::sqrt(v_hat) + config.epsilon);
  }
  return delta;
}

// ---------------------------------------------------------------------------
// assembly and driver

CoarsenedOperator assemble_coarse(const InterpolationMatrix& G, const SparseSymMatrix& L,
                                  const CoarseningAssignment& a, const DiagonalMass& M,
                                  const SparsityPattern& coarse_pattern) {
  if (G.rows() != L.dim() || G.cols() != a.m || coarse_pattern.rows() != a.m || coarse_pattern.cols() != a.m) {
    throw InputError("assemble_coarse: shapes of G, L, assignment and S_L̃ disagree");
  }
  const SparseMatrix g = G.to_matrix();
  const SparseMatrix gt = g.transpose();
  const SparseMatrix galerkin = spmm(gt, spmm(L.matrix(), g));
  const SparseMatrix sym = 0.5 * (galerkin + SparseMatrix(galerkin.transpose()));

  double inside_max = 0.0;
  double outside_max = 0.0;
  Index outside_row = -1;
  Index outside_col = -1;
  std::vector<Triplet> kept;
  kept.reserve(static_cast<std::size_t>(sym.nonZeros()));
  for (Index j = 0; j < sym.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(sym, j); it; ++it) {
      const double v = std::abs(it.value());
      if (coarse_pattern.contains(it.row(), j)) {
        inside_max = std::max(inside_max, v);
        kept.emplace_back(it.row(), j, it.value());
      } else if (v > outside_max) {
        outside_max = v;
        outside_row = it.row();
        outside_col = j;
      }
    }
  }
  if (outside_max > 1e-12 * inside_max) {
    throw NumericalError("coarse operator has entry (" + std::to_string(outside_row) + ", " +
                         std::to_string(outside_col) + ") outside the three-ring pattern");
  }
  SparseMatrix restricted(a.m, a.m);
  restricted.setFromTriplets(kept.begin(), kept.end());

  CoarsenedOperator out;
  out.L = SparseSymMatrix::from_matrix(std::move(restricted), L.unit_exponent());
  out.M = a.lump(M);
  out.G = G;
  out.assignment = a;
  return out;
}

CoarsenedOperator optimize(const SparseSymMatrix& L, const DiagonalMass& M, const CoarseningAssignment& a,
                           const CoarsePatterns& patterns, const EigenBasis& basis, const OptimizerConfig& config) {
  config.validate();
  a.validate();
  const Precomputation pre = precompute(L, M, a, basis);

  InterpolationMatrix g = InterpolationMatrix::from_assignment(a, patterns.interpolation);
  project_nullspace(g, pre.restricted_null, pre.null_vectors);
  double e = energy(g, pre);
  if (!std::isfinite(e)) throw NumericalError("initial energy is not finite");

  std::vector<EnergyRecord> trace{{0, e, e}};
  const double initial = e;
  double best = e;
  InterpolationMatrix best_g = g;
  NadamState state;
  int since_best = 0;
  int iter = 0;
  bool stalled = false;
  while (iter < config.max_iters) {
    ++iter;
    const auto grad = sparse_gradient(g, pre);
    const auto delta = nadam_step(grad, state, config);
    for (std::size_t i = 0; i < g.values.size(); ++i) g.values[i] -= config.gamma * delta[i];
    project_nullspace(g, pre.restricted_null, pre.null_vectors);
    e = energy(g, pre);
    if (!std::isfinite(e)) {
      throw NumericalError("energy diverged at iteration " + std::to_string(iter) + "; try a smaller gamma");
    }
    if (e < best * (1.0 - config.stall_rel_tol)) {
      best = e;
      best_g = g;
      since_best = 0;
    } else {
      ++since_best;
    }
    trace.push_back({iter, e, best});
    if (since_best >= config.stall_window) {
      stalled = true;
      break;
    }
  }

  CoarsenedOperator out = assemble_coarse(best_g, L, a, M, patterns.coarse);
  out.trace = std::move(trace);
  out.initial_energy = initial;
  out.final_energy = best;
  out.iterations = iter;
  out.stalled = stalled;
  return out;
}

void write_energy_csv(const std::vector<EnergyRecord>& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "iteration,energy,best_energy\n";
  char buf[96];
  for (const auto& r : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.iteration, r.energy, r.best_energy);
    out << buf;
  }
  if (!out) throw InputError("failed writing " + path.string());
}

}  // namespace specoarse
