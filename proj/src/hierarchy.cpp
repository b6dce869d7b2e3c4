#include "specoarse/hierarchy.hpp"

#include <string>

#include "specoarse/error.hpp"
#include "specoarse/evaluate.hpp"

namespace specoarse {

namespace {

template <class E>
[[noreturn]] void rethrow_at_level(const E& e, std::size_t level) {
  throw E("level " + std::to_string(level) + ": " + e.what());
}

}  // namespace

Hierarchy build_hierarchy(const SparseSymMatrix& L, const DiagonalMass& M, const HierarchyConfig& config) {
  const Index n = L.dim();
  if (M.dim() != n) throw InputError("L and M dimensions differ");
  std::vector<Index> sizes = config.sizes;
  if (!sizes.empty() && sizes.front() == n) sizes.erase(sizes.begin());
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const Index prev = i == 0 ? n : sizes[i - 1];
    if (sizes[i] < 1 || sizes[i] >= prev) {
      throw InputError("hierarchy sizes must be strictly descending and below n = " + std::to_string(n));
    }
  }
  if (!sizes.empty() && config.ks.size() != 1 && config.ks.size() != sizes.size()) {
    throw InputError("give one k or one k per coarse level (" + std::to_string(sizes.size()) + " levels)");
  }

  Hierarchy h;
  h.L0 = L;
  h.M0 = M;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    const Index k = config.ks.size() == 1 ? config.ks[0] : config.ks[i];
    const Index m = sizes[i];
    if (m <= 2 * k && !config.allow_small_m) {
      throw InputError("level " + std::to_string(i + 1) + ": " + small_m_warning(m, k));
    }
    PipelineConfig pc = config.pipeline;
    pc.level = i + 1;
    HierarchyLevel level;
    level.size = m;
    level.k = k;
    try {
      level.result = coarsen(h.L(i), h.M(i), m, k, pc);
    } catch (const InputError& e) {
      rethrow_at_level(e, i + 1);
    } catch (const NumericalError& e) {
      rethrow_at_level(e, i + 1);
    }
    if (i == 0) h.basis0 = level.result.fine_basis;
    const auto& roots = level.result.assignment.root_of;
    level.roots_total.resize(roots.size());
    for (std::size_t c = 0; c < roots.size(); ++c) {
      level.roots_total[c] = i == 0 ? roots[c] : h.levels[i - 1].roots_total[roots[c]];
    }
    const Index kc = std::min(h.basis0.k(), level.result.coarse_basis.k());
    if (kc >= 1) {
      level.composed_map =
          functional_map(h.basis0, level.result.coarse_basis, level.roots_total, level.result.coarse.M, kc);
      level.composed_offdiag = offdiag_ratio(level.composed_map);
    }
    h.levels.push_back(std::move(level));
  }
  return h;
}

}  // namespace specoarse
