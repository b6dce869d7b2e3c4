#include <doctest.h>

#include <set>

#include "../support.hpp"
#include "specoarse/error.hpp"
#include "specoarse/hierarchy.hpp"

using namespace specoarse;

TEST_CASE("hierarchy with only the input level is a no-op") {
  const auto op = fixtures::sphere_operator(2);
  HierarchyConfig cfg;
  cfg.sizes = {op.L.dim()};
  cfg.ks = {10};
  const auto h = build_hierarchy(op.L, op.M, cfg);
  CHECK(h.num_levels() == 1);
  CHECK(h.levels.empty());
  CHECK(DenseMatrix(h.L(0).matrix()) == DenseMatrix(op.L.matrix()));
  CHECK(h.M(0).diag() == op.M.diag());
}

TEST_CASE("three-level hierarchy") {
  const auto op = fixtures::sphere_operator(3);
  HierarchyConfig cfg;
  cfg.sizes = {op.L.dim(), 120, 40};
  cfg.ks = {12, 8};
  cfg.pipeline.seed = 11;
  const auto h = build_hierarchy(op.L, op.M, cfg);
  REQUIRE(h.num_levels() == 3);
  CHECK(h.basis0.k() == 12);
  const Index expect_sizes[] = {120, 40};
  const Index expect_k[] = {12, 8};
  for (std::size_t i = 0; i < h.levels.size(); ++i) {
    const auto& lv = h.levels[i];
    CHECK(lv.size == expect_sizes[i]);
    CHECK(lv.k == expect_k[i]);
    CHECK(h.L(i + 1).dim() == lv.size);
    CHECK(h.M(i + 1).total() == doctest::Approx(op.M.total()).epsilon(1e-12));
    CHECK(lv.result.coarse_bounds.psd);
    CHECK(lv.result.coarse.final_energy < lv.result.coarse.initial_energy);
    CHECK(lv.result.coarse_basis.null_dim == 1);
    CHECK(lv.result.assignment.n == h.L(i).dim());
    REQUIRE(lv.roots_total.size() == static_cast<std::size_t>(lv.size));
    std::set<Index> distinct(lv.roots_total.begin(), lv.roots_total.end());
    CHECK(distinct.size() == lv.roots_total.size());
    CHECK(*distinct.rbegin() < op.L.dim());
    CHECK(lv.composed_map.rows() == std::min<Index>(12, lv.k));
    CHECK(lv.composed_map.cols() == std::min<Index>(12, lv.k));
    CHECK(std::abs(lv.composed_map(0, 0)) == doctest::Approx(1.0).epsilon(1e-6));
  }
  const auto& r1 = h.levels[0].roots_total;
  for (std::size_t c = 0; c < h.levels[1].roots_total.size(); ++c) {
    CHECK(h.levels[1].roots_total[c] == r1[h.levels[1].result.assignment.root_of[c]]);
  }
}

TEST_CASE("hierarchy input errors") {
  const auto op = fixtures::sphere_operator(2);
  HierarchyConfig cfg;
  cfg.ks = {5};
  cfg.sizes = {60, 80};
  CHECK_THROWS_AS(build_hierarchy(op.L, op.M, cfg), InputError);
  cfg.sizes = {op.L.dim() + 1};
  CHECK_THROWS_AS(build_hierarchy(op.L, op.M, cfg), InputError);
  cfg.sizes = {60, 30};
  cfg.ks = {5, 5, 5};
  CHECK_THROWS_AS(build_hierarchy(op.L, op.M, cfg), InputError);
  cfg.ks = {20};
  try {
    build_hierarchy(op.L, op.M, cfg);
    FAIL("expected the small-m error");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("level 2") != std::string::npos);
  }
  cfg.allow_small_m = true;
  cfg.sizes = {60};
  CHECK(build_hierarchy(op.L, op.M, cfg).levels.size() == 1);
}
