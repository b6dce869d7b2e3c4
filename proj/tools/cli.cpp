#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "specoarse/error.hpp"
#include "specoarse/evaluate.hpp"
#include "specoarse/hierarchy.hpp"
#include "specoarse/matrix_market.hpp"
#include "specoarse/mesh.hpp"
#include "specoarse/operators.hpp"
#include "specoarse/parallel.hpp"
#include "specoarse/pipeline.hpp"
#include "specoarse/png.hpp"
#include "specoarse/rng.hpp"
#include "specoarse/shapes.hpp"

namespace specoarse::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kManifestVersion = 1;
constexpr int kMetricsVersion = 1;

struct GenMeshArgs {
  std::string shape = "icosphere";
  int level = 3;
  int rows = 2;
  double amplitude = 0.15;
  std::string out;
};

struct BuildOpArgs {
  std::string mesh;
  std::string type = "cotan";
  double alpha = 0.0;
  std::string out_prefix;
};

struct OptimizerArgs {
  std::uint64_t seed = 0;
  double gamma = 0.02;
  int max_iters = 1000;
  int stall = 10;
  std::optional<double> dist_exponent;
};

struct CoarsenArgs {
  std::string L;
  std::string M;
  Index m = 0;
  Index k = 0;
  OptimizerArgs opt;
  std::string out;
};

struct EvalArgs {
  std::string fine_L;
  std::string fine_M;
  std::string coarse_L;
  std::string coarse_M;
  std::string P;
  Index k = 0;
  Index split = 0;
  double gap_tol = 1e-3;
  std::uint64_t seed = 0;
  std::string out;
};

struct HierarchyArgs {
  std::string L;
  std::string M;
  std::vector<Index> sizes;
  std::vector<Index> ks;
  bool allow_small_m = false;
  OptimizerArgs opt;
  std::string out;
};

void write_json(const json& j, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw InputError("cannot create directory " + dir.string() + ": " + ec.message());
}

void write_roots_csv(const std::vector<Index>& roots, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "root\n";
  for (Index r : roots) out << r << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

void write_assignment_csv(const CoarseningAssignment& a, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << "node,cluster\n";
  for (Index v = 0; v < a.n; ++v) out << v << ',' << a.cluster_of[v] << '\n';
  if (!out) throw InputError("failed writing " + path.string());
}

std::vector<Index> read_roots(const fs::path& path) {
  if (path.extension() == ".mtx") {
    const SparsityPattern p = read_pattern(path);
    std::vector<Index> roots;
    for (Index c = 0; c < p.rows(); ++c) {
      const auto row = p.row(c);
      if (row.size() != 1) throw InputError(path.string() + ": row " + std::to_string(c) + " of P must hold one entry");
      roots.push_back(row[0]);
    }
    return roots;
  }
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<Index> roots;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || (lineno == 1 && line == "root")) continue;
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(line, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != line.size() || v < 0) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected a non-negative node index");
    }
    roots.push_back(static_cast<Index>(v));
  }
  if (roots.empty()) throw InputError(path.string() + ": no roots");
  return roots;
}

json optimizer_json(const OptimizerConfig& c) {
  return {{"gamma", c.gamma},         {"beta1", c.beta1},           {"beta2", c.beta2},
          {"epsilon", c.epsilon},     {"stall_window", c.stall_window}, {"max_iters", c.max_iters},
          {"stall_rel_tol", c.stall_rel_tol}};
}

json eigen_json(const EigenOptions& e) {
  return {{"tol", e.tol}, {"block_size", e.block_size}, {"krylov_dim", e.krylov_dim},
          {"max_restarts", e.max_restarts}, {"shift", e.shift ? json(*e.shift) : json("auto")}};
}

PipelineConfig pipeline_config(const OptimizerArgs& a) {
  PipelineConfig pc;
  pc.seed = a.seed;
  pc.dist_exponent = a.dist_exponent;
  pc.optimizer.gamma = a.gamma;
  pc.optimizer.max_iters = a.max_iters;
  pc.optimizer.stall_window = a.stall;
  pc.optimizer.validate();
  return pc;
}

json pipeline_json(const PipelineConfig& pc) {
  return {{"seed", pc.seed},
          {"dist_exponent", pc.dist_exponent ? json(*pc.dist_exponent) : json("(p+1)/q")},
          {"medioid_iters", pc.medioid_iters},
          {"optimizer", optimizer_json(pc.optimizer)},
          {"eigen", eigen_json(pc.eigen)},
          {"threads", thread_count()}};
}

json result_json(const CoarseningResult& r) {
  return {{"n", r.assignment.n},
          {"m", r.assignment.m},
          {"k", r.fine_basis.k()},
          {"fine_null_dim", r.fine_basis.null_dim},
          {"coarse_null_dim", r.coarse_basis.null_dim},
          {"medioid_iterations", r.medioids.iterations},
          {"medioid_converged", r.medioids.converged},
          {"initial_energy", r.coarse.initial_energy},
          {"final_energy", r.coarse.final_energy},
          {"iterations", r.coarse.iterations},
          {"stalled", r.coarse.stalled},
          {"coarse_nonzeros", r.coarse.L.nonzeros()},
          {"coarse_min_eigenvalue", r.coarse_bounds.min},
          {"coarse_max_eigenvalue", r.coarse_bounds.max},
          {"coarse_psd", r.coarse_bounds.psd}};
}

void report_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
  for (const auto& w : warnings) err << "warning: " << w << '\n';
}

void write_coarse_outputs(const CoarseningResult& r, const fs::path& dir) {
  write_market(r.coarse.L, dir / "Ltilde.mtx");
  write_market(r.coarse.M, dir / "Mtilde.mtx");
  write_market(r.coarse.G.to_matrix(), dir / "G.mtx");
  write_assignment_csv(r.assignment, dir / "assignment.csv");
  write_roots_csv(r.assignment.root_of, dir / "roots.csv");
  write_energy_csv(r.coarse.trace, dir / "energy.csv");
}

// ---------------------------------------------------------------------------

int cmd_gen_mesh(const GenMeshArgs& a, std::ostream& out) {
  TriangleMesh mesh;
  if (a.shape == "icosphere") {
    mesh = shapes::icosphere(a.level);
  } else if (a.shape == "bumpy-cube") {
    mesh = shapes::bumpy_cube(a.level, a.amplitude);
  } else if (a.shape == "grid") {
    mesh = shapes::grid_strip(a.level, a.rows);
  } else {
    throw InputError("unknown shape '" + a.shape + "'");
  }
  write_obj(mesh, a.out);
  out << a.out << ": " << mesh.num_vertices() << " vertices, " << mesh.num_faces() << " faces\n";
  return kExitOk;
}

int cmd_build_op(const BuildOpArgs& a, std::ostream& out) {
  if (!fs::exists(a.mesh)) throw InputError("mesh file not found: " + a.mesh);
  const TriangleMesh mesh = load_obj(a.mesh);
  SparseSymMatrix L;
  if (a.type == "cotan") {
    L = cotan_laplacian(mesh);
  } else if (a.type == "aniso") {
    L = anisotropic_laplacian(mesh, a.alpha);
  } else {
    throw InputError("unknown operator type '" + a.type + "' (expected cotan or aniso)");
  }
  const DiagonalMass M = barycentric_mass(mesh);
  const fs::path prefix = a.out_prefix;
  if (prefix.has_parent_path()) make_dir(prefix.parent_path());
  const fs::path l_path = a.out_prefix + "L.mtx";
  const fs::path m_path = a.out_prefix + "M.mtx";
  write_market(L, l_path);
  write_market(M, m_path);
  json manifest = {{"version", kManifestVersion},
                   {"command", "build-op"},
                   {"config", {{"mesh", a.mesh}, {"type", a.type}, {"alpha", a.alpha}, {"out_prefix", a.out_prefix}}},
                   {"result", {{"n", L.dim()}, {"nonzeros", L.nonzeros()}, {"faces", mesh.num_faces()}}},
                   {"outputs", {l_path.filename().string(), m_path.filename().string()}}};
  write_json(manifest, a.out_prefix + "manifest.json");
  out << "wrote " << l_path.string() << " and " << m_path.string() << " (n = " << L.dim() << ")\n";
  return kExitOk;
}

int cmd_coarsen(const CoarsenArgs& a, std::ostream& out, std::ostream& err) {
  const SparseSymMatrix L = read_sym_matrix(a.L);
  const DiagonalMass M = read_mass(a.M);
  if (L.dim() != M.dim()) {
    throw InputError("L is " + std::to_string(L.dim()) + "x" + std::to_string(L.dim()) + " but M is " +
                     std::to_string(M.dim()) + "x" + std::to_string(M.dim()));
  }
  if (a.m >= L.dim()) {
    throw InputError("--m must be below n (m = " + std::to_string(a.m) + ", n = " + std::to_string(L.dim()) + ")");
  }
  const PipelineConfig pc = pipeline_config(a.opt);
  if (auto w = small_m_warning(a.m, a.k); !w.empty()) err << "warning: " << w << '\n';
  const CoarseningResult r = coarsen(L, M, a.m, a.k, pc);
  std::vector<std::string> warnings;
  for (const auto& w : r.warnings) {
    if (w != small_m_warning(a.m, a.k)) warnings.push_back(w);
  }
  report_warnings(warnings, err);

  const fs::path dir = a.out;
  make_dir(dir);
  write_coarse_outputs(r, dir);
  json manifest = {{"version", kManifestVersion},
                   {"command", "coarsen"},
                   {"config", {{"L", a.L}, {"M", a.M}, {"m", a.m}, {"k", a.k}, {"out", a.out}, {"pipeline", pipeline_json(pc)}}},
                   {"result", result_json(r)},
                   {"warnings", r.warnings},
                   {"outputs", {"Ltilde.mtx", "Mtilde.mtx", "G.mtx", "assignment.csv", "roots.csv", "energy.csv"}}};
  write_json(manifest, dir / "manifest.json");
  out << "coarsened " << L.dim() << " -> " << a.m << ": energy " << r.coarse.initial_energy << " -> "
      << r.coarse.final_energy << " in " << r.coarse.iterations << " iterations\n";
  return kExitOk;
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  const SparseSymMatrix fL = read_sym_matrix(a.fine_L);
  const DiagonalMass fM = read_mass(a.fine_M);
  const SparseSymMatrix cL = read_sym_matrix(a.coarse_L);
  const DiagonalMass cM = read_mass(a.coarse_M);
  const std::vector<Index> roots = read_roots(a.P);
  const Index n = fL.dim();
  const Index m = cL.dim();
  if (fM.dim() != n) {
    throw InputError("fine L is " + std::to_string(n) + "x" + std::to_string(n) + " but fine M is " +
                     std::to_string(fM.dim()) + "x" + std::to_string(fM.dim()));
  }
  if (cM.dim() != m) {
    throw InputError("coarse L is " + std::to_string(m) + "x" + std::to_string(m) + " but coarse M is " +
                     std::to_string(cM.dim()) + "x" + std::to_string(cM.dim()));
  }
  if (static_cast<Index>(roots.size()) != m) {
    throw InputError("P has " + std::to_string(roots.size()) + " roots but the coarse operator is " +
                     std::to_string(m) + "x" + std::to_string(m));
  }
  for (Index r : roots) {
    if (r >= n) throw InputError("root " + std::to_string(r) + " exceeds the fine dimension " + std::to_string(n));
  }
  if (a.k < 1 || a.k >= std::min(n, m + 1)) {
    throw InputError("--k must lie in [1, " + std::to_string(std::min(n, m + 1) - 1) + "] (fine n = " +
                     std::to_string(n) + ", coarse m = " + std::to_string(m) + ")");
  }
  if (a.split < 0 || a.split >= a.k) throw InputError("--split must lie in [0, k)");

  EigenOptions eo;
  eo.seed = stage_seed(a.seed, Stage::kFineEigen);
  const EigenBasis fine = smallest_k(fL, fM, a.k, eo);
  eo.seed = stage_seed(a.seed, Stage::kCoarseEigen);
  const EigenBasis coarse = smallest_k(cL, cM, a.k, eo);

  const DenseMatrix C = functional_map(fine, coarse, roots, cM, a.k);
  const auto groups = grouped_alignment(fine, coarse, roots, cM, a.gap_tol);
  const auto pairs = eigenvalue_compare(fine, coarse);
  const Index first_mode = std::max<Index>(fine.null_dim, 1);
  const EigenvalueSummary summary = summarize(pairs, first_mode, a.k);

  const fs::path dir = a.out;
  make_dir(dir);
  write_matrix_csv(C, dir / "C.csv");
  render_heatmap(C, dir / "C.png");
  write_eigenvalue_pairs_csv(pairs, dir / "eigenvalues.csv");

  json group_scores = json::array();
  for (const auto& g : groups) group_scores.push_back({{"first", g.first}, {"size", g.size}, {"score", g.score}});
  json metrics = {{"version", kMetricsVersion},
                  {"k", a.k},
                  {"offdiag_ratio", offdiag_ratio(C)},
                  {"eigenvalue_errors", {{"median", summary.median}, {"max", summary.max},
                                         {"first", summary.first}, {"last", summary.last}}},
                  {"group_scores", group_scores},
                  {"fine_null_dim", fine.null_dim},
                  {"coarse_null_dim", coarse.null_dim}};
  if (a.split > 0) {
    const Index t = a.k - a.split;
    metrics["blocks"] = {{"split", a.split},
                         {"leading_offdiag_ratio", offdiag_ratio(C.topLeftCorner(a.split, a.split))},
                         {"trailing_offdiag_ratio", offdiag_ratio(C.bottomRightCorner(t, t))}};
  }
  write_json(metrics, dir / "metrics.json");
  json manifest = {{"version", kManifestVersion},
                   {"command", "eval"},
                   {"config", {{"fine_L", a.fine_L}, {"fine_M", a.fine_M}, {"coarse_L", a.coarse_L},
                               {"coarse_M", a.coarse_M}, {"P", a.P}, {"k", a.k}, {"split", a.split},
                               {"gap_tol", a.gap_tol}, {"seed", a.seed}, {"eigen", eigen_json(eo)},
                               {"out", a.out}}},
                   {"outputs", {"C.csv", "C.png", "metrics.json", "eigenvalues.csv"}}};
  write_json(manifest, dir / "manifest.json");
  out << "offdiag_ratio " << metrics["offdiag_ratio"].get<double>() << ", median eigenvalue error "
      << summary.median << '\n';
  return kExitOk;
}

int cmd_hierarchy(const HierarchyArgs& a, std::ostream& out, std::ostream& err) {
  const SparseSymMatrix L = read_sym_matrix(a.L);
  const DiagonalMass M = read_mass(a.M);
  if (L.dim() != M.dim()) {
    throw InputError("L is " + std::to_string(L.dim()) + "x" + std::to_string(L.dim()) + " but M is " +
                     std::to_string(M.dim()) + "x" + std::to_string(M.dim()));
  }
  HierarchyConfig hc;
  hc.sizes = a.sizes;
  hc.ks = a.ks;
  hc.allow_small_m = a.allow_small_m;
  hc.pipeline = pipeline_config(a.opt);
  const Hierarchy h = build_hierarchy(L, M, hc);

  const fs::path dir = a.out;
  make_dir(dir / "level0");
  write_market(L, dir / "level0" / "L.mtx");
  write_market(M, dir / "level0" / "M.mtx");
  json levels = json::array();
  levels.push_back({{"level", 0}, {"size", L.dim()}});
  for (std::size_t i = 0; i < h.levels.size(); ++i) {
    const auto& lv = h.levels[i];
    const fs::path ldir = dir / ("level" + std::to_string(i + 1));
    make_dir(ldir);
    write_coarse_outputs(lv.result, ldir);
    write_roots_csv(lv.roots_total, ldir / "roots_total.csv");
    json entry = {{"level", i + 1}, {"size", lv.size}, {"k", lv.k}, {"result", result_json(lv.result)},
                  {"warnings", lv.result.warnings}};
    if (lv.composed_map.size() > 0) {
      write_matrix_csv(lv.composed_map, ldir / "C_composed.csv");
      render_heatmap(lv.composed_map, ldir / "C_composed.png");
      entry["composed_offdiag_ratio"] = lv.composed_offdiag;
      entry["composed_k"] = lv.composed_map.rows();
    }
    for (const auto& w : lv.result.warnings) err << "warning: level " << i + 1 << ": " << w << '\n';
    levels.push_back(entry);
  }
  write_json({{"version", kMetricsVersion}, {"levels", levels}}, dir / "summary.json");
  json manifest = {{"version", kManifestVersion},
                   {"command", "hierarchy"},
                   {"config", {{"L", a.L}, {"M", a.M}, {"sizes", a.sizes}, {"k", a.ks},
                               {"allow_small_m", a.allow_small_m}, {"out", a.out},
                               {"pipeline", pipeline_json(hc.pipeline)}}},
                   {"outputs", {"summary.json", "level0/"}}};
  write_json(manifest, dir / "manifest.json");
  out << "built " << h.num_levels() << " levels\n";
  return kExitOk;
}

void add_optimizer_flags(CLI::App* app, OptimizerArgs& o) {
  app->add_option("--seed", o.seed, "Run seed")->capture_default_str();
  app->add_option("--gamma", o.gamma, "Optimizer step size")->capture_default_str();
  app->add_option("--max-iters", o.max_iters, "Optimizer iteration cap")->capture_default_str();
  app->add_option("--stall", o.stall, "Stop after this many iterations without improvement")->capture_default_str();
  app->add_option("--dist-exponent", o.dist_exponent, "Override (p+1)/q in the edge distance");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Spectral coarsening of sparse PSD operators", "specoarse"};
  app.require_subcommand(1);

  GenMeshArgs gen;
  auto* gen_cmd = app.add_subcommand("gen-mesh", "Write a procedural test mesh");
  gen_cmd->add_option("--shape", gen.shape, "icosphere, bumpy-cube or grid")->capture_default_str();
  gen_cmd->add_option("--level", gen.level, "Subdivisions, cube resolution or grid columns")->capture_default_str();
  gen_cmd->add_option("--rows", gen.rows, "Grid rows")->capture_default_str();
  gen_cmd->add_option("--amplitude", gen.amplitude, "Bump amplitude")->capture_default_str();
  gen_cmd->add_option("--out", gen.out, "Output OBJ")->required();

  BuildOpArgs build;
  auto* build_cmd = app.add_subcommand("build-op", "Build L and M from a triangle mesh");
  build_cmd->add_option("--mesh", build.mesh, "Input OBJ")->required();
  build_cmd->add_option("--type", build.type, "cotan or aniso")->capture_default_str();
  build_cmd->add_option("--alpha", build.alpha, "Anisotropy strength")->capture_default_str();
  build_cmd->add_option("--out-prefix", build.out_prefix, "Prefix for L.mtx and M.mtx")->required();

  CoarsenArgs co;
  auto* co_cmd = app.add_subcommand("coarsen", "Coarsen an operator pair");
  co_cmd->add_option("--L", co.L, "Operator (Matrix Market)")->required();
  co_cmd->add_option("--M", co.M, "Diagonal mass (Matrix Market)")->required();
  co_cmd->add_option("--m", co.m, "Number of coarse nodes")->required();
  co_cmd->add_option("--k", co.k, "Number of eigenvectors to preserve")->required();
  add_optimizer_flags(co_cmd, co.opt);
  co_cmd->add_option("--out", co.out, "Output directory")->required();

  EvalArgs ev;
  auto* ev_cmd = app.add_subcommand("eval", "Evaluate spectral preservation");
  ev_cmd->add_option("--fine-L", ev.fine_L)->required();
  ev_cmd->add_option("--fine-M", ev.fine_M)->required();
  ev_cmd->add_option("--coarse-L", ev.coarse_L)->required();
  ev_cmd->add_option("--coarse-M", ev.coarse_M)->required();
  ev_cmd->add_option("--P", ev.P, "roots.csv or an m×n pattern .mtx")->required();
  ev_cmd->add_option("--k", ev.k, "Modes in the functional map")->required();
  ev_cmd->add_option("--split", ev.split, "Report leading/trailing block metrics at this mode")->capture_default_str();
  ev_cmd->add_option("--gap-tol", ev.gap_tol, "Relative gap for eigenvalue groups")->capture_default_str();
  ev_cmd->add_option("--seed", ev.seed, "Eigensolver seed")->capture_default_str();
  ev_cmd->add_option("--out", ev.out, "Output directory")->required();

  HierarchyArgs hi;
  auto* hi_cmd = app.add_subcommand("hierarchy", "Build a multilevel hierarchy");
  hi_cmd->add_option("--L", hi.L)->required();
  hi_cmd->add_option("--M", hi.M)->required();
  hi_cmd->add_option("--sizes", hi.sizes, "Descending level sizes")->required()->delimiter(',');
  hi_cmd->add_option("--k", hi.ks, "Shared k or one per level")->required()->delimiter(',');
  hi_cmd->add_flag("--allow-small-m", hi.allow_small_m, "Permit levels with m <= 2k");
  add_optimizer_flags(hi_cmd, hi.opt);
  hi_cmd->add_option("--out", hi.out, "Output directory")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen_mesh(gen, out);
    if (*build_cmd) return cmd_build_op(build, out);
    if (*co_cmd) return cmd_coarsen(co, out, err);
    if (*ev_cmd) return cmd_eval(ev, out);
    if (*hi_cmd) return cmd_hierarchy(hi, out, err);
  } catch (const InputError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}

}  // namespace specoarse::cli
