#include "specoarse/mesh.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "specoarse/error.hpp"

namespace specoarse {

namespace {

// "12", "12/3", "12//4", "12/3/4" -> 12; negative values are relative.
long long parse_index(const std::string& token, bool& ok) {
  const std::string head = token.substr(0, token.find('/'));
  try {
    std::size_t used = 0;
    const long long v = std::stoll(head, &used);
    ok = used == head.size();
    return v;
  } catch (const std::exception&) {
    ok = false;
    return 0;
  }
}

}  // namespace

TriangleMesh load_obj(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open mesh '" + path.string() + "'");
  TriangleMesh mesh;
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::pair<std::vector<long long>, std::size_t>> raw_faces;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream rec(line);
    std::string kind;
    if (!(rec >> kind) || kind[0] == '#') continue;
    const std::string loc = path.string() + ":" + std::to_string(lineno) + ": ";
    if (kind == "v") {
      Point3 p;
      if (!(rec >> p.x() >> p.y() >> p.z())) throw InputError(loc + "malformed vertex");
      mesh.vertices.push_back(p);
    } else if (kind == "f") {
      std::vector<long long> idx;
      std::string tok;
      while (rec >> tok) {
        bool ok = false;
        const long long v = parse_index(tok, ok);
        if (!ok || v == 0) throw InputError(loc + "malformed face index '" + tok + "'");
        // relative indices refer to vertices read so far
        idx.push_back(v > 0 ? v - 1 : static_cast<long long>(mesh.vertices.size()) + v);
      }
      if (idx.size() < 3) throw InputError(loc + "face with fewer than 3 vertices");
      raw_faces.emplace_back(std::move(idx), lineno);
    }
  }
  if (mesh.vertices.empty() || raw_faces.empty()) {
    throw InputError("mesh '" + path.string() + "' has no vertices or no faces");
  }
  const auto nv = static_cast<long long>(mesh.vertices.size());
  for (const auto& [idx, ln] : raw_faces) {
    const std::string loc = path.string() + ":" + std::to_string(ln) + ": ";
    for (long long v : idx) {
      if (v < 0 || v >= nv) throw InputError(loc + "face index out of range");
    }
    for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
      const Face f{idx[0], idx[k], idx[k + 1]};
      if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2]) {
        throw InputError(loc + "degenerate face (repeated vertex index)");
      }
      mesh.faces.push_back(f);
    }
  }
  return mesh;
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot open '" + path.string() + "' for writing");
  char buf[96];
  for (const auto& v : mesh.vertices) {
    std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
    out << buf;
  }
  for (const auto& f : mesh.faces) out << "f " << f[0] + 1 << " " << f[1] + 1 << " " << f[2] + 1 << "\n";
  if (!out) throw InputError("failed writing '" + path.string() + "'");
}

double face_area(const TriangleMesh& mesh, Index f) {
  const auto& [a, b, c] = mesh.faces[f];
  const Point3& pa = mesh.vertices[a];
  return 0.5 * (mesh.vertices[b] - pa).cross(mesh.vertices[c] - pa).norm();
}

double bounding_box_diagonal(const TriangleMesh& mesh) {
  if (mesh.vertices.empty()) return 0.0;
  Point3 lo = mesh.vertices.front(), hi = lo;
  for (const auto& v : mesh.vertices) {
    lo = lo.cwiseMin(v);
    hi = hi.cwiseMax(v);
  }
  return (hi - lo).norm();
}

std::vector<std::pair<Index, Index>> unique_edges(const TriangleMesh& mesh) {
  std::vector<std::pair<Index, Index>> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (const auto& f : mesh.faces) {
    for (int k = 0; k < 3; ++k) {
      const Index a = f[k], b = f[(k + 1) % 3];
      edges.emplace_back(std::min(a, b), std::max(a, b));
    }
  }
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  return edges;
}

MeshReport validate(const TriangleMesh& mesh, double area_epsilon) {
  MeshReport report;
  const double diag = bounding_box_diagonal(mesh);
  const double min_area = area_epsilon * diag * diag;
  std::vector<char> referenced(mesh.vertices.size(), 0);
  std::map<std::pair<Index, Index>, int> incidence;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    if (!(face_area(mesh, f) >= min_area) || face_area(mesh, f) == 0.0) report.zero_area_faces.push_back(f);
    const auto& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      referenced[face[k]] = 1;
      const Index a = face[k], b = face[(k + 1) % 3];
      ++incidence[{std::min(a, b), std::max(a, b)}];
    }
  }
  for (Index v = 0; v < mesh.num_vertices(); ++v) {
    if (!referenced[v]) report.unreferenced_vertices.push_back(v);
  }
  for (const auto& [edge, count] : incidence) {
    if (count > 2) report.nonmanifold_edges.push_back(edge);
  }
  return report;
}

}  // namespace specoarse
