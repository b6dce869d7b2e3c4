#include "specoarse/shapes.hpp"

#include <cmath>
#include <map>
#include <tuple>

#include "specoarse/error.hpp"

namespace specoarse::shapes {

namespace {

// Midpoint subdivision; `project` is applied to every new vertex.
template <class Project>
TriangleMesh subdivide(const TriangleMesh& mesh, Project project) {
  TriangleMesh out;
  out.vertices = mesh.vertices;
  std::map<std::pair<Index, Index>, Index> midpoint;
  auto mid = [&](Index a, Index b) {
    const auto key = std::make_pair(std::min(a, b), std::max(a, b));
    const auto it = midpoint.find(key);
    if (it != midpoint.end()) return it->second;
    const Index id = static_cast<Index>(out.vertices.size());
    out.vertices.push_back(project(0.5 * (out.vertices[a] + out.vertices[b])));
    midpoint.emplace(key, id);
    return id;
  };
  out.faces.reserve(mesh.faces.size() * 4);
  for (const auto& [a, b, c] : mesh.faces) {
    const Index ab = mid(a, b), bc = mid(b, c), ca = mid(c, a);
    out.faces.push_back({a, ab, ca});
    out.faces.push_back({ab, b, bc});
    out.faces.push_back({ca, bc, c});
    out.faces.push_back({ab, bc, ca});
  }
  return out;
}

}  // namespace

TriangleMesh icosphere(int subdivisions, double radius) {
  if (subdivisions < 0 || radius <= 0.0) throw InputError("icosphere: invalid parameters");
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {{-1, t, 0}, {1, t, 0}, {-1, -t, 0}, {1, -t, 0}, {0, -1, t}, {0, 1, t},
                   {0, -1, -t}, {0, 1, -t}, {t, 0, -1}, {t, 0, 1}, {-t, 0, -1}, {-t, 0, 1}};
  mesh.faces = {{0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
                {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};
  auto project = [radius](const Point3& p) -> Point3 { return radius * p.normalized(); };
  for (auto& v : mesh.vertices) v = project(v);
  for (int s = 0; s < subdivisions; ++s) mesh = subdivide(mesh, project);
  return mesh;
}

TriangleMesh bumpy_cube(int resolution, double amplitude, double frequency) {
  if (resolution < 1) throw InputError("bumpy_cube: resolution must be >= 1");
  TriangleMesh mesh;
  std::map<std::tuple<long long, long long, long long>, Index> weld;
  const int r = resolution;
  auto vertex = [&](const Point3& p) {
    // grid coordinates are exact multiples of 1/r, so this key is exact
    const auto key = std::make_tuple(std::llround(p.x() * r), std::llround(p.y() * r), std::llround(p.z() * r));
    const auto it = weld.find(key);
    if (it != weld.end()) return it->second;
    const Index id = static_cast<Index>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    weld.emplace(key, id);
    return id;
  };
  // (normal, u, v) with u x v = normal
  const Point3 axes[6][3] = {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}},  {{-1, 0, 0}, {0, 0, 1}, {0, 1, 0}},
                             {{0, 1, 0}, {0, 0, 1}, {1, 0, 0}},  {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}},
                             {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}},  {{0, 0, -1}, {0, 1, 0}, {1, 0, 0}}};
  std::vector<Index> ids(static_cast<std::size_t>((r + 1) * (r + 1)));
  for (const auto& ax : axes) {
    for (int i = 0; i <= r; ++i) {
      for (int j = 0; j <= r; ++j) {
        const double s = -1.0 + 2.0 * i / r, t = -1.0 + 2.0 * j / r;
        ids[i * (r + 1) + j] = vertex(ax[0] + s * ax[1] + t * ax[2]);
      }
    }
    for (int i = 0; i < r; ++i) {
      for (int j = 0; j < r; ++j) {
        const Index a = ids[i * (r + 1) + j], b = ids[(i + 1) * (r + 1) + j];
        const Index c = ids[(i + 1) * (r + 1) + j + 1], d = ids[i * (r + 1) + j + 1];
        mesh.faces.push_back({a, b, c});
        mesh.faces.push_back({a, c, d});
      }
    }
  }
  for (auto& p : mesh.vertices) {
    const double bump = std::sin(frequency * p.x()) * std::sin(frequency * p.y()) * std::sin(frequency * p.z());
    p *= 1.0 + amplitude * bump;
  }
  return mesh;
}

TriangleMesh grid_strip(int cols, int rows, double dx, double dy) {
  if (cols < 2 || rows < 2) throw InputError("grid_strip: need at least 2x2 vertices");
  TriangleMesh mesh;
  for (int j = 0; j < rows; ++j) {
    for (int i = 0; i < cols; ++i) mesh.vertices.emplace_back(i * dx, j * dy, 0.0);
  }
  for (int j = 0; j + 1 < rows; ++j) {
    for (int i = 0; i + 1 < cols; ++i) {
      const Index a = j * cols + i, b = a + 1, c = a + cols + 1, d = a + cols;
      mesh.faces.push_back({a, b, c});
      mesh.faces.push_back({a, c, d});
    }
  }
  return mesh;
}

TriangleMesh refine(const TriangleMesh& mesh) {
  return subdivide(mesh, [](const Point3& p) { return p; });
}

}  // namespace specoarse::shapes
