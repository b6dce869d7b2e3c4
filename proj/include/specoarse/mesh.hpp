#pragma once

#include <array>
#include <filesystem>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "specoarse/sparse.hpp"

namespace specoarse {

using Point3 = Eigen::Vector3d;
using Face = std::array<Index, 3>;

/// Triangle mesh with 0-based face indices.
struct TriangleMesh {
  std::vector<Point3> vertices;
  std::vector<Face> faces;

  Index num_vertices() const { return static_cast<Index>(vertices.size()); }
  Index num_faces() const { return static_cast<Index>(faces.size()); }
};

/// Reads `v x y z` and `f i j k ...` records; polygons are fan-triangulated
/// and normals/texcoords ignored. Throws InputError on malformed records,
/// out-of-range or repeated face indices, and empty meshes.
TriangleMesh load_obj(const std::filesystem::path& path);
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);

double face_area(const TriangleMesh& mesh, Index f);
double bounding_box_diagonal(const TriangleMesh& mesh);
/// Undirected edges (a < b), sorted.
std::vector<std::pair<Index, Index>> unique_edges(const TriangleMesh& mesh);

struct MeshReport {
  std::vector<Index> zero_area_faces;
  std::vector<Index> unreferenced_vertices;
  std::vector<std::pair<Index, Index>> nonmanifold_edges;  ///< edges with > 2 incident faces

  bool clean() const {
    return zero_area_faces.empty() && unreferenced_vertices.empty() && nonmanifold_edges.empty();
  }
};

inline constexpr double kDefaultAreaEpsilon = 1e-12;

/// Flags faces with area < area_epsilon · (bounding-box diagonal)², vertices
/// no face references, and edges shared by more than two faces.
MeshReport validate(const TriangleMesh& mesh, double area_epsilon = kDefaultAreaEpsilon);

}  // namespace specoarse
