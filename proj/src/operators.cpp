#include "specoarse/operators.hpp"

#include <array>
#include <cmath>
#include <string>

#include "specoarse/error.hpp"
#include "specoarse/parallel.hpp"

namespace specoarse {

namespace {

void check_faces(const TriangleMesh& mesh, double area_epsilon) {
  const double diag = bounding_box_diagonal(mesh);
  const double min_area = area_epsilon * diag * diag;
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const double a = face_area(mesh, f);
    if (!(a >= min_area) || a == 0.0) {
      throw InputError("face " + std::to_string(f) + " has zero area (degenerate)");
    }
  }
}

// Off-diagonal contributions per face: (i, j, w) for the three edges, in
// face order so assembly is independent of the thread schedule.
using FaceWeights = std::array<Triplet, 3>;

SparseSymMatrix assemble(const TriangleMesh& mesh, const std::vector<FaceWeights>& weights) {
  std::vector<Triplet> t;
  t.reserve(weights.size() * 6 + mesh.vertices.size());
  const Index n = mesh.num_vertices();
  std::vector<double> row_sum(static_cast<std::size_t>(n), 0.0);
  for (const auto& fw : weights) {
    for (const auto& w : fw) {
      t.emplace_back(w.row(), w.col(), w.value());
      t.emplace_back(w.col(), w.row(), w.value());
    }
  }
  SparseMatrix off(n, n);
  off.setFromTriplets(t.begin(), t.end());
  for (Index j = 0; j < off.outerSize(); ++j) {
    for (SparseMatrix::InnerIterator it(off, j); it; ++it) row_sum[it.row()] += it.value();
  }
  std::vector<Triplet> diag;
  diag.reserve(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) diag.emplace_back(i, i, -row_sum[i]);
  SparseMatrix d(n, n);
  d.setFromTriplets(diag.begin(), diag.end());
  SparseMatrix full = off + d;
  canonicalize(full);
  return SparseSymMatrix::from_matrix(std::move(full), 0);
}

}  // namespace

SparseSymMatrix cotan_laplacian(const TriangleMesh& mesh, double area_epsilon) {
  check_faces(mesh, area_epsilon);
  std::vector<FaceWeights> weights(mesh.faces.size());
  parallel_for(0, mesh.faces.size(), [&](std::size_t f) {
    const Face& face = mesh.faces[f];
    for (int k = 0; k < 3; ++k) {
      const Index i = face[(k + 1) % 3], j = face[(k + 2) % 3];
      const Point3 u = mesh.vertices[i] - mesh.vertices[face[k]];
      const Point3 v = mesh.vertices[j] - mesh.vertices[face[k]];
      const double cot = u.dot(v) / u.cross(v).norm();
      weights[f][k] = Triplet(i, j, -0.5 * cot);
    }
  });
  return assemble(mesh, weights);
}

DiagonalMass barycentric_mass(const TriangleMesh& mesh) {
  Vector m = Vector::Zero(mesh.num_vertices());
  for (Index f = 0; f < mesh.num_faces(); ++f) {
    const double third = face_area(mesh, f) / 3.0;
    for (Index v : mesh.faces[f]) m[v] += third;
  }
  for (Index v = 0; v < m.size(); ++v) {
    if (!(m[v] > 0.0)) throw InputError("vertex " + std::to_string(v) + " has zero mass (isolated vertex)");
  }
  return DiagonalMass(std::move(m), 2);
}

std::vector<Point3> vertex_normals(const TriangleMesh& mesh) {
  std::vector<Point3> n(mesh.vertices.size(), Point3::Zero());
  for (const auto& [a, b, c] : mesh.faces) {
    const Point3 w = (mesh.vertices[b] - mesh.vertices[a]).cross(mesh.vertices[c] - mesh.vertices[a]);
    n[a] += w;
    n[b] += w;
    n[c] += w;
  }
  for (auto& v : n) {
    const double len = v.norm();
    if (len > 0.0) v /= len;
  }
  return n;
}

std::vector<Point3> principal_directions(const TriangleMesh& mesh) {
  const auto normals = vertex_normals(mesh);
  std::vector<Point3> dirs(mesh.faces.size());
  parallel_for(0, mesh.faces.size(), [&](std::size_t f) {
    const Face& face = mesh.faces[f];
    const Point3& p0 = mesh.vertices[face[0]];
    const Point3 nf = (mesh.vertices[face[1]] - p0).cross(mesh.vertices[face[2]] - p0).normalized();
    Point3 best = Point3::Zero();
    double best_norm = 0.0;
    Point3 longest = Point3::Zero();
    double longest_len = 0.0;
    for (int k = 0; k < 3; ++k) {
      const Index a = face[k], b = face[(k + 1) % 3];
      Point3 dn = normals[b] - normals[a];
      dn -= dn.dot(nf) * nf;
      if (dn.norm() > best_norm) {
        best_norm = dn.norm();
        best = dn;
      }
      const Point3 e = mesh.vertices[b] - mesh.vertices[a];
      if (e.norm() > longest_len) {
        longest_len = e.norm();
        longest = e;
      }
    }
    dirs[f] = best_norm > 1e-8 ? Point3(best / best_norm) : Point3(longest / longest_len);
  });
  return dirs;
}

SparseSymMatrix anisotropic_laplacian(const TriangleMesh& mesh, double alpha, double area_epsilon) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InputError("anisotropy alpha must be finite and >= 0");
  check_faces(mesh, area_epsilon);
  const auto dirs = principal_directions(mesh);
  std::vector<FaceWeights> weights(mesh.faces.size());
  parallel_for(0, mesh.faces.size(), [&](std::size_t f) {
    const Face& face = mesh.faces[f];
    const Point3& origin = mesh.vertices[face[0]];
    const Point3 e1 = (mesh.vertices[face[1]] - origin).normalized();
    const Point3 nf = e1.cross(mesh.vertices[face[2]] - origin).normalized();
    const Point3 e2 = nf.cross(e1);
    std::array<Eigen::Vector2d, 3> p;
    for (int k = 0; k < 3; ++k) {
      const Point3 r = mesh.vertices[face[k]] - origin;
      p[k] = {r.dot(e1), r.dot(e2)};
    }
    const double area2 = (p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[1] - p[0]).y() * (p[2] - p[0]).x();
    // hat-function gradients: perpendicular of the opposite edge over 2A
    std::array<Eigen::Vector2d, 3> grad;
    for (int k = 0; k < 3; ++k) {
      const Eigen::Vector2d e = p[(k + 2) % 3] - p[(k + 1) % 3];
      grad[k] = Eigen::Vector2d(-e.y(), e.x()) / area2;
    }
    const Eigen::Vector2d d(dirs[f].dot(e1), dirs[f].dot(e2));
    const Eigen::Matrix2d tensor = Eigen::Matrix2d::Identity() + alpha * d * d.transpose();
    const double area = 0.5 * area2;
    for (int k = 0; k < 3; ++k) {
      const int i = (k + 1) % 3, j = (k + 2) % 3;
      weights[f][k] = Triplet(face[i], face[j], area * grad[i].dot(tensor * grad[j]));
    }
  });
  return assemble(mesh, weights);
}

}  // namespace specoarse
