#pragma once

#include <vector>

#include "specoarse/mesh.hpp"
#include "specoarse/sparse.hpp"

namespace specoarse {

/// Operator together with the mass matrix defining its inner product.
struct OperatorPair {
  SparseSymMatrix L;
  DiagonalMass M;
};

/// Cotangent Laplacian, L_ij = −(cot α_ij + cot β_ij)/2, diagonal set so
/// rows sum to zero; PSD sign convention, unit exponent 0. Obtuse
/// triangles keep their negative weights. Throws InputError naming the
/// first face with area below area_epsilon · diag².
SparseSymMatrix cotan_laplacian(const TriangleMesh& mesh, double area_epsilon = kDefaultAreaEpsilon);

/// One third of the incident triangle areas per vertex; unit exponent 2.
/// Throws InputError on a vertex with zero mass.
DiagonalMass barycentric_mass(const TriangleMesh& mesh);

/// Area-weighted unit vertex normals.
std::vector<Point3> vertex_normals(const TriangleMesh& mesh);

/// Per-face unit tangent direction: the projected difference of vertex
/// normals with the largest magnitude over the face's edges, or the longest
/// edge where the normals are parallel.
std::vector<Point3> principal_directions(const TriangleMesh& mesh);

/// Linear finite-element stiffness with per-face tensor I + alpha·d dᵀ
/// (d from principal_directions). alpha = 0 is the cotangent Laplacian.
SparseSymMatrix anisotropic_laplacian(const TriangleMesh& mesh, double alpha,
                                      double area_epsilon = kDefaultAreaEpsilon);

}  // namespace specoarse
