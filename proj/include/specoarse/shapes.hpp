#pragma once

#include "specoarse/mesh.hpp"

namespace specoarse::shapes {

/// Subdivided icosahedron projected onto a sphere: 10·4^s + 2 vertices.
TriangleMesh icosphere(int subdivisions, double radius = 1.0);

/// Cube surface with `resolution` cells per side (6·r² + 2 vertices),
/// radially displaced by amplitude · sin(f x) sin(f y) sin(f z).
TriangleMesh bumpy_cube(int resolution, double amplitude = 0.15, double frequency = 6.0);

/// Planar cols × rows vertex grid in the z = 0 plane, each cell split along
/// the same diagonal.
TriangleMesh grid_strip(int cols, int rows, double dx = 1.0, double dy = 1.0);

/// 1-to-4 midpoint subdivision (no smoothing).
TriangleMesh refine(const TriangleMesh& mesh);

}  // namespace specoarse::shapes
