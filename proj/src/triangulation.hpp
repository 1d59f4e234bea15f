#pragma once

#include <array>
#include <vector>

#include "hsfem/geometry.hpp"

namespace hsfem::detail {

struct PlanarTriangulation {
  std::vector<Vec2> points;  // loop points first, then interior points
  std::vector<std::array<int, 3>> triangles;
};

// Delaunay triangulation of a convex region whose boundary is the CCW point
// loop `loop` (collinear runs allowed). Loop edges are kept as boundary
// edges; `interior` points must lie strictly inside. Interior vertices are
// relaxed by `smoothing_sweeps` rounds of Laplacian smoothing, each followed
// by edge flips restoring the Delaunay property.
PlanarTriangulation triangulate_convex_region(const std::vector<Vec2>& loop,
                                              const std::vector<Vec2>& interior,
                                              int smoothing_sweeps);

}  // namespace hsfem::detail
