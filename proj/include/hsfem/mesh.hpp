#pragma once

#include <array>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "hsfem/geometry.hpp"

namespace hsfem {

struct BoundaryEdge {
  int a = 0;
  int b = 0;
  std::size_t piece = 0;
  double kappa = 0.0;  // signed curvature at the edge midpoint
  Vec2 normal = Vec2::Zero();

  bool operator==(const BoundaryEdge&) const = default;
};

struct BoundaryVertex {
  int vertex = 0;
  Vec2 normal = Vec2::Zero();  // averaged outward normal, zero at corners
  bool is_corner = false;

  bool operator==(const BoundaryVertex&) const = default;
};

// Conforming triangulation with the boundary data needed by the tangential
// vector assembly. boundary_edges is ordered along the counterclockwise
// boundary cycle and boundary_vertices[i].vertex == boundary_edges[i].a.
struct Mesh {
  std::vector<Vec2> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryEdge> boundary_edges;
  std::vector<BoundaryVertex> boundary_vertices;
  double h_max = 0.0;

  std::size_t num_vertices() const { return vertices.size(); }
  std::size_t num_triangles() const { return triangles.size(); }

  bool operator==(const Mesh&) const = default;
};

Mesh generate_mesh(const Domain& domain, double target_h);

// Red refinement; new boundary midpoints are moved onto the exact boundary
// and the boundary data is resampled from `domain`.
Mesh refine_uniform(const Mesh& mesh, const Domain& domain);

// Recomputes the boundary cycle, curvature/normal samples, corner flags and
// h_max from the triangles and the exact domain.
void attach_boundary_data(Mesh& mesh, const Domain& domain);

// Rigid motions and dilations of an existing mesh; curvature samples scale
// with 1/factor.
Mesh scale_mesh(const Mesh& mesh, double factor);
Mesh rotate_mesh(const Mesh& mesh, double angle);

// ASCII mesh file:
//   nv nt nbe
//   x y                         (nv lines)
//   i j k                       (nt lines, 0-based, CCW)
//   a b piece kappa nx ny       (nbe lines, in boundary-cycle order)
//   corners: c1 c2 ...
Mesh read_mesh(std::istream& in, const std::string& source = "<stream>");
Mesh read_mesh(const std::filesystem::path& path);
void write_mesh(std::ostream& out, const Mesh& mesh);
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);

// Throws MeshError when an invariant is violated.
void validate_mesh(const Mesh& mesh);

double signed_area(const Mesh& mesh, std::size_t triangle);
double total_area(const Mesh& mesh);
double boundary_length(const Mesh& mesh);
double min_angle_degrees(const Mesh& mesh);
double longest_edge(const Mesh& mesh);

// Index into boundary_vertices for each vertex, or -1 for interior vertices.
std::vector<int> boundary_slots(const Mesh& mesh);

// Vertex permutation realizing the reflection x -> -x (axis = 0) or
// y -> -y (axis = 1); empty when the vertex set is not mirror symmetric.
std::optional<std::vector<int>> reflection_map(const Mesh& mesh, int axis);

// Distance from each triangle barycenter to the boundary polyline.
std::vector<double> barycenter_boundary_distance(const Mesh& mesh);

}  // namespace hsfem
