#pragma once

#include <iosfwd>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "hsfem/mesh.hpp"

namespace hsfem {

using SparseMatrix = Eigen::SparseMatrix<double>;
using ScalarField = Eigen::VectorXd;  // nodal P1 coefficients

struct VectorField {
  Eigen::VectorXd u1;
  Eigen::VectorXd u2;

  std::size_t size() const { return static_cast<std::size_t>(u1.size()); }
  Vec2 at(std::size_t v) const { return Vec2(u1[v], u2[v]); }
};

enum class BoundaryCondition { neumann, dirichlet };
enum class SystemKind { neumann_scalar, dirichlet_scalar, vector_a };

// A free degree of freedom. For scalar systems `direction` is unused; for the
// vector system the nodal value at `vertex` is `coefficient * direction`,
// where direction is e1 or e2 at interior vertices and the unit tangent at
// non-corner boundary vertices.
struct Dof {
  int vertex = 0;
  Vec2 direction = Vec2::Zero();
};

struct AssembledSystem {
  SparseMatrix form;
  SparseMatrix mass;
  std::vector<Dof> dofs;
  SystemKind kind = SystemKind::neumann_scalar;
  std::size_t num_vertices = 0;

  std::size_t size() const { return dofs.size(); }
};

AssembledSystem assemble_scalar(const Mesh& mesh, BoundaryCondition bc);

// Constrained vector system for the curvature-weighted form on tangential
// fields: blockdiag(K, K) minus the kappa-weighted boundary mass, restricted
// to fields whose nodal values are tangential at boundary vertices and zero
// at corners.
AssembledSystem assemble_vector_a(const Mesh& mesh);

// Free coefficients -> nodal fields.
ScalarField scalar_to_nodal(const AssembledSystem& system, const Eigen::VectorXd& x);
VectorField vector_to_nodal(const AssembledSystem& system, const Eigen::VectorXd& x);

// Nodal tangential field -> free coefficients. Throws FemError when the
// field violates the constraint by more than `tol` relative to its maximum.
Eigen::VectorXd vector_to_dofs(const AssembledSystem& system, const Mesh& mesh,
                               const VectorField& u, double tol = 1e-10);

std::vector<Vec2> gradient_field(const Mesh& mesh, const ScalarField& psi);
std::vector<Vec2> perp_gradient_field(const Mesh& mesh, const ScalarField& phi);

// Area-weighted average of the per-triangle vectors around each vertex.
VectorField recover_nodal(const Mesh& mesh, const std::vector<Vec2>& per_triangle);
VectorField lift_gradient(const Mesh& mesh, const ScalarField& psi);
VectorField lift_perp_gradient(const Mesh& mesh, const ScalarField& phi);

// Removes the normal component at non-corner boundary vertices and zeroes
// corner vertices.
VectorField project_tangential(const Mesh& mesh, const VectorField& u);

// Largest |<u(v), nu(v)>| over non-corner boundary vertices and |u(v)| over
// corners.
double normal_trace_defect(const Mesh& mesh, const VectorField& u);

struct CurlDiv {
  std::vector<double> curl;  // d1 u2 - d2 u1 per triangle
  std::vector<double> div;   // d1 u1 + d2 u2 per triangle
  double curl_norm = 0.0;    // L2 norms over the mesh
  double div_norm = 0.0;
};
CurlDiv curl_div(const Mesh& mesh, const VectorField& u);

// RMS of the curl along the boundary (each boundary edge takes the value of
// its triangle) over its RMS in the domain. Small for fields satisfying the
// natural condition curl u = 0 on the boundary; zero for curl-free fields.
double boundary_curl_ratio(const Mesh& mesh, const VectorField& u);

double rayleigh_quotient_a(const AssembledSystem& system, const Mesh& mesh, const VectorField& u);
double rayleigh_quotient(const AssembledSystem& system, const Eigen::VectorXd& x);

// Interpolates f at the mesh vertices.
template <typename F>
ScalarField interpolate(const Mesh& mesh, F&& f) {
  ScalarField out(static_cast<Eigen::Index>(mesh.num_vertices()));
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    out[static_cast<Eigen::Index>(v)] = f(mesh.vertices[v]);
  return out;
}

// Mass-weighted inner product and norm of nodal P1 fields.
SparseMatrix nodal_mass_matrix(const Mesh& mesh);
double l2_norm(const Mesh& mesh, const ScalarField& f);
double l2_norm(const Mesh& mesh, const VectorField& u);

// `i j value` lines, 0-based, upper and lower triangle.
void write_triplets(std::ostream& out, const SparseMatrix& matrix);

}  // namespace hsfem
