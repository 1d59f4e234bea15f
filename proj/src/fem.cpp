#include "hsfem/fem.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>

#include "hsfem/error.hpp"

namespace hsfem {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

struct ElementP1 {
  double area;
  std::array<Vec2, 3> grad;  // gradients of the barycentric coordinates
};

ElementP1 element(const Mesh& mesh, const std::array<int, 3>& t) {
  const Vec2& a = mesh.vertices[t[0]];
  const Vec2& b = mesh.vertices[t[1]];
  const Vec2& c = mesh.vertices[t[2]];
  const double twice = cross(b - a, c - a);
  ElementP1 e;
  e.area = 0.5 * twice;
  const auto perp = [](const Vec2& v) { return Vec2(-v.y(), v.x()); };
  e.grad[0] = perp(c - b) / twice;
  e.grad[1] = perp(a - c) / twice;
  e.grad[2] = perp(b - a) / twice;
  return e;
}

void check_elements(const Mesh& mesh) {
  const double area = total_area(mesh);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    if (!(signed_area(mesh, t) >= 1e-14 * area))
      throw FemError("degenerate triangle " + std::to_string(t));
  }
}

SparseMatrix from_triplets(std::size_t n, const Triplets& triplets) {
  SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

// Free DOF numbering: per vertex, the list of free DOF indices.
struct DofTable {
  std::vector<Dof> dofs;
  std::vector<std::array<int, 2>> at_vertex;  // -1 when absent
};

DofTable vector_dofs(const Mesh& mesh) {
  const auto slot = boundary_slots(mesh);
  DofTable table;
  table.at_vertex.assign(mesh.num_vertices(), {-1, -1});
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const int vi = static_cast<int>(v);
    if (slot[v] < 0) {
      table.at_vertex[v] = {static_cast<int>(table.dofs.size()),
                            static_cast<int>(table.dofs.size()) + 1};
      table.dofs.push_back({vi, Vec2::UnitX()});
      table.dofs.push_back({vi, Vec2::UnitY()});
      continue;
    }
    const auto& bv = mesh.boundary_vertices[slot[v]];
    if (bv.is_corner) continue;
    table.at_vertex[v][0] = static_cast<int>(table.dofs.size());
    table.dofs.push_back({vi, Vec2(-bv.normal.y(), bv.normal.x())});
  }
  return table;
}

DofTable scalar_dofs(const Mesh& mesh, BoundaryCondition bc) {
  const auto slot = boundary_slots(mesh);
  DofTable table;
  table.at_vertex.assign(mesh.num_vertices(), {-1, -1});
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (bc == BoundaryCondition::dirichlet && slot[v] >= 0) continue;
    table.at_vertex[v][0] = static_cast<int>(table.dofs.size());
    table.dofs.push_back({static_cast<int>(v), Vec2::Zero()});
  }
  return table;
}

void check_boundary_data(const Mesh& mesh) {
  if (mesh.boundary_edges.empty() || mesh.boundary_vertices.size() != mesh.boundary_edges.size())
    throw FemError("mesh has no boundary metadata");
  for (std::size_t i = 0; i < mesh.boundary_edges.size(); ++i) {
    if (!std::isfinite(mesh.boundary_edges[i].kappa))
      throw FemError("missing curvature sample on boundary edge " + std::to_string(i));
  }
  for (const auto& bv : mesh.boundary_vertices) {
    if (!bv.is_corner && std::abs(bv.normal.norm() - 1.0) > 1e-12)
      throw FemError("boundary vertex " + std::to_string(bv.vertex) + " has no unit normal");
  }
}

}  // namespace

AssembledSystem assemble_scalar(const Mesh& mesh, BoundaryCondition bc) {
  check_elements(mesh);
  const DofTable table = scalar_dofs(mesh, bc);
  Triplets k, m;
  k.reserve(9 * mesh.num_triangles());
  m.reserve(9 * mesh.num_triangles());
  for (const auto& t : mesh.triangles) {
    const ElementP1 e = element(mesh, t);
    for (int i = 0; i < 3; ++i) {
      const int p = table.at_vertex[t[i]][0];
      if (p < 0) continue;
      for (int j = 0; j < 3; ++j) {
        const int q = table.at_vertex[t[j]][0];
        if (q < 0) continue;
        k.emplace_back(p, q, e.area * e.grad[i].dot(e.grad[j]));
        m.emplace_back(p, q, e.area * (i == j ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  AssembledSystem sys;
  sys.form = from_triplets(table.dofs.size(), k);
  sys.mass = from_triplets(table.dofs.size(), m);
  sys.dofs = table.dofs;
  sys.kind = bc == BoundaryCondition::neumann ? SystemKind::neumann_scalar
                                              : SystemKind::dirichlet_scalar;
  sys.num_vertices = mesh.num_vertices();
  if (sys.dofs.empty()) throw FemError("mesh has no free degrees of freedom");
  return sys;
}

AssembledSystem assemble_vector_a(const Mesh& mesh) {
  check_elements(mesh);
  check_boundary_data(mesh);
  const DofTable table = vector_dofs(mesh);

  Triplets k, m;
  k.reserve(36 * mesh.num_triangles());
  m.reserve(36 * mesh.num_triangles());
  // Adds w * <d_p, d_q> for every free DOF pair at vertices (a, b).
  const auto scatter = [&](Triplets& out, int a, int b, double w) {
    for (int p : table.at_vertex[a]) {
      if (p < 0) continue;
      for (int q : table.at_vertex[b]) {
        if (q < 0) continue;
        const double d = table.dofs[p].direction.dot(table.dofs[q].direction);
        if (d != 0.0) out.emplace_back(p, q, w * d);
      }
    }
  };
  for (const auto& t : mesh.triangles) {
    const ElementP1 e = element(mesh, t);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        scatter(k, t[i], t[j], e.area * e.grad[i].dot(e.grad[j]));
        scatter(m, t[i], t[j], e.area * (i == j ? 2.0 : 1.0) / 12.0);
      }
    }
  }
  // Boundary term: -kappa times the consistent edge mass (L/6)[2 1; 1 2].
  for (const auto& be : mesh.boundary_edges) {
    const double len = (mesh.vertices[be.b] - mesh.vertices[be.a]).norm();
    const double w = -be.kappa * len / 6.0;
    scatter(k, be.a, be.a, 2.0 * w);
    scatter(k, be.b, be.b, 2.0 * w);
    scatter(k, be.a, be.b, w);
    scatter(k, be.b, be.a, w);
  }

  AssembledSystem sys;
  sys.form = from_triplets(table.dofs.size(), k);
  sys.mass = from_triplets(table.dofs.size(), m);
  sys.dofs = table.dofs;
  sys.kind = SystemKind::vector_a;
  sys.num_vertices = mesh.num_vertices();
  if (sys.dofs.empty()) throw FemError("mesh has no free degrees of freedom");
  return sys;
}

ScalarField scalar_to_nodal(const AssembledSystem& system, const Eigen::VectorXd& x) {
  if (system.kind == SystemKind::vector_a) throw FemError("expected a scalar system");
  if (static_cast<std::size_t>(x.size()) != system.size()) throw FemError("coefficient size mismatch");
  ScalarField out = ScalarField::Zero(static_cast<Eigen::Index>(system.num_vertices));
  for (std::size_t p = 0; p < system.size(); ++p) out[system.dofs[p].vertex] = x[static_cast<Eigen::Index>(p)];
  return out;
}

VectorField vector_to_nodal(const AssembledSystem& system, const Eigen::VectorXd& x) {
  if (system.kind != SystemKind::vector_a) throw FemError("expected the vector system");
  if (static_cast<std::size_t>(x.size()) != system.size()) throw FemError("coefficient size mismatch");
  const auto n = static_cast<Eigen::Index>(system.num_vertices);
  VectorField u{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  for (std::size_t p = 0; p < system.size(); ++p) {
    const Dof& d = system.dofs[p];
    const double c = x[static_cast<Eigen::Index>(p)];
    u.u1[d.vertex] += c * d.direction.x();
    u.u2[d.vertex] += c * d.direction.y();
  }
  return u;
}

Eigen::VectorXd vector_to_dofs(const AssembledSystem& system, const Mesh& mesh,
                               const VectorField& u, double tol) {
  if (system.kind != SystemKind::vector_a) throw FemError("expected the vector system");
  if (u.size() != mesh.num_vertices()) throw FemError("field size does not match the mesh");
  const double defect = normal_trace_defect(mesh, u);
  double scale = 0.0;
  for (std::size_t v = 0; v < u.size(); ++v) scale = std::max(scale, u.at(v).norm());
  if (defect > tol * scale)
    throw FemError("field violates the tangential boundary constraint");
  Eigen::VectorXd x(static_cast<Eigen::Index>(system.size()));
  for (std::size_t p = 0; p < system.size(); ++p)
    x[static_cast<Eigen::Index>(p)] = u.at(system.dofs[p].vertex).dot(system.dofs[p].direction);
  return x;
}

std::vector<Vec2> gradient_field(const Mesh& mesh, const ScalarField& psi) {
  if (static_cast<std::size_t>(psi.size()) != mesh.num_vertices())
    throw FemError("field size does not match the mesh");
  std::vector<Vec2> out;
  out.reserve(mesh.num_triangles());
  for (const auto& t : mesh.triangles) {
    const ElementP1 e = element(mesh, t);
    out.push_back(psi[t[0]] * e.grad[0] + psi[t[1]] * e.grad[1] + psi[t[2]] * e.grad[2]);
  }
  return out;
}

std::vector<Vec2> perp_gradient_field(const Mesh& mesh, const ScalarField& phi) {
  auto g = gradient_field(mesh, phi);
  for (auto& v : g) v = Vec2(-v.y(), v.x());
  return g;
}

VectorField recover_nodal(const Mesh& mesh, const std::vector<Vec2>& per_triangle) {
  const auto n = static_cast<Eigen::Index>(mesh.num_vertices());
  VectorField u{Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n)};
  Eigen::VectorXd weight = Eigen::VectorXd::Zero(n);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = signed_area(mesh, t);
    for (int v : mesh.triangles[t]) {
      u.u1[v] += area * per_triangle[t].x();
      u.u2[v] += area * per_triangle[t].y();
      weight[v] += area;
    }
  }
  for (Eigen::Index v = 0; v < n; ++v) {
    if (weight[v] > 0.0) {
      u.u1[v] /= weight[v];
      u.u2[v] /= weight[v];
    }
  }
  return u;
}

VectorField lift_gradient(const Mesh& mesh, const ScalarField& psi) {
  return recover_nodal(mesh, gradient_field(mesh, psi));
}

VectorField lift_perp_gradient(const Mesh& mesh, const ScalarField& phi) {
  return recover_nodal(mesh, perp_gradient_field(mesh, phi));
}

VectorField project_tangential(const Mesh& mesh, const VectorField& u) {
  VectorField out = u;
  for (const auto& bv : mesh.boundary_vertices) {
    if (bv.is_corner) {
      out.u1[bv.vertex] = 0.0;
      out.u2[bv.vertex] = 0.0;
      continue;
    }
    const Vec2 tangent(-bv.normal.y(), bv.normal.x());
    const Vec2 projected = u.at(bv.vertex).dot(tangent) * tangent;
    out.u1[bv.vertex] = projected.x();
    out.u2[bv.vertex] = projected.y();
  }
  return out;
}

double normal_trace_defect(const Mesh& mesh, const VectorField& u) {
  double worst = 0.0;
  for (const auto& bv : mesh.boundary_vertices) {
    const Vec2 value = u.at(bv.vertex);
    worst = std::max(worst, bv.is_corner ? value.norm() : std::abs(value.dot(bv.normal)));
  }
  return worst;
}

CurlDiv curl_div(const Mesh& mesh, const VectorField& u) {
  if (u.size() != mesh.num_vertices()) throw FemError("field size does not match the mesh");
  CurlDiv out;
  out.curl.reserve(mesh.num_triangles());
  out.div.reserve(mesh.num_triangles());
  double curl2 = 0.0, div2 = 0.0;
  for (const auto& t : mesh.triangles) {
    const ElementP1 e = element(mesh, t);
    Vec2 g1 = Vec2::Zero(), g2 = Vec2::Zero();
    for (int i = 0; i < 3; ++i) {
      g1 += u.u1[t[i]] * e.grad[i];
      g2 += u.u2[t[i]] * e.grad[i];
    }
    const double curl = g2.x() - g1.y();
    const double div = g1.x() + g2.y();
    out.curl.push_back(curl);
    out.div.push_back(div);
    curl2 += e.area * curl * curl;
    div2 += e.area * div * div;
  }
  out.curl_norm = std::sqrt(curl2);
  out.div_norm = std::sqrt(div2);
  return out;
}

double rayleigh_quotient(const AssembledSystem& system, const Eigen::VectorXd& x) {
  const double mass = x.dot(system.mass * x);
  if (!(mass > 0.0)) throw FemError("zero mass norm");
  return x.dot(system.form * x) / mass;
}

double boundary_curl_ratio(const Mesh& mesh, const VectorField& u) {
  const CurlDiv cd = curl_div(mesh, u);
  if (!(cd.curl_norm > 0.0)) return 0.0;
  std::map<std::pair<int, int>, std::size_t> owner;
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t)
    for (int k = 0; k < 3; ++k) owner[{mesh.triangles[t][k], mesh.triangles[t][(k + 1) % 3]}] = t;
  double trace = 0.0;
  for (const BoundaryEdge& e : mesh.boundary_edges) {
    const double c = cd.curl[owner.at({e.a, e.b})];
    trace += (mesh.vertices[e.b] - mesh.vertices[e.a]).norm() * c * c;
  }
  return std::sqrt(trace / boundary_length(mesh)) / (cd.curl_norm / std::sqrt(total_area(mesh)));
}

double rayleigh_quotient_a(const AssembledSystem& system, const Mesh& mesh, const VectorField& u) {
  return rayleigh_quotient(system, vector_to_dofs(system, mesh, u));
}

SparseMatrix nodal_mass_matrix(const Mesh& mesh) {
  Triplets m;
  m.reserve(9 * mesh.num_triangles());
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = signed_area(mesh, t);
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m.emplace_back(tri[i], tri[j], area * (i == j ? 2.0 : 1.0) / 12.0);
  }
  return from_triplets(mesh.num_vertices(), m);
}

double l2_norm(const Mesh& mesh, const ScalarField& f) {
  return std::sqrt(std::max(0.0, f.dot(nodal_mass_matrix(mesh) * f)));
}

double l2_norm(const Mesh& mesh, const VectorField& u) {
  const SparseMatrix m = nodal_mass_matrix(mesh);
  return std::sqrt(std::max(0.0, u.u1.dot(m * u.u1) + u.u2.dot(m * u.u2)));
}

void write_triplets(std::ostream& out, const SparseMatrix& matrix) {
  char buf[64];
  for (Eigen::Index col = 0; col < matrix.outerSize(); ++col) {
    for (SparseMatrix::InnerIterator it(matrix, col); it; ++it) {
      std::snprintf(buf, sizeof buf, "%.17g", it.value());
      out << it.row() << " " << it.col() << " " << buf << "\n";
    }
  }
}

}  // namespace hsfem
