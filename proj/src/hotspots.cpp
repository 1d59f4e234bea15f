#include "hsfem/hotspots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <set>

#include <Eigen/Dense>

#include "hsfem/error.hpp"
#include "hsfem/spectral.hpp"

namespace hsfem {

namespace {

double segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 d = b - a;
  const double t = std::clamp((p - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
  return (a + t * d - p).norm();
}

std::vector<double> vertex_boundary_distance(const Mesh& mesh) {
  std::vector<double> out(mesh.num_vertices(), std::numeric_limits<double>::infinity());
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v)
    for (const auto& e : mesh.boundary_edges)
      out[v] = std::min(out[v], segment_distance(mesh.vertices[v], mesh.vertices[e.a], mesh.vertices[e.b]));
  return out;
}

double max_norm(const std::vector<Vec2>& g) {
  double m = 0.0;
  for (const auto& v : g) m = std::max(m, v.norm());
  return m;
}

void check_nonconstant(const ScalarField& psi) {
  if (psi.size() == 0) throw FemError("empty field");
  const double spread = psi.maxCoeff() - psi.minCoeff();
  if (!(spread > 1e-10 * psi.cwiseAbs().maxCoeff())) throw FemError("field is constant");
}

}  // namespace

ScalarField sign_normalized(const ScalarField& psi) {
  if (psi.size() == 0) return psi;
  Eigen::Index at = 0;
  psi.cwiseAbs().maxCoeff(&at);
  return psi[at] < 0.0 ? ScalarField(-psi) : psi;
}

Extrema locate_extrema(const Mesh& mesh, const ScalarField& raw) {
  check_nonconstant(raw);
  const ScalarField psi = sign_normalized(raw);
  const auto slot = boundary_slots(mesh);
  Extrema e;
  Eigen::Index imax = 0, imin = 0;
  psi.maxCoeff(&imax);
  psi.minCoeff(&imin);
  const auto make = [&](Eigen::Index v) {
    ExtremumLocation loc;
    loc.vertex = static_cast<int>(v);
    loc.point = mesh.vertices[static_cast<std::size_t>(v)];
    loc.value = psi[v];
    loc.on_boundary = slot[static_cast<std::size_t>(v)] >= 0;
    return loc;
  };
  e.max = make(imax);
  e.min = make(imin);

  double interior_max = -std::numeric_limits<double>::infinity();
  double interior_min = std::numeric_limits<double>::infinity();
  double boundary_max = -std::numeric_limits<double>::infinity();
  double boundary_min = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    const double x = psi[static_cast<Eigen::Index>(v)];
    if (slot[v] >= 0) {
      boundary_max = std::max(boundary_max, x);
      boundary_min = std::min(boundary_min, x);
    } else {
      interior_max = std::max(interior_max, x);
      interior_min = std::min(interior_min, x);
    }
  }
  const double range = psi.maxCoeff() - psi.minCoeff();
  e.max_interior_gap = std::isfinite(interior_max) ? (boundary_max - interior_max) / range : 1.0;
  e.min_interior_gap = std::isfinite(interior_min) ? (interior_min - boundary_min) / range : 1.0;
  return e;
}

std::vector<CriticalCandidate> interior_critical_scan(const Mesh& mesh, const ScalarField& psi,
                                                      double eps, double collar) {
  if (!(eps > 0.0 && eps < 1.0)) throw FemError("critical-point threshold must lie in (0, 1)");
  const VectorField g = lift_gradient(mesh, psi);
  double gmax = 0.0;
  for (std::size_t v = 0; v < g.size(); ++v) gmax = std::max(gmax, g.at(v).norm());
  if (!(gmax > 0.0)) throw FemError("field is constant");
  const auto slot = boundary_slots(mesh);
  const auto dist = collar > 0.0 ? vertex_boundary_distance(mesh) : std::vector<double>();
  std::vector<CriticalCandidate> out;
  for (std::size_t v = 0; v < mesh.num_vertices(); ++v) {
    if (slot[v] >= 0) continue;
    if (collar > 0.0 && dist[v] < collar) continue;
    const double rel = g.at(v).norm() / gmax;
    if (rel < eps) out.push_back({static_cast<int>(v), mesh.vertices[v], rel});
  }
  return out;
}

std::size_t simplicity_check(const Spectrum& neumann, double cluster_tol) {
  const auto pos = positive_neumann(neumann);
  if (pos.size() < 2) throw SolverError("simplicity check needs at least three Neumann eigenvalues");
  const auto clusters = cluster_values(pos, cluster_tol);
  return clusters.front().size();
}

bool DirectionalCheck::passes(double threshold) const {
  return positive_fraction[0] >= threshold && positive_fraction[1] >= threshold &&
         interior_min[0] > 0.0 && interior_min[1] > 0.0;
}

DirectionalCheck directional_positivity(const Mesh& mesh, const ScalarField& psi,
                                        const std::array<Vec2, 2>& directions, double collar) {
  check_nonconstant(psi);
  const auto grads = gradient_field(mesh, psi);
  const double gmax = max_norm(grads);
  if (!(gmax > 0.0)) throw FemError("field is constant");
  DirectionalCheck c;
  c.directions = directions;
  double mean = 0.0;
  for (std::size_t t = 0; t < grads.size(); ++t) mean += signed_area(mesh, t) * grads[t].dot(directions[0]);
  c.flipped = mean < 0.0;
  const double sign = c.flipped ? -1.0 : 1.0;
  const auto dist = barycenter_boundary_distance(mesh);
  for (int k = 0; k < 2; ++k) {
    std::size_t positive = 0;
    double interior_min = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < grads.size(); ++t) {
      const double d = sign * grads[t].dot(directions[k]);
      if (d > 0.0) ++positive;
      if (dist[t] >= collar) interior_min = std::min(interior_min, d / gmax);
    }
    c.positive_fraction[k] = static_cast<double>(positive) / static_cast<double>(grads.size());
    c.interior_min[k] = interior_min;
  }
  return c;
}

bool ComponentCheck::passes(double threshold) const {
  return positive_fraction[0] >= threshold && positive_fraction[1] >= threshold;
}

ComponentCheck rotated_lip_component_positivity(const Domain& domain, const Mesh& mesh,
                                                const ScalarField& psi, double zero_tol) {
  if (!normals_in_opposite_quadrants(domain).holds)
    throw GeometryError("not in rotated lip position");
  check_nonconstant(psi);
  const auto grads = gradient_field(mesh, psi);
  const double gmax = max_norm(grads);
  ComponentCheck c;
  Vec2 mean = Vec2::Zero();
  for (std::size_t t = 0; t < grads.size(); ++t) mean += signed_area(mesh, t) * grads[t];
  c.flipped = mean.x() + mean.y() < 0.0;
  const double sign = c.flipped ? -1.0 : 1.0;
  for (int k = 0; k < 2; ++k) {
    std::size_t positive = 0;
    double largest = 0.0;
    for (const auto& g : grads) {
      if (sign * g[k] > 0.0) ++positive;
      largest = std::max(largest, std::abs(g[k]));
    }
    c.positive_fraction[k] = static_cast<double>(positive) / static_cast<double>(grads.size());
    c.max_relative_magnitude[k] = largest / gmax;
    c.identically_zero[k] = c.max_relative_magnitude[k] <= zero_tol;
  }
  return c;
}

SymmetryReport symmetry_analysis(const Mesh& mesh, const ScalarField& raw,
                                 const HotspotOptions& options) {
  const auto rx = reflection_map(mesh, 0);
  const auto ry = reflection_map(mesh, 1);
  if (!rx || !ry) throw MeshError("reflection maps unavailable");
  check_nonconstant(raw);
  const ScalarField psi = sign_normalized(raw);

  const auto reflect = [&](const std::vector<int>& map) {
    ScalarField out(psi.size());
    for (Eigen::Index v = 0; v < psi.size(); ++v) out[v] = psi[map[static_cast<std::size_t>(v)]];
    return out;
  };
  const ScalarField px = reflect(*rx);
  const ScalarField py = reflect(*ry);
  const double norm = l2_norm(mesh, psi);
  SymmetryReport s;
  s.odd_x = l2_norm(mesh, ScalarField(psi + px)) / norm;
  s.even_x = l2_norm(mesh, ScalarField(psi - px)) / norm;
  s.odd_y = l2_norm(mesh, ScalarField(psi + py)) / norm;
  s.even_y = l2_norm(mesh, ScalarField(psi - py)) / norm;
  const auto parity = [&](double odd, double even) -> std::string {
    if (odd <= options.parity_threshold) return "odd";
    if (even <= options.parity_threshold) return "even";
    return "neither";
  };
  s.parity_x = parity(s.odd_x, s.even_x);
  s.parity_y = parity(s.odd_y, s.even_y);
  int transverse = -1;  // derivative that must stay positive
  if (s.parity_x == "odd" && s.parity_y == "even") {
    s.scenario = "odd_x_even_y";
    transverse = 0;
  } else if (s.parity_x == "even" && s.parity_y == "odd") {
    s.scenario = "even_x_odd_y";
    transverse = 1;
  } else {
    s.scenario = "neither";
    return s;
  }
  const int nodal = 1 - transverse;

  const auto grads = gradient_field(mesh, psi);
  const double gmax = max_norm(grads);
  const double collar = options.collar_factor * mesh.h_max;
  const auto dist = barycenter_boundary_distance(mesh);
  double mean = 0.0;
  for (std::size_t t = 0; t < grads.size(); ++t) mean += signed_area(mesh, t) * grads[t][transverse];
  const double sign = mean < 0.0 ? -1.0 : 1.0;
  std::size_t interior = 0, positive = 0;
  double dmin = std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < grads.size(); ++t) {
    if (dist[t] < collar) continue;
    const double d = sign * grads[t][transverse];
    ++interior;
    if (d > 0.0) ++positive;
    dmin = std::min(dmin, d / gmax);
  }
  s.transverse_positive_fraction =
      interior > 0 ? static_cast<double>(positive) / static_cast<double>(interior) : 0.0;
  s.transverse_interior_min = dmin;

  // Zero crossings of the recovered derivative along mesh edges.
  const VectorField g = recover_nodal(mesh, grads);
  const Eigen::VectorXd& f = nodal == 0 ? g.u1 : g.u2;
  std::set<std::pair<int, int>> edges;
  for (const auto& t : mesh.triangles)
    for (int k = 0; k < 3; ++k)
      edges.emplace(std::min(t[k], t[(k + 1) % 3]), std::max(t[k], t[(k + 1) % 3]));
  s.nodal_tube = options.nodal_tube_factor * mesh.h_max;
  for (const auto& [a, b] : edges) {
    const double fa = f[a], fb = f[b];
    if (!(fa * fb < 0.0)) continue;
    const double w = fa / (fa - fb);
    const Vec2 p = (1.0 - w) * mesh.vertices[a] + w * mesh.vertices[b];
    ++s.nodal_edges;
    s.nodal_max_axis_distance = std::max(s.nodal_max_axis_distance, std::min(std::abs(p.x()), std::abs(p.y())));
  }
  s.nodal_axis_ok = s.nodal_max_axis_distance <= s.nodal_tube;
  return s;
}

ScalarField select_mu2_eigenfunction(const Mesh& mesh, const AssembledSystem& neumann_system,
                                     const Spectrum& neumann) {
  const auto pos = positive_neumann(neumann);
  if (pos.empty()) throw SolverError("no positive Neumann eigenvalue computed");
  const std::size_t first = neumann.size() - pos.size();
  const auto& members = neumann.clusters.at(static_cast<std::size_t>(neumann.cluster_of.at(first)));
  std::vector<std::size_t> basis;
  for (int i : members)
    if (static_cast<std::size_t>(i) >= first) basis.push_back(static_cast<std::size_t>(i));
  if (basis.size() == 1) return scalar_to_nodal(neumann_system, neumann.pairs[first].vector);

  // Minimize int (d_y psi)^2 / int |grad psi|^2 over the cluster span.
  const auto nb = static_cast<Eigen::Index>(basis.size());
  std::vector<ScalarField> fields;
  std::vector<std::vector<Vec2>> grads;
  for (std::size_t i : basis) {
    fields.push_back(scalar_to_nodal(neumann_system, neumann.pairs[i].vector));
    grads.push_back(gradient_field(mesh, fields.back()));
  }
  Eigen::MatrixXd gy = Eigen::MatrixXd::Zero(nb, nb), gall = Eigen::MatrixXd::Zero(nb, nb);
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) {
    const double area = signed_area(mesh, t);
    for (Eigen::Index i = 0; i < nb; ++i) {
      for (Eigen::Index j = 0; j < nb; ++j) {
        const Vec2& a = grads[static_cast<std::size_t>(i)][t];
        const Vec2& b = grads[static_cast<std::size_t>(j)][t];
        gy(i, j) += area * a.y() * b.y();
        gall(i, j) += area * a.dot(b);
      }
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(gy, gall);
  const Eigen::VectorXd c = solver.eigenvectors().col(0);
  ScalarField psi = ScalarField::Zero(fields.front().size());
  for (Eigen::Index i = 0; i < nb; ++i) psi += c[i] * fields[static_cast<std::size_t>(i)];
  return psi / l2_norm(mesh, psi);
}

bool HotspotReport::lip_checks_pass() const {
  if (!is_lip) return true;
  if (directional && !directional->passes(options.fraction_threshold)) return false;
  if (rotated_components && !rotated_components->passes(options.fraction_threshold)) return false;
  return true;
}

bool HotspotReport::passes() const {
  return extrema_on_boundary() && interior_critical_candidates.empty() && lip_checks_pass();
}

HotspotReport analyze_field(const Domain& domain, const Mesh& mesh, const ScalarField& raw,
                            double mu2, std::size_t multiplicity, const HotspotOptions& options) {
  HotspotReport r;
  r.options = options;
  r.domain_label = domain.label();
  r.h_max = mesh.h_max;
  r.psi2 = sign_normalized(raw);
  r.mu2 = mu2;
  r.multiplicity = multiplicity;
  r.extrema = locate_extrema(mesh, r.psi2);
  r.collar = options.collar_factor * mesh.h_max;
  r.interior_critical_candidates =
      interior_critical_scan(mesh, r.psi2, options.critical_eps, r.collar);

  const LipCheck lip = is_lip_domain(domain);
  r.is_lip = lip.is_lip;
  r.lip_reason = lip.reason;
  const double s = std::numbers::sqrt2 / 2.0;
  if (r.is_lip) {
    r.directional = directional_positivity(mesh, r.psi2, {Vec2(s, s), Vec2(s, -s)}, r.collar);
    const double angle = std::numbers::pi / 4.0;
    const Domain rotated = rotate_domain(domain, angle);
    if (normals_in_opposite_quadrants(rotated).holds) {
      r.rotated_components = rotated_lip_component_positivity(rotated, rotate_mesh(mesh, angle),
                                                              r.psi2, options.zero_tol);
    }
  }
  if (normals_in_opposite_quadrants(domain).holds)
    r.components = rotated_lip_component_positivity(domain, mesh, r.psi2, options.zero_tol);
  if (domain.symmetric_about_axes() && reflection_map(mesh, 0) && reflection_map(mesh, 1))
    r.symmetry = symmetry_analysis(mesh, r.psi2, options);
  return r;
}

HotspotReport analyze_hotspots(const Domain& domain, const Mesh& mesh, const HotspotOptions& options) {
  const AssembledSystem neumann_system = assemble_scalar(mesh, BoundaryCondition::neumann);
  const std::size_t count = std::max<std::size_t>(3, options.neumann_count);
  const Spectrum neumann = smallest_eigenpairs(neumann_system, count, options.solver);
  const ScalarField psi = select_mu2_eigenfunction(mesh, neumann_system, neumann);
  const auto pos = positive_neumann(neumann);
  return analyze_field(domain, mesh, psi, pos.front(),
                       simplicity_check(neumann, options.solver.cluster_tol), options);
}

namespace {

nlohmann::json location_json(const ExtremumLocation& l) {
  return {{"vertex", l.vertex},
          {"x", rounded(l.point.x())},
          {"y", rounded(l.point.y())},
          {"value", rounded(l.value)},
          {"on_boundary", l.on_boundary}};
}

nlohmann::json component_json(const ComponentCheck& c, double threshold) {
  return {{"positive_fraction", {rounded(c.positive_fraction[0]), rounded(c.positive_fraction[1])}},
          {"max_relative_magnitude",
           {rounded(c.max_relative_magnitude[0]), rounded(c.max_relative_magnitude[1])}},
          {"identically_zero", {c.identically_zero[0], c.identically_zero[1]}},
          {"flipped", c.flipped},
          {"passes", c.passes(threshold)}};
}

}  // namespace

void to_json(nlohmann::json& j, const HotspotReport& r) {
  j = nlohmann::json::object();
  j["domain"] = r.domain_label;
  j["h_max"] = rounded(r.h_max);
  j["mu2"] = rounded(r.mu2);
  j["multiplicity"] = r.multiplicity;
  j["max_location"] = location_json(r.extrema.max);
  j["min_location"] = location_json(r.extrema.min);
  j["max_interior_gap"] = rounded(r.extrema.max_interior_gap);
  j["min_interior_gap"] = rounded(r.extrema.min_interior_gap);
  j["collar"] = rounded(r.collar);
  auto& cands = j["interior_critical_candidates"] = nlohmann::json::array();
  for (const auto& c : r.interior_critical_candidates)
    cands.push_back({{"vertex", c.vertex},
                     {"x", rounded(c.point.x())},
                     {"y", rounded(c.point.y())},
                     {"relative_gradient", rounded(c.relative_gradient)}});
  j["is_lip"] = r.is_lip;
  j["lip_reason"] = r.lip_reason;
  if (r.directional) {
    const auto& d = *r.directional;
    j["directional_check"] = {
        {"directions",
         {{rounded(d.directions[0].x()), rounded(d.directions[0].y())},
          {rounded(d.directions[1].x()), rounded(d.directions[1].y())}}},
        {"positive_fraction", {rounded(d.positive_fraction[0]), rounded(d.positive_fraction[1])}},
        {"interior_min", {rounded(d.interior_min[0]), rounded(d.interior_min[1])}},
        {"flipped", d.flipped},
        {"passes", d.passes(r.options.fraction_threshold)}};
  } else {
    j["directional_check"] = nullptr;
  }
  j["component_check"] =
      r.components ? component_json(*r.components, r.options.fraction_threshold) : nlohmann::json();
  j["rotated_component_check"] = r.rotated_components
                                     ? component_json(*r.rotated_components, r.options.fraction_threshold)
                                     : nlohmann::json();
  if (r.symmetry) {
    const auto& s = *r.symmetry;
    j["symmetry"] = {{"odd_x", rounded(s.odd_x)},
                     {"even_x", rounded(s.even_x)},
                     {"odd_y", rounded(s.odd_y)},
                     {"even_y", rounded(s.even_y)},
                     {"parity_x", s.parity_x},
                     {"parity_y", s.parity_y},
                     {"scenario", s.scenario},
                     {"transverse_positive_fraction", rounded(s.transverse_positive_fraction)},
                     {"transverse_interior_min", rounded(s.transverse_interior_min)},
                     {"nodal_edges", s.nodal_edges},
                     {"nodal_max_axis_distance", rounded(s.nodal_max_axis_distance)},
                     {"nodal_tube", rounded(s.nodal_tube)},
                     {"nodal_axis_ok", s.nodal_axis_ok}};
  } else {
    j["symmetry"] = nullptr;
  }
  j["extrema_on_boundary"] = r.extrema_on_boundary();
  j["passes"] = r.passes();
}

void write_vtk(std::ostream& out, const Mesh& mesh, const ScalarField& psi) {
  const auto grads = gradient_field(mesh, psi);
  const VectorField g = recover_nodal(mesh, grads);
  const double s = std::numbers::sqrt2 / 2.0;
  const auto num = [](double v) { return format_number(v); };
  out << "# vtk DataFile Version 3.0\nhot spots field\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices) out << num(v.x()) << " " << num(v.y()) << " 0\n";
  out << "CELLS " << mesh.num_triangles() << " " << 4 * mesh.num_triangles() << "\n";
  for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.num_triangles() << "\n";
  for (std::size_t t = 0; t < mesh.num_triangles(); ++t) out << "5\n";
  out << "POINT_DATA " << mesh.num_vertices() << "\nSCALARS psi double 1\nLOOKUP_TABLE default\n";
  for (Eigen::Index v = 0; v < psi.size(); ++v) out << num(psi[v]) << "\n";
  out << "VECTORS grad_psi double\n";
  for (std::size_t v = 0; v < g.size(); ++v) out << num(g.u1[v]) << " " << num(g.u2[v]) << " 0\n";
  out << "CELL_DATA " << mesh.num_triangles() << "\n";
  out << "SCALARS d_plus double 1\nLOOKUP_TABLE default\n";
  for (const auto& d : grads) out << num(s * (d.x() + d.y())) << "\n";
  out << "SCALARS d_minus double 1\nLOOKUP_TABLE default\n";
  for (const auto& d : grads) out << num(s * (d.x() - d.y())) << "\n";
}

}  // namespace hsfem
