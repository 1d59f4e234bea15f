#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "hsfem/eigensolve.hpp"

namespace hsfem {

struct HotspotOptions {
  double critical_eps = 0.05;
  double collar_factor = 2.0;        // interior collar width in units of h_max
  double fraction_threshold = 0.99;  // directional / component positivity
  double parity_threshold = 0.05;
  double nodal_tube_factor = 2.0;    // nodal-axis tube width in units of h_max
  double zero_tol = 0.05;            // component counts as identically zero below this
  std::size_t neumann_count = 6;
  SolverOptions solver;
};

struct ExtremumLocation {
  int vertex = -1;
  Vec2 point = Vec2::Zero();
  double value = 0.0;
  bool on_boundary = false;
};

struct Extrema {
  ExtremumLocation max;
  ExtremumLocation min;
  // (boundary extremum - best interior value) / range; positive when the
  // extremum is attained only on the boundary.
  double max_interior_gap = 0.0;
  double min_interior_gap = 0.0;
};

Extrema locate_extrema(const Mesh& mesh, const ScalarField& psi);

struct CriticalCandidate {
  int vertex = -1;
  Vec2 point = Vec2::Zero();
  double relative_gradient = 0.0;  // |grad psi(v)| / max_w |grad psi(w)|
};

// Interior vertices at distance >= collar from the boundary whose recovered
// gradient is below eps times the largest recovered gradient.
std::vector<CriticalCandidate> interior_critical_scan(const Mesh& mesh, const ScalarField& psi,
                                                      double eps, double collar = 0.0);

// Size of the cluster containing the first positive Neumann eigenvalue.
std::size_t simplicity_check(const Spectrum& neumann, double cluster_tol);

struct DirectionalCheck {
  std::array<Vec2, 2> directions;
  std::array<double, 2> positive_fraction{};  // over all triangles
  std::array<double, 2> interior_min{};       // over the collar-free interior, / max |grad psi|
  bool flipped = false;                       // psi was negated to normalize the sign

  bool passes(double threshold) const;
};

DirectionalCheck directional_positivity(const Mesh& mesh, const ScalarField& psi,
                                        const std::array<Vec2, 2>& directions, double collar = 0.0);

struct ComponentCheck {
  std::array<double, 2> positive_fraction{};
  std::array<double, 2> max_relative_magnitude{};  // max |d_j psi| / max |grad psi|
  std::array<bool, 2> identically_zero{};
  bool flipped = false;

  bool passes(double threshold) const;
};

// Sign of each gradient component of psi on a domain in rotated lip
// position. Throws GeometryError "not in rotated lip position" unless the
// domain satisfies the opposite-quadrant normal condition.
ComponentCheck rotated_lip_component_positivity(const Domain& domain, const Mesh& mesh,
                                                const ScalarField& psi, double zero_tol = 0.05);

struct SymmetryReport {
  double odd_x = 0.0;   // |psi + psi o Rx| / |psi|
  double even_x = 0.0;  // |psi - psi o Rx| / |psi|
  double odd_y = 0.0;
  double even_y = 0.0;
  std::string parity_x;  // odd | even | neither
  std::string parity_y;
  std::string scenario;  // odd_x_even_y | even_x_odd_y | neither
  // Filled for the two scenarios covered by the nodal-axis statement; the
  // derivative across the odd axis is checked for positivity and the other
  // derivative for its nodal set.
  double transverse_positive_fraction = 0.0;  // over interior triangles
  double transverse_interior_min = 0.0;       // normalized by max |grad psi|
  std::size_t nodal_edges = 0;
  double nodal_max_axis_distance = 0.0;
  double nodal_tube = 0.0;
  bool nodal_axis_ok = false;
};

SymmetryReport symmetry_analysis(const Mesh& mesh, const ScalarField& psi,
                                 const HotspotOptions& options = {});

struct HotspotReport {
  std::string domain_label;
  double h_max = 0.0;
  ScalarField psi2;
  double mu2 = 0.0;
  std::size_t multiplicity = 0;
  Extrema extrema;
  double collar = 0.0;
  std::vector<CriticalCandidate> interior_critical_candidates;
  bool is_lip = false;
  std::string lip_reason;
  std::optional<DirectionalCheck> directional;
  std::optional<ComponentCheck> components;          // in the domain's own frame
  std::optional<ComponentCheck> rotated_components;  // after rotating by pi/4
  std::optional<SymmetryReport> symmetry;
  HotspotOptions options;

  bool extrema_on_boundary() const { return extrema.max.on_boundary && extrema.min.on_boundary; }
  bool lip_checks_pass() const;
  bool passes() const;
};

// Normalizes psi so that its value of largest magnitude (first such vertex)
// is positive.
ScalarField sign_normalized(const ScalarField& psi);

// Eigenfunction for mu2. Within a degenerate cluster the combination with the
// smallest share of d_y energy is selected.
ScalarField select_mu2_eigenfunction(const Mesh& mesh, const AssembledSystem& neumann_system,
                                     const Spectrum& neumann);

HotspotReport analyze_hotspots(const Domain& domain, const Mesh& mesh,
                               const HotspotOptions& options = {});
// Post-processing for a given eigenfunction.
HotspotReport analyze_field(const Domain& domain, const Mesh& mesh, const ScalarField& psi,
                            double mu2, std::size_t multiplicity, const HotspotOptions& options = {});

void to_json(nlohmann::json& j, const HotspotReport& r);

// Legacy ASCII VTK: psi, recovered gradient and per-triangle derivatives
// along (e1 + e2)/sqrt2 and (e1 - e2)/sqrt2.
void write_vtk(std::ostream& out, const Mesh& mesh, const ScalarField& psi);

}  // namespace hsfem
