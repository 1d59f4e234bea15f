#include "hsfem/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <Eigen/Dense>

#include "hsfem/error.hpp"

namespace hsfem {

namespace {

// Per-triangle curl and divergence of every field, stacked for Gram matrices.
struct CurlDivColumns {
  Eigen::MatrixXd curl;  // triangles x fields, scaled by sqrt(area)
  Eigen::MatrixXd div;
};

CurlDivColumns columns(const Mesh& mesh, const std::vector<VectorField>& fields) {
  const auto nt = static_cast<Eigen::Index>(mesh.num_triangles());
  CurlDivColumns out{Eigen::MatrixXd(nt, static_cast<Eigen::Index>(fields.size())),
                     Eigen::MatrixXd(nt, static_cast<Eigen::Index>(fields.size()))};
  for (std::size_t f = 0; f < fields.size(); ++f) {
    const CurlDiv cd = curl_div(mesh, fields[f]);
    for (Eigen::Index t = 0; t < nt; ++t) {
      const double w = std::sqrt(signed_area(mesh, static_cast<std::size_t>(t)));
      out.curl(t, static_cast<Eigen::Index>(f)) = w * cd.curl[static_cast<std::size_t>(t)];
      out.div(t, static_cast<Eigen::Index>(f)) = w * cd.div[static_cast<std::size_t>(t)];
    }
  }
  return out;
}

double ratio_of(double curl, double div) {
  const double sum = curl + div;
  return sum > 0.0 ? curl / sum : 0.0;
}

}  // namespace

const char* to_string(Provenance p) { return p == Provenance::neumann ? "neumann" : "dirichlet"; }

const char* to_string(FieldLabel l) {
  switch (l) {
    case FieldLabel::neumann_type: return "neumann_type";
    case FieldLabel::dirichlet_type: return "dirichlet_type";
    case FieldLabel::mixed: return "mixed";
  }
  return "mixed";
}

double rounded(double value) {
  if (!std::isfinite(value)) return value;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return std::strtod(buf, nullptr);
}

bool UnionReport::passes(double tol) const {
  return matches.size() == m && unmatched_a.empty() && unmatched_reference.empty() &&
         max_relative_gap <= tol;
}

SpectralRun compute_spectra(const Mesh& mesh, std::size_t count, const SolverOptions& options) {
  SpectralRun run;
  run.neumann_system = assemble_scalar(mesh, BoundaryCondition::neumann);
  run.dirichlet_system = assemble_scalar(mesh, BoundaryCondition::dirichlet);
  run.a_system = assemble_vector_a(mesh);
  run.neumann = smallest_eigenpairs(run.neumann_system, count + 1, options);
  run.dirichlet = smallest_eigenpairs(run.dirichlet_system, count, options);
  run.a = smallest_eigenpairs(run.a_system, count, options);
  return run;
}

std::vector<double> positive_neumann(const Spectrum& neumann) {
  const auto values = neumann.values();
  if (values.empty()) return {};
  const double floor = 1e-8 * std::max(1.0, std::abs(values.back()));
  std::vector<double> out;
  for (double v : values)
    if (v > floor) out.push_back(v);
  return out;
}

UnionReport verify_union(const Spectrum& neumann, const Spectrum& dirichlet, const Spectrum& a,
                         std::size_t m) {
  UnionReport r;
  r.m = m;
  const auto pos = positive_neumann(neumann);
  for (std::size_t i = 0; i < pos.size(); ++i) r.reference.push_back({pos[i], Provenance::neumann, i});
  for (std::size_t i = 0; i < dirichlet.size(); ++i)
    r.reference.push_back({dirichlet.value(i), Provenance::dirichlet, i});
  std::stable_sort(r.reference.begin(), r.reference.end(),
                   [](const ReferenceValue& x, const ReferenceValue& y) { return x.value < y.value; });
  // Only the prefix covered by both lists is certain to be the true merge.
  const std::size_t certain = std::min(pos.size(), dirichlet.size());
  if (r.reference.size() > certain) r.reference.resize(certain);
  if (r.reference.size() < m) {
    throw SolverError("reference list has " + std::to_string(r.reference.size()) +
                      " entries, fewer than m = " + std::to_string(m));
  }
  r.a_values = a.values();
  const std::size_t compared = std::min(m, r.a_values.size());
  for (std::size_t i = 0; i < compared; ++i) {
    const double ref = r.reference[i].value;
    const double gap = std::abs(r.a_values[i] - ref) / std::abs(ref);
    r.matches.push_back({i, i, gap});
    r.max_relative_gap = std::max(r.max_relative_gap, gap);
  }
  for (std::size_t i = compared; i < m; ++i) r.unmatched_reference.push_back(i);
  return r;
}

UnionReport verify_union(const Mesh& mesh, std::size_t m, const SolverOptions& options,
                         SpectralRun* run) {
  if (m < 4) throw SolverError("the union check needs m >= 4");
  const AssembledSystem a_system = assemble_vector_a(mesh);
  if (a_system.size() < 40 * m) {
    std::ostringstream os;
    os << "mesh too coarse for m = " << m << ": " << a_system.size()
       << " free vector DOFs, need at least " << 40 * m;
    throw SolverError(os.str());
  }
  SpectralRun local = compute_spectra(mesh, m + kUnionExtra, options);
  UnionReport r = verify_union(local.neumann, local.dirichlet, local.a, m);
  if (run != nullptr) *run = std::move(local);
  return r;
}

FieldLabel classify_ratio(double ratio, const ClassificationThresholds& thresholds) {
  if (ratio <= thresholds.neumann) return FieldLabel::neumann_type;
  if (ratio >= thresholds.dirichlet) return FieldLabel::dirichlet_type;
  return FieldLabel::mixed;
}

Classification classify_eigenfields(const Spectrum& a, const AssembledSystem& a_system,
                                    const Mesh& mesh, const UnionReport& report,
                                    const ClassificationThresholds& thresholds) {
  Classification c;
  c.thresholds = thresholds;
  std::vector<VectorField> fields;
  fields.reserve(a.size());
  for (const auto& p : a.pairs) fields.push_back(vector_to_nodal(a_system, p.vector));

  const std::size_t m = std::min(report.m, a.size());
  for (std::size_t i = 0; i < m; ++i) {
    const CurlDiv cd = curl_div(mesh, fields[i]);
    FieldClassification f;
    f.a_index = i;
    f.eigenvalue = a.value(i);
    f.curl_norm = cd.curl_norm;
    f.div_norm = cd.div_norm;
    f.ratio = ratio_of(cd.curl_norm, cd.div_norm);
    f.label = classify_ratio(f.ratio, thresholds);
    f.boundary_curl = boundary_curl_ratio(mesh, fields[i]);
    c.fields.push_back(f);
  }

  c.consistent = true;
  for (const auto& members : a.clusters) {
    if (members.empty() || static_cast<std::size_t>(members.front()) >= m) continue;
    ClusterCheck check;
    std::vector<VectorField> span;
    for (int i : members) {
      const auto idx = static_cast<std::size_t>(i);
      check.a_indices.push_back(idx);
      span.push_back(fields[idx]);
      if (idx >= report.reference.size()) continue;
      if (report.reference[idx].source == Provenance::neumann)
        ++check.expected_neumann;
      else
        ++check.expected_dirichlet;
    }
    // Rotate the span so that curl and divergence Gram matrices are
    // simultaneously diagonal.
    const CurlDivColumns cols = columns(mesh, span);
    const Eigen::MatrixXd gc = cols.curl.transpose() * cols.curl;
    const Eigen::MatrixXd gd = cols.div.transpose() * cols.div;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> rot(gc, gc + gd);
    const Eigen::MatrixXd curl_rot = cols.curl * rot.eigenvectors();
    const Eigen::MatrixXd div_rot = cols.div * rot.eigenvectors();
    for (Eigen::Index j = 0; j < curl_rot.cols(); ++j) {
      const double r = ratio_of(curl_rot.col(j).norm(), div_rot.col(j).norm());
      check.rotated_ratios.push_back(r);
      switch (classify_ratio(r, thresholds)) {
        case FieldLabel::neumann_type: ++check.found_neumann; break;
        case FieldLabel::dirichlet_type: ++check.found_dirichlet; break;
        case FieldLabel::mixed: ++check.found_mixed; break;
      }
    }
    check.consistent = check.found_mixed == 0 && check.found_neumann == check.expected_neumann &&
                       check.found_dirichlet == check.expected_dirichlet;
    c.consistent = c.consistent && check.consistent;
    c.clusters.push_back(std::move(check));
  }
  return c;
}

TranslationReport verify_translation(const Mesh& mesh, const AssembledSystem& a_system,
                                     const ScalarField& f, double eigenvalue, BoundaryCondition bc) {
  if (static_cast<std::size_t>(f.size()) != mesh.num_vertices())
    throw FemError("field size does not match the mesh");
  if (!(eigenvalue > 0.0)) throw FemError("eigenvalue must be positive");
  const auto grads = gradient_field(mesh, f);
  double gmax = 0.0;
  for (const auto& g : grads) gmax = std::max(gmax, g.norm());
  if (!(gmax * mesh.h_max > 1e-12 * f.cwiseAbs().maxCoeff())) throw FemError("trivial eigenfunction");

  TranslationReport r;
  r.gradient = bc == BoundaryCondition::neumann;
  r.eigenvalue = eigenvalue;
  const VectorField raw = r.gradient ? lift_gradient(mesh, f) : lift_perp_gradient(mesh, f);
  double umax = 0.0;
  for (std::size_t v = 0; v < raw.size(); ++v) umax = std::max(umax, raw.at(v).norm());
  r.normal_trace_defect = normal_trace_defect(mesh, raw) / umax;
  const VectorField u = project_tangential(mesh, raw);
  const CurlDiv cd = curl_div(mesh, u);
  r.type_defect = (r.gradient ? cd.curl_norm : cd.div_norm) / l2_norm(mesh, u);
  r.rayleigh = rayleigh_quotient_a(a_system, mesh, u);
  r.relative_defect = std::abs(r.rayleigh - eigenvalue) / eigenvalue;
  return r;
}

TranslationReport verify_translation(const Mesh& mesh, const ScalarField& f, double eigenvalue,
                                     BoundaryCondition bc) {
  return verify_translation(mesh, assemble_vector_a(mesh), f, eigenvalue, bc);
}

FriedlanderResult check_friedlander(const Spectrum& neumann, const Spectrum& dirichlet) {
  const auto pos = positive_neumann(neumann);
  if (pos.empty() || dirichlet.size() == 0)
    throw SolverError("the Friedlander check needs a positive Neumann and a Dirichlet eigenvalue");
  FriedlanderResult r;
  r.mu2 = pos.front();
  r.lambda1 = dirichlet.value(0);
  r.holds = r.mu2 < r.lambda1 - 1e-10;
  return r;
}

void to_json(nlohmann::json& j, const UnionReport& r) {
  j = nlohmann::json::object();
  j["m"] = r.m;
  auto& ref = j["reference"] = nlohmann::json::array();
  for (const auto& v : r.reference)
    ref.push_back({{"value", rounded(v.value)}, {"source", to_string(v.source)}, {"source_index", v.source_index}});
  auto& a = j["a_values"] = nlohmann::json::array();
  for (double v : r.a_values) a.push_back(rounded(v));
  auto& matches = j["matches"] = nlohmann::json::array();
  for (const auto& mt : r.matches)
    matches.push_back({{"a_index", mt.a_index},
                       {"reference_index", mt.reference_index},
                       {"relative_gap", rounded(mt.relative_gap)}});
  j["max_relative_gap"] = rounded(r.max_relative_gap);
  j["unmatched_a"] = r.unmatched_a;
  j["unmatched_reference"] = r.unmatched_reference;
}

void to_json(nlohmann::json& j, const Classification& c) {
  j = nlohmann::json::object();
  j["thresholds"] = {{"neumann", c.thresholds.neumann}, {"dirichlet", c.thresholds.dirichlet}};
  auto& fields = j["fields"] = nlohmann::json::array();
  for (const auto& f : c.fields) {
    fields.push_back({{"a_index", f.a_index},
                      {"eigenvalue", rounded(f.eigenvalue)},
                      {"curl_norm", rounded(f.curl_norm)},
                      {"div_norm", rounded(f.div_norm)},
                      {"ratio", rounded(f.ratio)},
                      {"boundary_curl", rounded(f.boundary_curl)},
                      {"label", to_string(f.label)}});
  }
  auto& clusters = j["clusters"] = nlohmann::json::array();
  for (const auto& k : c.clusters) {
    nlohmann::json ratios = nlohmann::json::array();
    for (double r : k.rotated_ratios) ratios.push_back(rounded(r));
    clusters.push_back({{"a_indices", k.a_indices},
                        {"rotated_ratios", ratios},
                        {"expected_neumann", k.expected_neumann},
                        {"expected_dirichlet", k.expected_dirichlet},
                        {"found_neumann", k.found_neumann},
                        {"found_dirichlet", k.found_dirichlet},
                        {"found_mixed", k.found_mixed},
                        {"consistent", k.consistent}});
  }
  j["consistent"] = c.consistent;
}

void to_json(nlohmann::json& j, const TranslationReport& t) {
  j = {{"field", t.gradient ? "gradient" : "perp_gradient"},
       {"eigenvalue", rounded(t.eigenvalue)},
       {"rayleigh", rounded(t.rayleigh)},
       {"relative_defect", rounded(t.relative_defect)},
       {"type_defect", rounded(t.type_defect)},
       {"normal_trace_defect", rounded(t.normal_trace_defect)}};
}

void to_json(nlohmann::json& j, const FriedlanderResult& f) {
  j = {{"mu2", rounded(f.mu2)}, {"lambda1", rounded(f.lambda1)}, {"holds", f.holds}};
}

}  // namespace hsfem
