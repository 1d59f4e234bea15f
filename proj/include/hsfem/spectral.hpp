#pragma once

#include <vector>

#include "json.hpp"

#include "hsfem/eigensolve.hpp"

namespace hsfem {

enum class Provenance { neumann, dirichlet };
enum class FieldLabel { neumann_type, dirichlet_type, mixed };

const char* to_string(Provenance p);
const char* to_string(FieldLabel l);

struct ReferenceValue {
  double value = 0.0;
  Provenance source = Provenance::neumann;
  std::size_t source_index = 0;  // 0-based position in the positive Neumann / Dirichlet list
};

struct Match {
  std::size_t a_index = 0;
  std::size_t reference_index = 0;
  double relative_gap = 0.0;
};

struct UnionReport {
  std::size_t m = 0;
  std::vector<ReferenceValue> reference;  // merged positive Neumann and Dirichlet values
  std::vector<double> a_values;
  std::vector<Match> matches;  // one per compared index < m
  double max_relative_gap = 0.0;
  std::vector<std::size_t> unmatched_a;
  std::vector<std::size_t> unmatched_reference;

  bool passes(double tol) const;
};

// The three spectra behind a union check, each with `count` pairs (the
// Neumann one with one extra for the constant mode).
struct SpectralRun {
  AssembledSystem neumann_system;
  AssembledSystem dirichlet_system;
  AssembledSystem a_system;
  Spectrum neumann;
  Spectrum dirichlet;
  Spectrum a;
};

// Extra eigenpairs beyond m computed by verify_union so that clusters
// straddling the cutoff can be classified.
inline constexpr std::size_t kUnionExtra = 4;

SpectralRun compute_spectra(const Mesh& mesh, std::size_t count, const SolverOptions& options = {});

// Positive Neumann eigenvalues (the near-zero constant mode dropped).
std::vector<double> positive_neumann(const Spectrum& neumann);

// Greedy in-order matching of the m smallest A-eigenvalues against the
// merged reference list.
UnionReport verify_union(const Spectrum& neumann, const Spectrum& dirichlet, const Spectrum& a,
                         std::size_t m);
// Checks the resolution heuristic (free DOFs >= 40 m), solves and matches.
UnionReport verify_union(const Mesh& mesh, std::size_t m, const SolverOptions& options = {},
                         SpectralRun* run = nullptr);

struct ClassificationThresholds {
  double neumann = 0.2;    // ratio <= neumann -> neumann_type
  double dirichlet = 0.8;  // ratio >= dirichlet -> dirichlet_type
};

struct FieldClassification {
  std::size_t a_index = 0;
  double eigenvalue = 0.0;
  double curl_norm = 0.0;
  double div_norm = 0.0;
  double ratio = 0.0;  // curl / (curl + div)
  double boundary_curl = 0.0;  // see boundary_curl_ratio
  FieldLabel label = FieldLabel::mixed;
};

// Cluster-level comparison: the cluster span is rotated to the basis that
// separates curl from divergence, and the resulting labels are counted
// against the provenance of the matched reference values.
struct ClusterCheck {
  std::vector<std::size_t> a_indices;
  std::vector<double> rotated_ratios;
  std::size_t expected_neumann = 0;
  std::size_t expected_dirichlet = 0;
  std::size_t found_neumann = 0;
  std::size_t found_dirichlet = 0;
  std::size_t found_mixed = 0;
  bool consistent = false;
};

struct Classification {
  ClassificationThresholds thresholds;
  std::vector<FieldClassification> fields;  // one per A-pair with index < m
  std::vector<ClusterCheck> clusters;       // clusters starting below m
  bool consistent = false;
};

FieldLabel classify_ratio(double ratio, const ClassificationThresholds& thresholds);

Classification classify_eigenfields(const Spectrum& a, const AssembledSystem& a_system,
                                    const Mesh& mesh, const UnionReport& report,
                                    const ClassificationThresholds& thresholds = {});

struct TranslationReport {
  bool gradient = true;  // true: grad psi (Neumann); false: perp grad phi (Dirichlet)
  double eigenvalue = 0.0;
  double rayleigh = 0.0;
  double relative_defect = 0.0;       // |rayleigh - eigenvalue| / eigenvalue
  double type_defect = 0.0;           // curl (gradient) or div (perp) norm over |u|
  double normal_trace_defect = 0.0;   // before projection, relative to max |u|
};

// Lifts grad psi (Neumann) or perp grad phi (Dirichlet) to the constrained
// space and compares its Rayleigh quotient with the scalar eigenvalue.
TranslationReport verify_translation(const Mesh& mesh, const AssembledSystem& a_system,
                                     const ScalarField& f, double eigenvalue, BoundaryCondition bc);
TranslationReport verify_translation(const Mesh& mesh, const ScalarField& f, double eigenvalue,
                                     BoundaryCondition bc);

struct FriedlanderResult {
  double mu2 = 0.0;
  double lambda1 = 0.0;
  bool holds = false;
};
FriedlanderResult check_friedlander(const Spectrum& neumann, const Spectrum& dirichlet);

void to_json(nlohmann::json& j, const UnionReport& r);
void to_json(nlohmann::json& j, const Classification& c);
void to_json(nlohmann::json& j, const TranslationReport& t);
void to_json(nlohmann::json& j, const FriedlanderResult& f);

// Rounds to 12 significant digits for reports.
double rounded(double value);

}  // namespace hsfem
