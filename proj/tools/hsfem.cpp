// Command-line front end: spectrum, verify, hotspots and convergence runs.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "hsfem/convergence.hpp"
#include "hsfem/domain_io.hpp"
#include "hsfem/error.hpp"
#include "hsfem/hotspots.hpp"
#include "hsfem/spectral.hpp"

namespace fs = std::filesystem;
using namespace hsfem;

namespace {

enum ExitCode : int {
  kOk = 0,
  kVerificationFailed = 1,
  kSolverFailure = 2,
  kMeshFailure = 3,
  kConfigError = 4,
  kNotLip = 5,
};

struct RunConfig {
  std::string domain;
  double h = 0.05;
  int refinements = 0;
  std::size_t m = 6;
  double rotate = 0.0;
  std::string out = ".";
  double tol = 1e-8;
  double cluster_tol = 1e-2;
  double tol_union = 2e-2;
  double neumann_threshold = 0.2;
  double dirichlet_threshold = 0.8;
  double critical_eps = 0.05;
  double collar_factor = 2.0;
  double fraction_threshold = 0.99;
  double parity_threshold = 0.05;
  double nodal_tube_factor = 2.0;
  double zero_tol = 0.05;
  bool require_lip = false;
  bool vtk = false;
  bool export_mesh = false;
};

void validate(const RunConfig& c) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw ParseError(std::string(name) + " must be positive");
  };
  positive(c.h, "--h");
  positive(c.tol, "--tol");
  positive(c.cluster_tol, "--cluster-tol");
  positive(c.tol_union, "--tol-union");
  positive(c.neumann_threshold, "--neumann-threshold");
  positive(c.dirichlet_threshold, "--dirichlet-threshold");
  positive(c.critical_eps, "--critical-eps");
  positive(c.fraction_threshold, "--fraction-threshold");
  positive(c.parity_threshold, "--parity-threshold");
  positive(c.nodal_tube_factor, "--nodal-tube");
  positive(c.zero_tol, "--zero-tol");
  if (c.collar_factor < 0.0) throw ParseError("--collar must be nonnegative");
  if (c.refinements < 0) throw ParseError("--refinements must be nonnegative");
  if (c.m < 1) throw ParseError("-m must be at least 1");
  if (c.domain.empty()) throw ParseError("--domain is required");
}

SolverOptions solver_options(const RunConfig& c) {
  SolverOptions o;
  o.tol = c.tol;
  o.cluster_tol = c.cluster_tol;
  return o;
}

struct Setup {
  CanonicalShape shape;
  Domain domain;
  Mesh mesh;
};

CanonicalShape load_shape(const RunConfig& c) { return parse_domain_spec(c.domain); }

Domain build_domain(const RunConfig& c, const CanonicalShape& shape) {
  Domain d = make_canonical(shape);
  return c.rotate != 0.0 ? rotate_domain(d, c.rotate) : d;
}

Setup prepare(const RunConfig& c) {
  CanonicalShape shape = load_shape(c);
  Domain domain = build_domain(c, shape);
  Mesh mesh = generate_mesh(domain, c.h);
  for (int r = 0; r < c.refinements; ++r) mesh = refine_uniform(mesh, domain);
  return {std::move(shape), std::move(domain), std::move(mesh)};
}

// Writes through a temporary file in the same directory and renames it into
// place.
void write_atomically(const fs::path& path, const std::function<void(std::ostream&)>& body) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path.string());
    body(out);
    out.flush();
    if (!out) throw ParseError("failed while writing " + path.string());
  }
  fs::rename(tmp, path);
}

void write_json(const fs::path& path, const nlohmann::json& j) {
  write_atomically(path, [&](std::ostream& out) { out << j.dump(2) << "\n"; });
}

void maybe_export_mesh(const RunConfig& c, const Mesh& mesh) {
  if (c.export_mesh)
    write_atomically(fs::path(c.out) / "mesh.txt", [&](std::ostream& out) { write_mesh(out, mesh); });
}

nlohmann::json run_header(const RunConfig& c, const Setup& s) {
  return {{"domain", s.domain.label()},
          {"spec", c.domain},
          {"target_h", c.h},
          {"refinements", c.refinements},
          {"h_max", rounded(s.mesh.h_max)},
          {"vertices", s.mesh.num_vertices()},
          {"triangles", s.mesh.num_triangles()}};
}

int cmd_spectrum(const RunConfig& c) {
  const Setup s = prepare(c);
  const SolverOptions opts = solver_options(c);
  const auto neumann = smallest_eigenpairs(assemble_scalar(s.mesh, BoundaryCondition::neumann), c.m, opts);
  const auto dirichlet =
      smallest_eigenpairs(assemble_scalar(s.mesh, BoundaryCondition::dirichlet), c.m, opts);
  const auto a = smallest_eigenpairs(assemble_vector_a(s.mesh), c.m, opts);
  const fs::path out(c.out);
  write_atomically(out / "neumann.csv", [&](std::ostream& o) { write_spectrum_csv(o, neumann); });
  write_atomically(out / "dirichlet.csv", [&](std::ostream& o) { write_spectrum_csv(o, dirichlet); });
  write_atomically(out / "operator_a.csv", [&](std::ostream& o) { write_spectrum_csv(o, a); });
  maybe_export_mesh(c, s.mesh);
  return kOk;
}

int cmd_verify(const RunConfig& c) {
  const Setup s = prepare(c);
  SpectralRun run;
  const UnionReport report = verify_union(s.mesh, c.m, solver_options(c), &run);
  const Classification cls = classify_eigenfields(
      run.a, run.a_system, s.mesh, report, {c.neumann_threshold, c.dirichlet_threshold});
  const FriedlanderResult fried = check_friedlander(run.neumann, run.dirichlet);

  const double a1 = run.a.value(0);
  const double mu2 = positive_neumann(run.neumann).at(0);
  const double minimizer_gap = std::abs(a1 - mu2) / mu2;
  const bool minimizer_ok = minimizer_gap <= c.tol_union && !cls.fields.empty() &&
                            cls.fields.front().label == FieldLabel::neumann_type;
  const bool union_ok = report.passes(c.tol_union);
  const bool all = union_ok && cls.consistent && fried.holds && minimizer_ok;

  nlohmann::json j = run_header(c, s);
  j["m"] = c.m;
  j["tolerances"] = {{"solver", c.tol},
                     {"cluster", c.cluster_tol},
                     {"union", c.tol_union},
                     {"neumann_threshold", c.neumann_threshold},
                     {"dirichlet_threshold", c.dirichlet_threshold}};
  j["union"] = report;
  j["classification"] = cls;
  j["friedlander"] = fried;
  j["minimizer"] = {{"a1", rounded(a1)},
                    {"mu2", rounded(mu2)},
                    {"relative_gap", rounded(minimizer_gap)},
                    {"label", cls.fields.empty() ? "mixed" : to_string(cls.fields.front().label)},
                    {"passes", minimizer_ok}};
  j["pass"] = {{"union", union_ok},
               {"classification", cls.consistent},
               {"friedlander", fried.holds},
               {"minimizer", minimizer_ok},
               {"all", all}};
  write_json(fs::path(c.out) / "verify.json", j);
  maybe_export_mesh(c, s.mesh);
  if (!all) std::cerr << "verification failed; see verify.json\n";
  return all ? kOk : kVerificationFailed;
}

int cmd_hotspots(const RunConfig& c) {
  const CanonicalShape shape = load_shape(c);
  const Domain domain = build_domain(c, shape);
  if (c.require_lip) {
    const LipCheck lip = is_lip_domain(domain);
    if (!lip.is_lip) {
      std::cerr << "domain is not a lip domain: " << lip.reason << "\n";
      return kNotLip;
    }
  }
  Mesh mesh = generate_mesh(domain, c.h);
  for (int r = 0; r < c.refinements; ++r) mesh = refine_uniform(mesh, domain);

  HotspotOptions opts;
  opts.critical_eps = c.critical_eps;
  opts.collar_factor = c.collar_factor;
  opts.fraction_threshold = c.fraction_threshold;
  opts.parity_threshold = c.parity_threshold;
  opts.nodal_tube_factor = c.nodal_tube_factor;
  opts.zero_tol = c.zero_tol;
  opts.solver = solver_options(c);
  const HotspotReport report = analyze_hotspots(domain, mesh, opts);

  nlohmann::json j = run_header(c, {shape, domain, mesh});
  j["report"] = report;
  write_json(fs::path(c.out) / "hotspots.json", j);
  if (c.vtk)
    write_atomically(fs::path(c.out) / "hotspots.vtk",
                     [&](std::ostream& o) { write_vtk(o, mesh, report.psi2); });
  maybe_export_mesh(c, mesh);
  if (!report.passes()) std::cerr << "hot-spots checks failed; see hotspots.json\n";
  return report.passes() ? kOk : kVerificationFailed;
}

int cmd_convergence(const RunConfig& c) {
  const CanonicalShape shape = load_shape(c);
  const Domain domain = build_domain(c, shape);
  // Eigenvalues are invariant under rotation, so the closed forms still apply.
  const auto exact = analytic_reference(shape);
  const ConvergenceTable table = convergence_study(domain, exact, c.h, c.refinements, solver_options(c));
  write_atomically(fs::path(c.out) / "convergence.csv",
                   [&](std::ostream& o) { write_convergence_csv(o, table); });
  return kOk;
}

void add_common(CLI::App& sub, RunConfig& c) {
  sub.add_option("--domain", c.domain,
                 "square | rectangle:w,h | disk:r | ellipse:a,b | polygon:<name|file> | file:<path>")
      ->required();
  sub.add_option("--h", c.h, "target mesh size");
  sub.add_option("--refinements", c.refinements, "uniform refinements after generation");
  sub.add_option("-m", c.m, "number of eigenvalues");
  sub.add_option("--rotate", c.rotate, "rotate the domain by this angle (radians)");
  sub.add_option("--out", c.out, "output directory");
  sub.add_option("--tol", c.tol, "eigensolver residual tolerance");
  sub.add_option("--cluster-tol", c.cluster_tol, "relative clustering tolerance");
  sub.add_option("--tol-union", c.tol_union, "max relative gap for the union check");
  sub.add_option("--neumann-threshold", c.neumann_threshold, "curl ratio at or below: neumann_type");
  sub.add_option("--dirichlet-threshold", c.dirichlet_threshold, "curl ratio at or above: dirichlet_type");
  sub.add_option("--critical-eps", c.critical_eps, "relative gradient threshold for critical points");
  sub.add_option("--collar", c.collar_factor, "interior collar width in units of h_max");
  sub.add_option("--fraction-threshold", c.fraction_threshold, "required positive triangle fraction");
  sub.add_option("--parity-threshold", c.parity_threshold, "parity score threshold");
  sub.add_option("--nodal-tube", c.nodal_tube_factor, "nodal-axis tube width in units of h_max");
  sub.add_option("--zero-tol", c.zero_tol, "relative size below which a component counts as zero");
  sub.add_flag("--require-lip", c.require_lip, "fail with exit code 5 on non-lip domains");
  sub.add_flag("--vtk", c.vtk, "write hotspots.vtk");
  sub.add_flag("--export-mesh", c.export_mesh, "write mesh.txt");
}

int dispatch(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const GeometryError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const MeshError& e) {
    std::cerr << "mesh error: " << e.what() << "\n";
    return kMeshFailure;
  } catch (const SolverError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const FemError& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return kSolverFailure;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite-element checks of the curvature-weighted vector form and hot spots"};
  // --h is the mesh size, so help is long-form only.
  app.set_help_flag("--help", "print this help message and exit");
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  RunConfig config;
  auto* spectrum = app.add_subcommand("spectrum", "write Neumann, Dirichlet and vector-form spectra");
  auto* verify = app.add_subcommand("verify", "check the union theorem, classification and Friedlander");
  auto* hotspots = app.add_subcommand("hotspots", "analyze the first nontrivial Neumann eigenfunction");
  auto* convergence = app.add_subcommand("convergence", "eigenvalue errors under uniform refinement");
  // Options live on the top-level app so that config files can use plain
  // keys; subcommands pass them through.
  add_common(app, config);
  for (auto* sub : {spectrum, verify, hotspots, convergence}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  return dispatch([&] {
    validate(config);
    if (spectrum->parsed()) return cmd_spectrum(config);
    if (verify->parsed()) return cmd_verify(config);
    if (hotspots->parsed()) return cmd_hotspots(config);
    return cmd_convergence(config);
  });
}
