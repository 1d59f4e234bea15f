#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "hsfem/error.hpp"
#include "hsfem/spectral.hpp"
#include "oracles.hpp"

using namespace hsfem;

namespace {

const Mesh& square_mesh() {
  static const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.05);
  return m;
}

}  // namespace

TEST(Spectral, SquareUnionMatchesMergedList) {
  SpectralRun run;
  const UnionReport r = verify_union(square_mesh(), 6, {}, &run);
  EXPECT_TRUE(r.passes(2e-2));
  EXPECT_LE(r.max_relative_gap, 1e-9);  // exact identity on the discrete level for the square
  ASSERT_EQ(r.matches.size(), 6u);
  EXPECT_TRUE(r.unmatched_a.empty());

  const auto merged = oracle::rectangle_spectrum(1.0, 1.0, false, 4);
  EXPECT_LE(oracle::relative(r.reference[0].value, merged[0]), 1e-2);
  EXPECT_EQ(r.reference[0].source, Provenance::neumann);

  const Classification c = classify_eigenfields(run.a, run.a_system, square_mesh(), r);
  EXPECT_TRUE(c.consistent);
  EXPECT_EQ(c.fields.front().label, FieldLabel::neumann_type);
  const nlohmann::json j = c;
  EXPECT_TRUE(j.at("consistent").get<bool>());
}

TEST(Spectral, ResolutionHeuristic) {
  const Mesh coarse = generate_mesh(make_rectangle(1.0, 1.0), 0.25);
  EXPECT_THROW(verify_union(coarse, 20), SolverError);
  EXPECT_THROW(verify_union(square_mesh(), 2), SolverError);
}

TEST(Spectral, ClassifyRatio) {
  const ClassificationThresholds t;
  EXPECT_EQ(classify_ratio(0.0, t), FieldLabel::neumann_type);
  EXPECT_EQ(classify_ratio(0.2, t), FieldLabel::neumann_type);
  EXPECT_EQ(classify_ratio(0.5, t), FieldLabel::mixed);
  EXPECT_EQ(classify_ratio(0.8, t), FieldLabel::dirichlet_type);
}

TEST(Spectral, TranslationOfAnalyticSquareModes) {
  const Mesh& m = square_mesh();
  const double pi = std::numbers::pi;
  const ScalarField c = interpolate(m, [pi](const Vec2& p) { return std::cos(pi * p.x()); });
  const TranslationReport n = verify_translation(m, c, pi * pi, BoundaryCondition::neumann);
  EXPECT_TRUE(n.gradient);
  EXPECT_LE(n.relative_defect, 2e-2);
  const ScalarField s = interpolate(m, [pi](const Vec2& p) { return std::sin(pi * p.x()) * std::sin(pi * p.y()); });
  const TranslationReport d = verify_translation(m, s, 2 * pi * pi, BoundaryCondition::dirichlet);
  EXPECT_FALSE(d.gradient);
  EXPECT_LE(d.relative_defect, 2e-2);
  EXPECT_THROW(verify_translation(m, ScalarField::Ones(m.num_vertices()), 1.0, BoundaryCondition::neumann),
               FemError);
}

TEST(Spectral, FriedlanderOnSquare) {
  const SpectralRun run = compute_spectra(square_mesh(), 3);
  const FriedlanderResult f = check_friedlander(run.neumann, run.dirichlet);
  EXPECT_TRUE(f.holds);
  EXPECT_LE(oracle::relative(f.mu2, std::numbers::pi * std::numbers::pi), 1e-2);
  EXPECT_LE(oracle::relative(f.lambda1, 2 * std::numbers::pi * std::numbers::pi), 1e-2);
  EXPECT_NEAR(positive_neumann(run.neumann).front(), f.mu2, 0.0);
}

TEST(Spectral, RoundedReports) {
  EXPECT_EQ(rounded(1.0 / 3.0), 0.333333333333);
  EXPECT_EQ(rounded(0.0), 0.0);
}

TEST(Spectral, SquareOperatorEigenvalues) {
  const UnionReport r = verify_union(square_mesh(), 6);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double expected[] = {pi2, pi2, 2 * pi2, 2 * pi2, 4 * pi2, 4 * pi2};
  for (int i = 0; i < 6; ++i) EXPECT_NEAR(r.a_values[i], expected[i], 2e-2 * expected[i]) << i;
  // 2 pi^2 appears once from each side.
  EXPECT_EQ(r.reference[2].source == Provenance::neumann, r.reference[3].source == Provenance::dirichlet);
  EXPECT_NE(r.reference[2].source, r.reference[3].source);
  for (const Match& m : r.matches) EXPECT_LT(m.reference_index, r.reference.size());
}

TEST(Spectral, DiskReferenceMatchesBesselOracle) {
  const Mesh m = generate_mesh(make_disk(1.0), 0.05);
  SpectralRun run;
  const UnionReport r = verify_union(m, 6, {}, &run);
  EXPECT_TRUE(r.passes(2e-2));
  // Neumann: (j'_{n,k})^2 with multiplicity 2 for n > 0; Dirichlet: (j_{n,k})^2.
  const std::vector<double> expected = {std::pow(oracle::j_prime_zero(1, 1), 2), std::pow(oracle::j_prime_zero(1, 1), 2),
                                        std::pow(oracle::j_zero(0, 1), 2), std::pow(oracle::j_prime_zero(2, 1), 2),
                                        std::pow(oracle::j_prime_zero(2, 1), 2)};
  for (std::size_t i = 0; i < expected.size(); ++i)
    EXPECT_NEAR(r.reference[i].value, expected[i], 1e-2 * expected[i]) << i;
  EXPECT_EQ(r.reference[2].source, Provenance::dirichlet);

  const Classification c = classify_eigenfields(run.a, run.a_system, m, r);
  EXPECT_TRUE(c.consistent);
  EXPECT_EQ(c.fields[0].label, FieldLabel::neumann_type);
  EXPECT_EQ(c.fields[1].label, FieldLabel::neumann_type);
  EXPECT_EQ(c.fields[2].label, FieldLabel::dirichlet_type);
}

TEST(Spectral, SquareDoubleClusterSplitsIntoOneOfEach) {
  SpectralRun run;
  const UnionReport r = verify_union(square_mesh(), 6, {}, &run);
  const Classification c = classify_eigenfields(run.a, run.a_system, square_mesh(), r);
  bool seen = false;
  for (const ClusterCheck& k : c.clusters) {
    if (k.a_indices.size() == 2 && k.a_indices[0] == 2) {
      seen = true;
      EXPECT_EQ(k.found_neumann, 1u);
      EXPECT_EQ(k.found_dirichlet, 1u);
      EXPECT_TRUE(k.consistent);
    }
  }
  EXPECT_TRUE(seen);
}

TEST(Spectral, FriedlanderOnDisk) {
  const SpectralRun run = compute_spectra(generate_mesh(make_disk(1.0), 0.05), 3);
  const FriedlanderResult f = check_friedlander(run.neumann, run.dirichlet);
  EXPECT_TRUE(f.holds);
  EXPECT_NEAR(f.mu2, std::pow(oracle::j_prime_zero(1, 1), 2), 1e-2 * f.mu2);
  EXPECT_NEAR(f.lambda1, std::pow(oracle::j_zero(0, 1), 2), 1e-2 * f.lambda1);
}

TEST(Spectral, UnionGapDecreasesOverTwoRefinements) {
  for (const Domain& d : {make_rectangle(1.0, 1.0), make_disk(1.0), make_ellipse(2.0, 1.0),
                          make_polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.45}})}) {
    Mesh m = generate_mesh(d, 0.05);
    double last = verify_union(m, 6).max_relative_gap;
    EXPECT_LE(last, 2e-2) << d.label();
    for (int level = 1; level <= 2; ++level) {
      m = refine_uniform(m, d);
      const double gap = verify_union(m, 6).max_relative_gap;
      // Round-off level gaps (the square) carry no trend.
      if (std::max(gap, last) > 1e-10) EXPECT_LE(gap, 1.2 * last) << d.label() << " level " << level;
      last = gap;
    }
  }
}

TEST(Spectral, DirichletTypeFieldsHaveVanishingBoundaryCurl) {
  const Domain disk = make_disk(1.0);
  double last = 1.0;
  for (double h : {0.1, 0.05}) {
    const Mesh m = generate_mesh(disk, h);
    SpectralRun run;
    const UnionReport r = verify_union(m, 6, {}, &run);
    const Classification c = classify_eigenfields(run.a, run.a_system, m, r);
    ASSERT_EQ(c.fields[2].label, FieldLabel::dirichlet_type);
    EXPECT_LT(c.fields[2].boundary_curl, 0.5 * last) << h;
    last = c.fields[2].boundary_curl;
  }
}
