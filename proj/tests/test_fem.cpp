#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "hsfem/error.hpp"
#include "hsfem/fem.hpp"

using namespace hsfem;

namespace {

Eigen::VectorXd random_vector(std::size_t n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> g;
  Eigen::VectorXd x(static_cast<Eigen::Index>(n));
  for (auto& v : x) v = g(rng);
  return x;
}

double asymmetry(const SparseMatrix& a) { return SparseMatrix(a - SparseMatrix(a.transpose())).norm(); }

}  // namespace

TEST(Fem, ScalarMatricesOnSquare) {
  const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.1);
  const AssembledSystem n = assemble_scalar(m, BoundaryCondition::neumann);
  EXPECT_EQ(n.size(), m.num_vertices());
  EXPECT_EQ(asymmetry(n.form), 0.0);
  EXPECT_EQ(asymmetry(n.mass), 0.0);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n.size()));
  EXPECT_LE((n.form * ones).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_NEAR(ones.dot(n.mass * ones), 1.0, 1e-13);

  const AssembledSystem d = assemble_scalar(m, BoundaryCondition::dirichlet);
  EXPECT_EQ(d.size(), m.num_vertices() - m.boundary_vertices.size());
  EXPECT_EQ(d.kind, SystemKind::dirichlet_scalar);
}

TEST(Fem, LinearFunctionsHaveExactGradients) {
  const Mesh m = generate_mesh(make_disk(1.0), 0.2);
  const ScalarField f = interpolate(m, [](const Vec2& p) { return 2.0 * p.x() - 3.0 * p.y() + 1.0; });
  for (const Vec2& g : gradient_field(m, f)) EXPECT_NEAR((g - Vec2(2.0, -3.0)).norm(), 0.0, 1e-11);
  for (const Vec2& g : perp_gradient_field(m, f)) EXPECT_NEAR((g - Vec2(3.0, 2.0)).norm(), 0.0, 1e-11);
  const CurlDiv cd = curl_div(m, lift_gradient(m, f));
  EXPECT_LE(cd.curl_norm, 1e-10);
  EXPECT_LE(cd.div_norm, 1e-10);
}

TEST(Fem, VectorSystemDofCount) {
  const Mesh m = generate_mesh(make_polygon({{0.0, 0.0}, {1.0, 0.0}, {0.5, 0.45}}), 0.1);
  const AssembledSystem a = assemble_vector_a(m);
  const std::size_t interior = m.num_vertices() - m.boundary_vertices.size();
  EXPECT_EQ(a.size(), 2 * interior + m.boundary_vertices.size() - 3);
  EXPECT_EQ(asymmetry(a.form), 0.0);
  EXPECT_EQ(asymmetry(a.mass), 0.0);
}

TEST(Fem, TangentialConstraintIsExact) {
  for (const Domain& d : {make_disk(1.0), make_ellipse(2.0, 1.0), make_rectangle(1.0, 1.0)}) {
    const Mesh m = generate_mesh(d, 0.15);
    const AssembledSystem a = assemble_vector_a(m);
    const VectorField u = vector_to_nodal(a, random_vector(a.size(), 7));
    for (const BoundaryVertex& b : m.boundary_vertices) {
      const Vec2 val = u.at(static_cast<std::size_t>(b.vertex));
      if (b.is_corner) EXPECT_EQ(val.norm(), 0.0);
      else EXPECT_LE(std::abs(val.dot(b.normal)), 1e-15 * std::max(1.0, val.norm()));
    }
    const Eigen::VectorXd x = random_vector(a.size(), 11);
    EXPECT_LE((vector_to_dofs(a, m, vector_to_nodal(a, x)) - x).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Fem, NormalFieldsAreRejected) {
  const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.1);
  const AssembledSystem a = assemble_vector_a(m);
  VectorField normal{Eigen::VectorXd::Zero(m.num_vertices()), Eigen::VectorXd::Zero(m.num_vertices())};
  for (const BoundaryVertex& b : m.boundary_vertices)
    if (!b.is_corner) {
      normal.u1[b.vertex] = b.normal.x();
      normal.u2[b.vertex] = b.normal.y();
    }
  EXPECT_GT(normal_trace_defect(m, normal), 0.5);
  EXPECT_EQ(normal_trace_defect(m, project_tangential(m, normal)), 0.0);
  EXPECT_THROW(vector_to_dofs(a, m, normal), FemError);
  EXPECT_THROW(rayleigh_quotient_a(a, m, normal), FemError);
}

TEST(Fem, RayleighQuotientIsScaleInvariant) {
  const Mesh m = generate_mesh(make_disk(1.0), 0.15);
  const AssembledSystem a = assemble_vector_a(m);
  const Eigen::VectorXd x = random_vector(a.size(), 3);
  const double r = rayleigh_quotient(a, x);
  for (double s : {1e-3, -2.0, 7.5, 1e4}) EXPECT_NEAR(rayleigh_quotient(a, s * x), r, 1e-12 * std::abs(r));
}

TEST(Fem, DiskCurvatureTermMatchesBoundaryLength) {
  // For the rotation field (-y, x) the boundary term -int kappa |u|^2 is the
  // boundary length 2 pi, since kappa = -1 and |u| = 1 on the circle.
  const Mesh m = generate_mesh(make_disk(1.0), 0.05);
  const AssembledSystem a = assemble_vector_a(m);
  const AssembledSystem n = assemble_scalar(m, BoundaryCondition::neumann);
  VectorField u{Eigen::VectorXd::Zero(m.num_vertices()), Eigen::VectorXd::Zero(m.num_vertices())};
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    u.u1[v] = -m.vertices[v].y();
    u.u2[v] = m.vertices[v].x();
  }
  const Eigen::VectorXd x = vector_to_dofs(a, m, project_tangential(m, u), 1e-2);
  const double form = x.dot(a.form * x);
  const double dirichlet = u.u1.dot(n.form * u.u1) + u.u2.dot(n.form * u.u2);
  EXPECT_NEAR(form - dirichlet, 2.0 * std::numbers::pi, 2e-2);
}

TEST(Fem, DegenerateTriangleIsRejected) {
  Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.25);
  const auto t = m.triangles[0];
  m.vertices[t[2]] = 0.5 * (m.vertices[t[0]] + m.vertices[t[1]]);
  EXPECT_THROW(assemble_scalar(m, BoundaryCondition::neumann), FemError);
}

TEST(Fem, NodalMassAndNorms) {
  const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.1);
  const ScalarField f = interpolate(m, [](const Vec2& p) { return p.x(); });
  EXPECT_NEAR(l2_norm(m, f), std::sqrt(1.0 / 3.0), 1e-3);
  const VectorField u{f, f};
  EXPECT_NEAR(l2_norm(m, u), std::sqrt(2.0 / 3.0), 2e-3);
}

TEST(Fem, ReferenceTriangleStiffness) {
  Mesh m;
  m.vertices = {{0, 0}, {1, 0}, {0, 1}};
  m.triangles = {{0, 1, 2}};
  attach_boundary_data(m, make_polygon({{0, 0}, {1, 0}, {0, 1}}));
  const AssembledSystem n = assemble_scalar(m, BoundaryCondition::neumann);
  const Eigen::MatrixXd k = Eigen::MatrixXd(n.form);
  Eigen::Matrix3d expected;
  expected << 1.0, -0.5, -0.5, -0.5, 0.5, 0.0, -0.5, 0.0, 0.5;
  EXPECT_LE((k - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE(k.rowwise().sum().cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Fem, PerpendicularGradientsOfCoordinates) {
  const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.2);
  for (const Vec2& g : perp_gradient_field(m, interpolate(m, [](const Vec2& p) { return p.y(); })))
    EXPECT_LE((g - Vec2(-1, 0)).norm(), 1e-12);
  for (const Vec2& g : perp_gradient_field(m, interpolate(m, [](const Vec2& p) { return p.x(); })))
    EXPECT_LE((g - Vec2(0, 1)).norm(), 1e-12);
  for (const Vec2& g : gradient_field(m, interpolate(m, [](const Vec2& p) { return p.x() + 2 * p.y(); })))
    EXPECT_LE((g - Vec2(1, 2)).norm(), 1e-12);
}

TEST(Fem, CurlAndDivergenceOfLinearAndLiftedFields) {
  const Mesh m = generate_mesh(make_disk(1.0), 0.1);
  VectorField rot{Eigen::VectorXd(m.num_vertices()), Eigen::VectorXd(m.num_vertices())};
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    rot.u1[v] = -m.vertices[v].y();
    rot.u2[v] = m.vertices[v].x();
  }
  const CurlDiv cd = curl_div(m, rot);
  for (std::size_t t = 0; t < m.num_triangles(); ++t) {
    EXPECT_NEAR(cd.curl[t], 2.0, 1e-12);
    EXPECT_NEAR(cd.div[t], 0.0, 1e-12);
  }
  const auto r2 = [](const Vec2& p) { return p.squaredNorm(); };
  const auto xy = [](const Vec2& p) { return p.x() * p.y(); };
  double last_curl = 1e300, last_div = 1e300;
  for (double h : {0.2, 0.1, 0.05}) {
    const Mesh mh = generate_mesh(make_ellipse(2.0, 1.0), h);
    const double c = curl_div(mh, lift_gradient(mh, interpolate(mh, r2))).curl_norm;
    const double d = curl_div(mh, lift_perp_gradient(mh, interpolate(mh, xy))).div_norm;
    EXPECT_LT(c, last_curl);
    EXPECT_LT(d, last_div);
    last_curl = c;
    last_div = d;
  }
}

TEST(Fem, RecoveredGradientErrorIsFirstOrder) {
  const double pi = std::numbers::pi;
  double last = 0.0;
  for (double h : {0.1, 0.05, 0.025}) {
    const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), h);
    const VectorField g = lift_gradient(m, interpolate(m, [pi](const Vec2& p) { return std::cos(pi * p.x()); }));
    double err = 0.0;
    for (std::size_t v = 0; v < m.num_vertices(); ++v)
      err = std::max(err, (g.at(v) - Vec2(-pi * std::sin(pi * m.vertices[v].x()), 0.0)).norm());
    EXPECT_LE(err, 2.0 * pi * pi * h);
    if (last > 0.0) EXPECT_LT(err, 0.75 * last);
    last = err;
  }
}

TEST(Fem, LiftedSquareModeRayleighQuotient) {
  const double pi = std::numbers::pi;
  const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.05);
  const AssembledSystem a = assemble_vector_a(m);
  const VectorField u =
      project_tangential(m, lift_gradient(m, interpolate(m, [pi](const Vec2& p) { return std::cos(pi * p.x()); })));
  EXPECT_NEAR(rayleigh_quotient_a(a, m, u), pi * pi, 1e-2 * pi * pi);
}

TEST(Fem, DiskRotationFieldRespectsMinPrinciple) {
  const Mesh m = generate_mesh(make_disk(1.0), 0.1);
  const AssembledSystem a = assemble_vector_a(m);
  VectorField u{Eigen::VectorXd(m.num_vertices()), Eigen::VectorXd(m.num_vertices())};
  for (std::size_t v = 0; v < m.num_vertices(); ++v) {
    u.u1[v] = -m.vertices[v].y();
    u.u2[v] = m.vertices[v].x();
  }
  // (-y, x) = r t: tangential, vanishing at the center; the quotient is 8.
  const double mu2 = std::pow(1.8411837813406593, 2);
  EXPECT_GE(rayleigh_quotient_a(a, m, project_tangential(m, u)), mu2);
}

TEST(Fem, FormIsPositiveSemidefiniteOnConvexDomains) {
  for (const Domain& d : {make_disk(1.0), make_ellipse(2.0, 1.0)}) {
    const Mesh m = generate_mesh(d, 0.15);
    const AssembledSystem a = assemble_vector_a(m);
    for (unsigned seed = 0; seed < 100; ++seed) {
      const Eigen::VectorXd x = random_vector(a.size(), seed);
      EXPECT_GE(x.dot(a.form * x), 0.0);
    }
  }
}

TEST(Fem, RectangleFormHasNoBoundaryTerm) {
  const Mesh m = generate_mesh(make_rectangle(1.0, 1.0), 0.1);
  const AssembledSystem a = assemble_vector_a(m);
  const AssembledSystem n = assemble_scalar(m, BoundaryCondition::neumann);
  const Eigen::VectorXd x = random_vector(a.size(), 4);
  const VectorField u = vector_to_nodal(a, x);
  const double dirichlet = u.u1.dot(n.form * u.u1) + u.u2.dot(n.form * u.u2);
  EXPECT_NEAR(x.dot(a.form * x), dirichlet, 1e-10 * dirichlet);
}
