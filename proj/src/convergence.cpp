#include "hsfem/convergence.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <ostream>

#include "hsfem/error.hpp"
#include "hsfem/spectral.hpp"

namespace hsfem {

namespace {

double kth_root(const std::function<double(double)>& f, int k, double start) {
  if (k < 1) throw GeometryError("zero index must be positive");
  constexpr double step = 0.05;
  double a = start, fa = f(a);
  int found = 0;
  for (double b = a + step; b < 1e4; a = b, b += step) {
    const double fb = f(b);
    if (fa == 0.0 || fa * fb > 0.0) {
      fa = fb;
      continue;
    }
    double lo = a, hi = b, flo = fa;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double fm = f(mid);
      if (flo * fm <= 0.0) {
        hi = mid;
      } else {
        lo = mid;
        flo = fm;
      }
    }
    if (++found == k) return 0.5 * (lo + hi);
    fa = fb;
  }
  throw GeometryError("Bessel zero not found");
}

double fitted_order(const std::vector<ConvergenceRow>& rows, double ConvergenceRow::*err) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& r : rows) {
    const double e = r.*err;
    if (!(e > 0.0)) continue;
    const double x = std::log(r.h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

double bessel_j_zero(int n, int k) {
  return kth_root([n](double x) { return std::cyl_bessel_j(n, x); }, k, 1e-3);
}

double bessel_j_prime_zero(int n, int k) {
  const auto prime = [n](double x) {
    if (n == 0) return -std::cyl_bessel_j(1, x);
    return 0.5 * (std::cyl_bessel_j(n - 1, x) - std::cyl_bessel_j(n + 1, x));
  };
  return kth_root(prime, k, 1e-3);
}

std::optional<AnalyticReference> analytic_reference(const CanonicalShape& shape) {
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  if (const auto* r = std::get_if<RectangleShape>(&shape)) {
    const double longest = std::max(r->width, r->height);
    return AnalyticReference{pi2 / (longest * longest),
                             pi2 * (1.0 / (r->width * r->width) + 1.0 / (r->height * r->height))};
  }
  if (const auto* d = std::get_if<DiskShape>(&shape)) {
    const double a = bessel_j_prime_zero(1, 1) / d->radius;
    const double b = bessel_j_zero(0, 1) / d->radius;
    return AnalyticReference{a * a, b * b};
  }
  return std::nullopt;
}

ConvergenceTable convergence_study(const Domain& domain, const std::optional<AnalyticReference>& exact,
                                   double target_h, int refinements, const SolverOptions& options) {
  if (refinements < 0) throw MeshError("refinements must be nonnegative");
  ConvergenceTable table;
  Mesh mesh = generate_mesh(domain, target_h);
  for (int level = 0; level <= refinements; ++level) {
    if (level > 0) mesh = refine_uniform(mesh, domain);
    const auto neumann = smallest_eigenpairs(assemble_scalar(mesh, BoundaryCondition::neumann), 3, options);
    const auto dirichlet = smallest_eigenpairs(assemble_scalar(mesh, BoundaryCondition::dirichlet), 1, options);
    const auto a = smallest_eigenpairs(assemble_vector_a(mesh), 1, options);
    ConvergenceRow row;
    row.level = level;
    row.h = mesh.h_max;
    row.mu2 = positive_neumann(neumann).at(0);
    row.lambda1 = dirichlet.value(0);
    row.a1 = a.value(0);
    table.rows.push_back(row);
  }

  if (exact) {
    table.reference_kind = "analytic";
    table.reference = *exact;
  } else if (table.rows.size() >= 2) {
    table.reference_kind = "extrapolated";
    const auto& fine = table.rows.back();
    const auto& coarse = table.rows[table.rows.size() - 2];
    table.reference.mu2 = fine.mu2 + (fine.mu2 - coarse.mu2) / 3.0;
    table.reference.lambda1 = fine.lambda1 + (fine.lambda1 - coarse.lambda1) / 3.0;
  } else {
    table.reference_kind = "none";
  }
  const bool has_ref = table.reference_kind != "none";
  for (auto& r : table.rows) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.err_mu2 = has_ref ? std::abs(r.mu2 - table.reference.mu2) / table.reference.mu2 : nan;
    r.err_lambda1 = has_ref ? std::abs(r.lambda1 - table.reference.lambda1) / table.reference.lambda1 : nan;
    r.err_a1 = has_ref ? std::abs(r.a1 - table.reference.mu2) / table.reference.mu2 : nan;
  }
  if (table.rows.size() >= 2 && has_ref) {
    const auto keep = [](double v) { return std::isfinite(v) ? std::optional<double>(v) : std::nullopt; };
    table.order_mu2 = keep(fitted_order(table.rows, &ConvergenceRow::err_mu2));
    table.order_lambda1 = keep(fitted_order(table.rows, &ConvergenceRow::err_lambda1));
    table.order_a1 = keep(fitted_order(table.rows, &ConvergenceRow::err_a1));
  }
  return table;
}

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table) {
  const auto num = [](double v) { return std::isfinite(v) ? format_number(v) : std::string(); };
  const auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
  out << "level,h,mu2,lambda1,a1,rel_err_mu2,rel_err_lambda1,rel_err_a1,reference,"
         "order_mu2,order_lambda1,order_a1\n";
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& r = table.rows[i];
    const bool last = i + 1 == table.rows.size();
    out << r.level << "," << num(r.h) << "," << num(r.mu2) << "," << num(r.lambda1) << ","
        << num(r.a1) << "," << num(r.err_mu2) << "," << num(r.err_lambda1) << "," << num(r.err_a1)
        << "," << table.reference_kind << ","
        << (last ? opt(table.order_mu2) : "") << "," << (last ? opt(table.order_lambda1) : "")
        << "," << (last ? opt(table.order_a1) : "") << "\n";
  }
}

}  // namespace hsfem
