#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hsfem/eigensolve.hpp"

namespace hsfem {

// k-th positive zero (k >= 1) of J_n and of J_n'.
double bessel_j_zero(int n, int k);
double bessel_j_prime_zero(int n, int k);

struct AnalyticReference {
  double mu2 = 0.0;
  double lambda1 = 0.0;
};

// Closed-form mu2 and lambda1 for rectangles and disks.
std::optional<AnalyticReference> analytic_reference(const CanonicalShape& shape);

struct ConvergenceRow {
  int level = 0;
  double h = 0.0;
  double mu2 = 0.0;
  double lambda1 = 0.0;
  double a1 = 0.0;  // smallest eigenvalue of the vector form
  double err_mu2 = 0.0;
  double err_lambda1 = 0.0;
  double err_a1 = 0.0;
};

struct ConvergenceTable {
  std::string reference_kind;  // analytic | extrapolated | none
  AnalyticReference reference;
  std::vector<ConvergenceRow> rows;
  // Least-squares slopes of log(error) against log(h); empty with one row.
  std::optional<double> order_mu2;
  std::optional<double> order_lambda1;
  std::optional<double> order_a1;
};

// Eigenvalues on the generated mesh and `refinements` uniform refinements.
// Without an analytic reference the errors are measured against a
// second-order Richardson extrapolation of the two finest levels.
ConvergenceTable convergence_study(const Domain& domain, const std::optional<AnalyticReference>& exact,
                                   double target_h, int refinements, const SolverOptions& options = {});

void write_convergence_csv(std::ostream& out, const ConvergenceTable& table);

}  // namespace hsfem
