#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "hsfem/fem.hpp"

namespace hsfem {

struct Eigenpair {
  double value = 0.0;
  Eigen::VectorXd vector;  // M-normalized free coefficients
  double residual = 0.0;   // |Kx - lambda Mx|_2 / ((1 + |lambda|) |x|_M)
};

struct Spectrum {
  SystemKind kind = SystemKind::neumann_scalar;
  std::vector<Eigenpair> pairs;  // nondecreasing eigenvalues
  std::vector<int> cluster_of;   // cluster id per pair
  std::vector<std::vector<int>> clusters;

  std::size_t size() const { return pairs.size(); }
  double value(std::size_t i) const { return pairs.at(i).value; }
  std::vector<double> values() const;
  // Size of the cluster containing pair i.
  std::size_t multiplicity(std::size_t i) const;
};

struct SolverOptions {
  double tol = 1e-8;
  double cluster_tol = 1e-2;
  std::uint64_t seed = 20240611;
  int max_iterations = 1000;
  std::size_t dense_limit = 600;   // dense reduction up to this many DOFs
};

// The k smallest eigenpairs of the pencil (form, mass), clustered with
// options.cluster_tol. Throws SolverError on invalid input, an indefinite
// mass matrix or convergence failure.
Spectrum smallest_eigenpairs(const AssembledSystem& system, std::size_t k,
                             const SolverOptions& options = {});
Spectrum smallest_eigenpairs(const SparseMatrix& form, const SparseMatrix& mass, std::size_t k,
                             const SolverOptions& options = {},
                             SystemKind kind = SystemKind::neumann_scalar);

// Groups consecutive eigenvalues with |l_i - l_{i-1}| <= tol (1 + |l_{i-1}|).
std::vector<std::vector<int>> cluster_values(const std::vector<double>& values, double cluster_tol);
void cluster(Spectrum& spectrum, double cluster_tol);

// Largest entry of |X^T M X - I|.
double mass_orthonormality_error(const Spectrum& spectrum, const SparseMatrix& mass);

// CSV with header `index,eigenvalue,residual,cluster_id` (1-based index).
void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum);

// printf-style %.12g.
std::string format_number(double value);

}  // namespace hsfem
