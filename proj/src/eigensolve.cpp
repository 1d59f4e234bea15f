#include "hsfem/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "hsfem/error.hpp"

namespace hsfem {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double residual(const SparseMatrix& k, const SparseMatrix& m, const VectorXd& x, double lambda) {
  const VectorXd mx = m * x;
  const double mnorm = std::sqrt(std::max(0.0, x.dot(mx)));
  return (k * x - lambda * mx).norm() / ((1.0 + std::abs(lambda)) * mnorm);
}

// Modified Gram-Schmidt in the M inner product, applied twice.
void m_orthonormalize(MatrixXd& y, const SparseMatrix& m) {
  for (int pass = 0; pass < 2; ++pass) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      for (Eigen::Index i = 0; i < j; ++i) {
        const VectorXd mi = m * y.col(i);
        y.col(j) -= mi.dot(y.col(j)) * y.col(i);
      }
      const double norm = std::sqrt(std::max(0.0, y.col(j).dot(m * y.col(j))));
      if (!(norm > 0.0)) throw SolverError("subspace iteration lost rank");
      y.col(j) /= norm;
    }
  }
}

Spectrum finish(SystemKind kind, const SparseMatrix& k, const SparseMatrix& m,
                const std::vector<double>& values, const MatrixXd& vectors, std::size_t count) {
  Spectrum s;
  s.kind = kind;
  for (std::size_t i = 0; i < count; ++i) {
    Eigenpair p;
    p.value = values[i];
    p.vector = vectors.col(static_cast<Eigen::Index>(i));
    p.residual = residual(k, m, p.vector, p.value);
    s.pairs.push_back(std::move(p));
  }
  return s;
}

Spectrum dense_solve(const SparseMatrix& k, const SparseMatrix& m, std::size_t count,
                     SystemKind kind) {
  const MatrixXd kd = MatrixXd(k);
  const MatrixXd md = MatrixXd(m);
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> solver(kd, md);
  if (solver.info() != Eigen::Success) throw SolverError("dense generalized eigensolver failed");
  const VectorXd& ev = solver.eigenvalues();
  std::vector<double> values(ev.data(), ev.data() + ev.size());
  return finish(kind, k, m, values, solver.eigenvectors(), count);
}

// Number of eigenvalues of the pencil below `shift` (Sylvester inertia).
std::size_t count_below(const SparseMatrix& k, const SparseMatrix& m, double shift) {
  const SparseMatrix a = k - shift * m;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw SolverError("factorization for the inertia count failed");
  const VectorXd d = ldlt.vectorD();
  return static_cast<std::size_t>((d.array() < 0.0).count());
}

Spectrum subspace_solve(const SparseMatrix& k, const SparseMatrix& m, std::size_t count,
                        const SolverOptions& options, SystemKind kind) {
  const Eigen::Index n = k.rows();
  const Eigen::Index p = std::min<Eigen::Index>(
      n, std::max<Eigen::Index>(2 * static_cast<Eigen::Index>(count),
                                static_cast<Eigen::Index>(count) + 8));

  // The shift scales like the eigenvalues, so scaled problems follow the
  // same iteration.
  const double sigma = -0.5 * k.diagonal().sum() / (m.diagonal().sum() * static_cast<double>(n));
  const SparseMatrix shifted = k - sigma * m;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt(shifted);
  if (ldlt.info() != Eigen::Success) throw SolverError("shifted factorization failed");

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  MatrixXd x(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) x(i, j) = normal(rng);

  std::vector<double> ritz(static_cast<std::size_t>(p));
  std::vector<double> best(count, std::numeric_limits<double>::infinity());
  for (int iter = 0; iter < options.max_iterations; ++iter) {
    MatrixXd y = ldlt.solve(MatrixXd(m * x));
    if (ldlt.info() != Eigen::Success) throw SolverError("shifted solve failed");
    m_orthonormalize(y, m);
    MatrixXd kr = y.transpose() * (k * y);
    kr = 0.5 * (kr + kr.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<MatrixXd> small(kr);
    x = y * small.eigenvectors();
    for (Eigen::Index j = 0; j < p; ++j) ritz[static_cast<std::size_t>(j)] = small.eigenvalues()[j];

    bool converged = true;
    for (std::size_t j = 0; j < count; ++j) {
      const double r = residual(k, m, x.col(static_cast<Eigen::Index>(j)), ritz[j]);
      best[j] = std::min(best[j], r);
      converged = converged && r <= options.tol;
    }
    if (!converged) continue;

    // Certificate that no eigenvalue below the computed ones was skipped.
    if (static_cast<Eigen::Index>(count) < n) {
      const double last = ritz[count - 1];
      const double next = static_cast<Eigen::Index>(count) < p ? ritz[count] : last;
      const double gap_floor = 1e-6 * (1.0 + std::abs(last));
      const double shift = next - last > 2.0 * gap_floor ? 0.5 * (last + next) : last + gap_floor;
      const auto expected = static_cast<std::size_t>(
          std::count_if(ritz.begin(), ritz.end(), [shift](double v) { return v < shift; }));
      if (count_below(k, m, shift) != expected)
        throw SolverError("subspace iteration converged to a non-extremal eigenvalue set");
    }
    return finish(kind, k, m, ritz, x, count);
  }
  std::ostringstream os;
  os << "eigensolver did not converge in " << options.max_iterations
     << " iterations; best residuals:";
  for (double r : best) os << " " << r;
  throw SolverError(os.str());
}

}  // namespace

std::vector<double> Spectrum::values() const {
  std::vector<double> out;
  out.reserve(pairs.size());
  for (const auto& p : pairs) out.push_back(p.value);
  return out;
}

std::size_t Spectrum::multiplicity(std::size_t i) const {
  return clusters.at(static_cast<std::size_t>(cluster_of.at(i))).size();
}

Spectrum smallest_eigenpairs(const SparseMatrix& form, const SparseMatrix& mass, std::size_t k,
                             const SolverOptions& options, SystemKind kind) {
  const auto n = static_cast<std::size_t>(form.rows());
  if (form.rows() != form.cols() || mass.rows() != mass.cols() || form.rows() != mass.rows())
    throw SolverError("form and mass matrices must be square and of equal size");
  if (k < 1 || k > n) {
    throw SolverError("requested " + std::to_string(k) + " eigenpairs but the system has " +
                      std::to_string(n) + " degrees of freedom");
  }
  if (!(options.tol > 0.0 && options.tol <= 1e-4)) throw SolverError("solver tol must lie in (0, 1e-4]");
  {
    Eigen::SimplicialLLT<SparseMatrix> llt(mass);
    if (llt.info() != Eigen::Success) throw SolverError("mass matrix is not positive definite");
  }

  Spectrum s = (n <= options.dense_limit || 3 * k >= n)
                   ? dense_solve(form, mass, k, kind)
                   : subspace_solve(form, mass, k, options, kind);
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (!(s.pairs[i].residual <= options.tol)) {
      std::ostringstream os;
      os << "eigenpair " << i + 1 << " has residual " << s.pairs[i].residual
         << " above tolerance " << options.tol;
      throw SolverError(os.str());
    }
  }
  cluster(s, options.cluster_tol);
  return s;
}

Spectrum smallest_eigenpairs(const AssembledSystem& system, std::size_t k,
                             const SolverOptions& options) {
  return smallest_eigenpairs(system.form, system.mass, k, options, system.kind);
}

std::vector<std::vector<int>> cluster_values(const std::vector<double>& values, double cluster_tol) {
  if (!(cluster_tol > 0.0)) throw SolverError("cluster_tol must be positive");
  std::vector<std::vector<int>> clusters;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i == 0 ||
        std::abs(values[i] - values[i - 1]) > cluster_tol * (1.0 + std::abs(values[i - 1])))
      clusters.emplace_back();
    clusters.back().push_back(static_cast<int>(i));
  }
  return clusters;
}

void cluster(Spectrum& spectrum, double cluster_tol) {
  spectrum.clusters = cluster_values(spectrum.values(), cluster_tol);
  spectrum.cluster_of.assign(spectrum.size(), 0);
  for (std::size_t c = 0; c < spectrum.clusters.size(); ++c)
    for (int i : spectrum.clusters[c]) spectrum.cluster_of[static_cast<std::size_t>(i)] = static_cast<int>(c);
}

double mass_orthonormality_error(const Spectrum& spectrum, const SparseMatrix& mass) {
  double worst = 0.0;
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    const Eigen::VectorXd mi = mass * spectrum.pairs[i].vector;
    for (std::size_t j = 0; j < spectrum.size(); ++j) {
      const double g = mi.dot(spectrum.pairs[j].vector);
      worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

std::string format_number(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void write_spectrum_csv(std::ostream& out, const Spectrum& spectrum) {
  out << "index,eigenvalue,residual,cluster_id\n";
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    out << i + 1 << "," << format_number(spectrum.pairs[i].value) << ","
        << format_number(spectrum.pairs[i].residual) << "," << spectrum.cluster_of[i] << "\n";
  }
}

}  // namespace hsfem
