#include "wgpair/eigensolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/SparseLU>

#include "wgpair/error.hpp"

namespace wgpair {

namespace {

Eigen::MatrixXd orthonormalize(const Eigen::MatrixXd& m) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
}

}  // namespace

std::vector<EigenPair> shift_invert_eigs(const SparseMatrix& a, double shift, int count,
                                         const EigenOptions& options,
                                         EigenDiagnostics* diagnostics) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw SolverError("eigensolver needs a square matrix", 0, 0.0);
  if (count < 1) throw SolverError("eigensolver: count must be >= 1", 0, 0.0);
  const int block = static_cast<int>(std::min<Eigen::Index>(count + options.guard_vectors, n));
  count = std::min(count, block);

  SparseMatrix identity(n, n);
  identity.setIdentity();

  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  double sigma = shift;
  for (int attempt = 0; attempt < 4; ++attempt) {
    SparseMatrix shifted = a - sigma * identity;
    shifted.makeCompressed();
    lu.compute(shifted);
    if (lu.info() == Eigen::Success) break;
    // Shift landed on an eigenvalue; nudge it.
    sigma += (std::abs(sigma) + 1.0) * 1e-7 * (attempt + 1);
  }
  if (lu.info() != Eigen::Success) {
    throw SolverError("sparse LU factorization of the shifted operator failed", 0, 0.0);
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd q(n, block);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (int c = 0; c < block; ++c) q(r, c) = normal(rng);
  }
  q = orthonormalize(q);

  std::vector<EigenPair> pairs;
  double worst = std::numeric_limits<double>::infinity();
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    Eigen::MatrixXd z = lu.solve(q);
    q = orthonormalize(z);

    const Eigen::MatrixXd aq = a * q;
    const Eigen::MatrixXd h = q.transpose() * aq;
    Eigen::EigenSolver<Eigen::MatrixXd> small(h);
    if (small.info() != Eigen::Success) {
      throw SolverError("Rayleigh-Ritz eigen decomposition failed", it, worst);
    }
    const Eigen::VectorXcd theta = small.eigenvalues();
    const Eigen::MatrixXcd s = small.eigenvectors();

    std::vector<int> order(block);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int l, int r) {
      return std::abs(theta[l] - sigma) < std::abs(theta[r] - sigma);
    });

    pairs.clear();
    worst = 0.0;
    Eigen::MatrixXd rotated(n, block);
    for (int k = 0; k < block; ++k) {
      const int idx = order[k];
      Eigen::VectorXd y = q * s.col(idx).real();
      if (y.norm() == 0.0) y = q * s.col(idx).imag();
      y.normalize();
      rotated.col(k) = y;
      if (k < count) {
        const double value = theta[idx].real();
        const double res = (a * y - value * y).norm();
        worst = std::max(worst, res);
        pairs.push_back({value, y, res});
      }
    }
    // Keep iterating on the Ritz basis; it sharpens the ordering.
    q = orthonormalize(rotated);
    if (worst <= options.tolerance) {
      ++it;
      break;
    }
  }

  if (diagnostics) {
    diagnostics->iterations = it;
    diagnostics->max_residual = worst;
    diagnostics->shift = sigma;
  }
  if (worst > options.tolerance) {
    std::ostringstream msg;
    msg << "shift-invert iteration did not converge after " << it
        << " iterations (max residual " << worst << ", tolerance " << options.tolerance << ")";
    throw SolverError(msg.str(), it, worst);
  }
  return pairs;
}

}  // namespace wgpair
