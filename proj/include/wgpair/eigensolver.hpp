#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace wgpair {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct EigenOptions {
  int max_iterations = 400;
  // Converged when ||A v - theta v|| / ||v|| drops below this for every
  // requested pair.
  double tolerance = 1e-10;
  int guard_vectors = 2;  // extra subspace columns beyond the requested count
  std::uint64_t seed = 0x5eed;
};

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXd vector;
  double residual = 0.0;
};

struct EigenDiagnostics {
  int iterations = 0;
  double max_residual = 0.0;
  double shift = 0.0;
};

// The `count` eigenpairs of a general real sparse matrix closest to `shift`,
// by block inverse iteration on (A - shift I) with one sparse LU
// factorization and Rayleigh-Ritz extraction. Ordered by distance to the
// shift. Throws SolverError on non-convergence.
std::vector<EigenPair> shift_invert_eigs(const SparseMatrix& a, double shift, int count,
                                         const EigenOptions& options = {},
                                         EigenDiagnostics* diagnostics = nullptr);

}  // namespace wgpair
