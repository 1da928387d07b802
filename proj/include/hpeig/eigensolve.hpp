#pragma once

#include "hpeig/assembly.hpp"

#include <Eigen/Dense>

#include <cstdint>

namespace hpeig {

/// Lowest eigenpairs of B x = λ M x. Columns of `vectors` are M-orthonormal.
struct EigenCluster {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd residuals;  ///< ‖(B−σM)x − (λ−σ)Mx‖ / ‖(B−σM)x‖ per pair
  int iterations = 0;
};

struct EigenOptions {
  double shift = 0.0;      ///< σ; B − σM must be positive definite
  double tol = 1e-10;
  int max_iter = 500;
  int guard = 5;           ///< extra block vectors beyond the requested count
  std::uint64_t seed = 1;
  /// Optional start vectors (dim x k); missing columns are filled randomly.
  const Eigen::MatrixXd* start = nullptr;
};

/// Shift-invert subspace iteration with a sparse LDLT factorization of B − σM.
/// Throws SolverError when the factorization fails or the iteration does not converge.
EigenCluster solve_lowest(const SparseMatrix& B, const SparseMatrix& M, int m,
                          const EigenOptions& options = {});

/// Dense generalized symmetric eigensolver; reference for small problems.
EigenCluster solve_dense(const Eigen::MatrixXd& B, const Eigen::MatrixXd& M, int m);

} // namespace hpeig
