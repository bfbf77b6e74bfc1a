#pragma once

// Dense symmetric eigenvalues: Householder reduction to tridiagonal form
// followed by implicit-shift QL. Eigenvalues only; deterministic for
// identical input bits.

#include <Eigen/Core>

namespace spikecount::linalg {

struct Tridiagonal {
  Eigen::VectorXd diagonal;
  Eigen::VectorXd off_diagonal;  ///< size n-1 (empty for n <= 1)
};

/// Reduces a symmetric matrix to tridiagonal form. Only the lower triangle
/// of `a` is read.
Tridiagonal householder_tridiagonalize(Eigen::MatrixXd a);

/// Eigenvalues of a symmetric tridiagonal matrix, in ascending order.
/// Throws ConvergenceError if an eigenvalue needs more than `max_sweeps` QL sweeps.
Eigen::VectorXd tridiagonal_eigenvalues(Tridiagonal t, int max_sweeps = 60);

/// Eigenvalues of a symmetric matrix in ascending order.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& a);

}  // namespace spikecount::linalg
