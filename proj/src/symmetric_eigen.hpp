#pragma once

#include <Eigen/Dense>

namespace kxy::detail {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // empty unless requested
};

/// Eigen-decomposition of a real symmetric matrix (lower triangle is read).
/// Uses LAPACK divide and conquer when the build found LAPACKE, otherwise
/// Eigen's SelfAdjointEigenSolver. Consumes its argument.
SymmetricEigen symmetric_eigen(Eigen::MatrixXd&& matrix, bool with_vectors);

}  // namespace kxy::detail
