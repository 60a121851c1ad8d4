#include "symmetric_eigen.hpp"

#include "kickedxy/core.hpp"

#ifdef KXY_HAVE_LAPACKE
#include <lapacke.h>
#endif

#include <string>

namespace kxy::detail {

SymmetricEigen symmetric_eigen(Eigen::MatrixXd&& matrix, bool with_vectors) {
  SymmetricEigen result;
  const Eigen::Index n = matrix.rows();
  if (n == 0) return result;
#ifdef KXY_HAVE_LAPACKE
  result.values.resize(n);
  const lapack_int info = LAPACKE_dsyevd(
      LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'L',
      static_cast<lapack_int>(n), matrix.data(), static_cast<lapack_int>(n),
      result.values.data());
  if (info != 0) {
    throw NumericError("dsyevd failed with info = " + std::to_string(info));
  }
  if (with_vectors) result.vectors = std::move(matrix);
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
      matrix, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw NumericError("symmetric eigensolver did not converge");
  }
  result.values = solver.eigenvalues();
  if (with_vectors) result.vectors = solver.eigenvectors();
#endif
  return result;
}

}  // namespace kxy::detail
