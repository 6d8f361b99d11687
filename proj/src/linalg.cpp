#include "linalg.hpp"

#include <complex>

#include <lapacke.h>

namespace kagome::detail {

bool eig(const Eigen::MatrixXcd& a, Eigen::VectorXcd& values, Eigen::MatrixXcd& vectors) {
  const auto n = static_cast<lapack_int>(a.rows());
  Eigen::MatrixXcd work = a; // zgeev overwrites its input
  values.resize(n);
  vectors.resize(n, n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'V', n, reinterpret_cast<lapack_complex_double*>(work.data()),
                                        n, reinterpret_cast<lapack_complex_double*>(values.data()), nullptr, n,
                                        reinterpret_cast<lapack_complex_double*>(vectors.data()), n);
  return info == 0;
}

} // namespace kagome::detail
