#pragma once

// Eigenvalues of dense complex matrices through LAPACK zgeev.

#include <complex>
#include <string>
#include <vector>

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <Eigen/Dense>

#include "mhdbl/errors.hpp"

namespace mhdbl {

inline Eigen::VectorXcd dense_eigenvalues(const Eigen::MatrixXcd& a, const std::string& context = {}) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (a.rows() != a.cols()) throw InvalidParameter("dense_eigenvalues: matrix must be square");
  if (n == 0) return {};
  if (!a.allFinite()) throw NumericalError("dense_eigenvalues: non-finite entries " + context);
  Eigen::MatrixXcd work = a;  // column-major, overwritten by LAPACK
  Eigen::VectorXcd w(n);
  std::complex<double> dummy{};
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(), &dummy, 1,
                                        &dummy, 1);
  if (info != 0)
    throw NumericalError("zgeev failed (info=" + std::to_string(info) + ")" + (context.empty() ? "" : " for " + context));
  return w;
}

inline double max_real_part(const Eigen::VectorXcd& w) {
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < w.size(); ++i) best = std::max(best, w[i].real());
  return best;
}

}  // namespace mhdbl
