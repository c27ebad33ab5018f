// Bridge between DenseMatrix (row-major value type) and Eigen, plus the few
// dense factorizations the library leans on.
#pragma once

#include <Eigen/Dense>

#include "dsg/matrix.hpp"

namespace dsg {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat to_eigen(const DenseMatrix& m) {
  return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                        Eigen::RowMajor>>(
      m.data().data(), static_cast<Eigen::Index>(m.rows()),
      static_cast<Eigen::Index>(m.cols()));
}

inline DenseMatrix to_dense(const Mat& e) {
  DenseMatrix m(static_cast<std::size_t>(e.rows()),
                static_cast<std::size_t>(e.cols()));
  for (Eigen::Index i = 0; i < e.rows(); ++i)
    for (Eigen::Index j = 0; j < e.cols(); ++j)
      m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = e(i, j);
  for (double v : m.data())
    if (!std::isfinite(v)) throw domain_error("to_dense: non-finite entry");
  return m;
}

inline DenseMatrix to_dense(const Vec& v) {
  DenseMatrix m(static_cast<std::size_t>(v.size()), 1);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    m(static_cast<std::size_t>(i), 0) = v(i);
  return m;
}

}  // namespace dsg
