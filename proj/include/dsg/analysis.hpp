// Post-descrambling inspection: frequency-domain conjugation of a weight
// matrix, SVD into conjugate signal libraries, row autocorrelation, column
// block averaging, and the determinant-sign check for group-topology
// arguments. The toolbox computes; interpretation stays with the human.
#pragma once

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "dsg/linalg.hpp"
#include "dsg/matrix.hpp"
#include "dsg/netlab.hpp"
#include "dsg/spectral.hpp"

namespace dsg {

// F_+ W F_- : connects the input spectrum to the output spectrum of y = W x.
// Row-dimension forward DFT on the left, column-dimension inverse on the
// right.
inline ComplexMatrix fourier_conjugate(const DenseMatrix& w) {
  if (w.empty()) throw size_error("fourier_conjugate: empty matrix");
  auto f_row = build_dft_pair(w.rows()).f_plus;
  auto f_col = build_dft_pair(w.cols()).f_minus;
  return multiply(multiply(f_row, ComplexMatrix::from_real(w)), f_col);
}

struct SvdResult {
  DenseMatrix u;               // orthonormal columns
  std::vector<double> s;       // descending
  DenseMatrix v;               // orthonormal columns
};

// W = U S V^T with singular values descending; the largest-magnitude entry
// of each V column is made positive so signal-library plots reproduce
// across runs.
inline SvdResult svd_inspect(const DenseMatrix& w) {
  if (w.empty()) throw size_error("svd_inspect: empty matrix");
  Mat m = to_eigen(w);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Mat u = svd.matrixU();
  Mat v = svd.matrixV();
  for (Eigen::Index j = 0; j < v.cols(); ++j) {
    Eigen::Index imax = 0;
    v.col(j).cwiseAbs().maxCoeff(&imax);
    if (v(imax, j) < 0) {
      v.col(j) = -v.col(j);
      u.col(j) = -u.col(j);
    }
  }
  SvdResult out;
  out.u = to_dense(u);
  out.v = to_dense(v);
  out.s.assign(svd.singularValues().data(),
               svd.singularValues().data() + svd.singularValues().size());
  return out;
}

// Mean over rows of the biased, lag-0-normalized autocorrelation of the
// mean-removed row elements. Degenerate (constant) rows contribute zeros.
inline std::vector<double> row_autocorrelation(const DenseMatrix& w) {
  if (w.cols() < 2)
    throw size_error("row_autocorrelation: need at least 2 columns");
  const std::size_t n = w.cols();
  std::vector<double> acc(n, 0.0);
  std::vector<double> z(n);
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double mean = 0, power = 0;
    for (std::size_t j = 0; j < n; ++j) {
      mean += w(i, j);
      power += w(i, j) * w(i, j);
    }
    mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) z[j] = w(i, j) - mean;
    double c0 = 0;
    for (double v : z) c0 += v * v;
    // Variance at pure roundoff level counts as a degenerate row.
    if (c0 <= 1e-24 * power) continue;
    for (std::size_t lag = 0; lag < n; ++lag) {
      double c = 0;
      for (std::size_t j = 0; j + lag < n; ++j) c += z[j] * z[j + lag];
      acc[lag] += c / c0;
    }
  }
  for (double& v : acc) v /= static_cast<double>(w.rows());
  return acc;
}

struct BlockAverageResult {
  DenseMatrix m;
  bool dropped_partial = false;  // trailing partial block was discarded
};

// Average of the column blocks of width block_cols, then rank reduction to
// sv_keep singular values.
inline BlockAverageResult block_average(const DenseMatrix& w,
                                        std::size_t block_cols,
                                        std::size_t sv_keep) {
  if (block_cols < 1 || block_cols > w.cols())
    throw size_error("block_average: block width out of range");
  if (sv_keep < 1) throw size_error("block_average: sv_keep must be >= 1");
  std::size_t n_blocks = w.cols() / block_cols;
  BlockAverageResult out;
  out.dropped_partial = n_blocks * block_cols != w.cols();
  DenseMatrix avg(w.rows(), block_cols);
  for (std::size_t b = 0; b < n_blocks; ++b)
    for (std::size_t i = 0; i < w.rows(); ++i)
      for (std::size_t j = 0; j < block_cols; ++j)
        avg(i, j) += w(i, b * block_cols + j);
  for (double& v : avg.data()) v /= static_cast<double>(n_blocks);
  std::size_t maxr = std::min(avg.rows(), avg.cols());
  out.m = svd_truncate(avg, std::min(sv_keep, maxr));
  return out;
}

// Sign of det via LU with partial pivoting: permutation parity times
// diagonal signs; 0 when a pivot underflows.
inline int det_sign(const DenseMatrix& w) {
  if (w.rows() != w.cols()) throw shape_error("det_sign: matrix must be square");
  const std::size_t n = w.rows();
  std::vector<std::vector<double>> a(n, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a[i][j] = w(i, j);
  int sign = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(a[i][k]) > std::abs(a[piv][k])) piv = i;
    if (std::abs(a[piv][k]) < 1e-300) return 0;
    if (piv != k) {
      std::swap(a[piv], a[k]);
      sign = -sign;
    }
    if (a[k][k] < 0) sign = -sign;
    for (std::size_t i = k + 1; i < n; ++i) {
      double f = a[i][k] / a[k][k];
      for (std::size_t j = k + 1; j < n; ++j) a[i][j] -= f * a[k][j];
    }
  }
  return sign;
}

}  // namespace dsg
