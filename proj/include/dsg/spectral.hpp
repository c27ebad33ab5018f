// Second-derivative matrices for the smoothness functional and dense DFT
// machinery for frequency-domain analysis. Complex matrices are carried as
// explicit (real, imaginary) pairs; no FFT, O(n^2) dense operators are
// enough at this scale.
#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dsg/linalg.hpp"
#include "dsg/matrix.hpp"

namespace dsg {

enum class DiffKind { fourier_spectral_second, finite_difference_second };

struct DiffMatrix {
  DenseMatrix d;
  DiffKind kind = DiffKind::fourier_spectral_second;
  std::size_t grid_points = 0;
  double grid_spacing = 0.0;
};

// Fourier-spectral kind is the inverse DFT of diag(-k^2) composed with the
// DFT on the periodic grid of length n*spacing; it comes out as a symmetric
// circulant, built here directly from the cosine sum. Finite-difference kind
// is the 3-point stencil with the boundary rows zeroed.
inline DiffMatrix build_second_derivative(std::size_t n, double spacing,
                                          DiffKind kind) {
  if (n < 4) throw size_error("second derivative matrix needs n >= 4");
  if (!(spacing > 0)) throw domain_error("grid spacing must be positive");
  DiffMatrix out;
  out.kind = kind;
  out.grid_points = n;
  out.grid_spacing = spacing;

  if (kind == DiffKind::finite_difference_second) {
    DenseMatrix d(n, n);
    double s = 1.0 / (spacing * spacing);
    for (std::size_t i = 1; i + 1 < n; ++i) {
      d(i, i - 1) = s;
      d(i, i) = -2.0 * s;
      d(i, i + 1) = s;
    }
    out.d = std::move(d);
    return out;
  }

  if (n % 2 != 0)
    throw size_error("fourier-spectral second derivative: unsupported odd size " +
                     std::to_string(n));

  const double length = static_cast<double>(n) * spacing;
  const double two_pi = 2.0 * std::numbers::pi;
  std::vector<double> k2(n);
  for (std::size_t j = 0; j < n; ++j) {
    double f = (j <= n / 2) ? static_cast<double>(j)
                            : static_cast<double>(j) - static_cast<double>(n);
    double k = two_pi * f / length;
    k2[j] = k * k;
  }

  // First circulant column: c[m] = -(1/n) sum_j k_j^2 cos(2 pi j m / n);
  // mirrored so the matrix is exactly symmetric, with c[0] adjusted so rows
  // sum to zero (constants are annihilated).
  std::vector<double> c(n, 0.0);
  for (std::size_t m = 0; m <= n / 2; ++m) {
    double acc = 0;
    for (std::size_t j = 0; j < n; ++j)
      acc += k2[j] * std::cos(two_pi * static_cast<double>(j * m) /
                              static_cast<double>(n));
    c[m] = -acc / static_cast<double>(n);
    if (m != 0 && m != n - m) c[n - m] = c[m];
  }
  double total = 0;
  for (double v : c) total += v;
  c[0] -= total;

  DenseMatrix d(n, n);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      d(a, b) = c[(a + n - b) % n];
  out.d = std::move(d);
  return out;
}

struct ComplexMatrix {
  DenseMatrix re;
  DenseMatrix im;

  std::size_t rows() const { return re.rows(); }
  std::size_t cols() const { return re.cols(); }

  static ComplexMatrix from_real(const DenseMatrix& m) {
    return ComplexMatrix{m, DenseMatrix(m.rows(), m.cols())};
  }

  DenseMatrix magnitude() const {
    DenseMatrix m(re.rows(), re.cols());
    for (std::size_t i = 0; i < re.rows(); ++i)
      for (std::size_t j = 0; j < re.cols(); ++j)
        m(i, j) = std::hypot(re(i, j), im(i, j));
    return m;
  }
};

inline ComplexMatrix multiply(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.cols() != b.rows()) throw shape_error("complex multiply: dims mismatch");
  Mat ar = to_eigen(a.re), ai = to_eigen(a.im);
  Mat br = to_eigen(b.re), bi = to_eigen(b.im);
  return ComplexMatrix{to_dense(Mat(ar * br - ai * bi)),
                       to_dense(Mat(ar * bi + ai * br))};
}

struct DftPair {
  ComplexMatrix f_plus;   // forward, 1/sqrt(n) normalization
  ComplexMatrix f_minus;  // inverse (conjugate transpose of f_plus)
};

inline DftPair build_dft_pair(std::size_t n) {
  if (n < 2) throw size_error("DFT pair needs n >= 2");
  const double two_pi = 2.0 * std::numbers::pi;
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  DenseMatrix pre(n, n), pim(n, n), mre(n, n), mim(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      double ang = two_pi * static_cast<double>((j * k) % n) /
                   static_cast<double>(n);
      double c = std::cos(ang) * s, si = std::sin(ang) * s;
      pre(j, k) = c;
      pim(j, k) = -si;
      mre(j, k) = c;
      mim(j, k) = si;
    }
  }
  return DftPair{ComplexMatrix{std::move(pre), std::move(pim)},
                 ComplexMatrix{std::move(mre), std::move(mim)}};
}

namespace detail {

// Forward DFT matrix that also admits n = 1 (identity).
inline ComplexMatrix dft_forward(std::size_t n) {
  if (n == 1)
    return ComplexMatrix{DenseMatrix::identity(1), DenseMatrix(1, 1)};
  return build_dft_pair(n).f_plus;
}

}  // namespace detail

// |2D DFT| with the zero-frequency bin shifted to the center.
inline DenseMatrix spectrum2d(const DenseMatrix& w) {
  if (w.empty()) throw size_error("spectrum2d: empty matrix");
  std::size_t m = w.rows(), n = w.cols();
  auto fm = detail::dft_forward(m);
  auto fn = detail::dft_forward(n);
  // DFT matrices are symmetric, so F_m * w * F_n is the 2D transform.
  ComplexMatrix left = multiply(fm, ComplexMatrix::from_real(w));
  ComplexMatrix hat = multiply(left, fn);
  DenseMatrix mag = hat.magnitude();
  DenseMatrix out(m, n);
  for (std::size_t u = 0; u < m; ++u)
    for (std::size_t v = 0; v < n; ++v)
      out((u + m / 2) % m, (v + n / 2) % n) = mag(u, v);
  return out;
}

}  // namespace dsg
