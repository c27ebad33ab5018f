#include <catch2/catch.hpp>

#include <cmath>
#include <numbers>

#include "dsg/linalg.hpp"
#include "dsg/spectral.hpp"
#include "oracles.hpp"

using namespace dsg;

TEST_CASE("second derivative annihilates constants") {
  for (auto kind :
       {DiffKind::fourier_spectral_second, DiffKind::finite_difference_second}) {
    auto d = build_second_derivative(8, 0.37, kind);
    Vec ones = Vec::Ones(8);
    REQUIRE((to_eigen(d.d) * ones).norm() <= 1e-10 * 8);
  }
}

TEST_CASE("fourier spectral matrix is symmetric and has harmonic eigenvectors") {
  const std::size_t n = 16;
  const double h = 0.25;
  auto d = build_second_derivative(n, h, DiffKind::fourier_spectral_second);
  Mat dm = to_eigen(d.d);
  REQUIRE((dm - dm.transpose()).cwiseAbs().maxCoeff() <= 1e-12);

  // cos(2 pi j / n) on the grid is an eigenvector with value -(2 pi/(n h))^2.
  Vec x(n);
  for (std::size_t j = 0; j < n; ++j)
    x(static_cast<Eigen::Index>(j)) =
        std::cos(2.0 * std::numbers::pi * static_cast<double>(j) /
                 static_cast<double>(n));
  double k = 2.0 * std::numbers::pi / (static_cast<double>(n) * h);
  Vec want = -(k * k) * x;
  REQUIRE((dm * x - want).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("all discrete harmonics are eigenvectors with -k^2 values") {
  const std::size_t n = 32;
  const double h = 0.5;
  auto d = build_second_derivative(n, h, DiffKind::fourier_spectral_second);
  Mat dm = to_eigen(d.d);
  for (std::size_t mode = 1; mode < n / 2; ++mode) {
    Vec c(n), s(n);
    for (std::size_t j = 0; j < n; ++j) {
      double ang = 2.0 * std::numbers::pi * static_cast<double>(mode * j) /
                   static_cast<double>(n);
      c(static_cast<Eigen::Index>(j)) = std::cos(ang);
      s(static_cast<Eigen::Index>(j)) = std::sin(ang);
    }
    double k = 2.0 * std::numbers::pi * static_cast<double>(mode) /
               (static_cast<double>(n) * h);
    REQUIRE((dm * c + k * k * c).norm() <= 1e-8 * k * k * c.norm());
    REQUIRE((dm * s + k * k * s).norm() <= 1e-8 * k * k * s.norm());
  }
}

TEST_CASE("size limits are enforced") {
  REQUIRE_THROWS_AS(build_second_derivative(3, 1.0, DiffKind::fourier_spectral_second),
                    size_error);
  REQUIRE_THROWS_AS(build_second_derivative(7, 1.0, DiffKind::fourier_spectral_second),
                    size_error);
  REQUIRE_NOTHROW(build_second_derivative(7, 1.0, DiffKind::finite_difference_second));
}

TEST_CASE("dft pair multiplies to the identity") {
  auto pair = build_dft_pair(4);
  ComplexMatrix prod = multiply(pair.f_minus, pair.f_plus);
  Mat re = to_eigen(prod.re), im = to_eigen(prod.im);
  REQUIRE((re - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() <= 1e-12);
  REQUIRE(im.cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("constant vector concentrates in bin zero") {
  auto pair = build_dft_pair(8);
  Mat re = to_eigen(pair.f_plus.re), im = to_eigen(pair.f_plus.im);
  Vec ones = Vec::Ones(8);
  Vec vr = re * ones, vi = im * ones;
  for (int k = 1; k < 8; ++k) {
    REQUIRE(std::abs(vr(k)) <= 1e-12);
    REQUIRE(std::abs(vi(k)) <= 1e-12);
  }
  REQUIRE(vr(0) == Approx(std::sqrt(8.0)).margin(1e-12));
}

TEST_CASE("parseval: the unitary dft preserves norms") {
  Rng rng(11);
  auto pair = build_dft_pair(8);
  Mat re = to_eigen(pair.f_plus.re), im = to_eigen(pair.f_plus.im);
  for (int rep = 0; rep < 10; ++rep) {
    Vec x(8);
    for (int i = 0; i < 8; ++i) x(i) = rng.uniform(-1, 1);
    // Direct summation oracle for ||x||^2.
    double direct = 0;
    for (int i = 0; i < 8; ++i) direct += x(i) * x(i);
    double trans = (re * x).squaredNorm() + (im * x).squaredNorm();
    REQUIRE(trans == Approx(direct).epsilon(1e-12));
  }
  REQUIRE_THROWS_AS(build_dft_pair(1), size_error);
}

TEST_CASE("spectrum2d of a constant matrix is a single center pixel") {
  DenseMatrix w(4, 6);
  for (double& v : w.data()) v = 3.25;
  DenseMatrix s = spectrum2d(w);
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      if (i == 2 && j == 3)
        REQUIRE(s(i, j) > 1.0);
      else
        REQUIRE(s(i, j) <= 1e-10);
    }
}

TEST_CASE("spectrum2d of a sinusoid outer product has four symmetric peaks") {
  const std::size_t n = 16;
  DenseMatrix w(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w(i, j) = std::cos(2.0 * std::numbers::pi * 3.0 * static_cast<double>(i) /
                         static_cast<double>(n)) *
                std::cos(2.0 * std::numbers::pi * 5.0 * static_cast<double>(j) /
                         static_cast<double>(n));
  DenseMatrix s = spectrum2d(w);
  // Peaks at (center +- 3, center +- 5), everything else near zero.
  std::size_t c = n / 2;
  double peak = s(c + 3, c + 5);
  REQUIRE(peak > 1.0);
  REQUIRE(s(c - 3, c + 5) == Approx(peak).epsilon(1e-10));
  REQUIRE(s(c + 3, c - 5) == Approx(peak).epsilon(1e-10));
  REQUIRE(s(c - 3, c - 5) == Approx(peak).epsilon(1e-10));
  double off = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      bool is_peak = (i == c + 3 || i == c - 3) && (j == c + 5 || j == c - 5);
      if (!is_peak) off = std::max(off, s(i, j));
    }
  REQUIRE(off <= 1e-10 * peak);
}

TEST_CASE("spectrum2d of zero is zero") {
  DenseMatrix w(3, 3);
  DenseMatrix s = spectrum2d(w);
  for (double v : s.data()) REQUIRE(v == 0.0);
}

TEST_CASE("property: magnitude spectrum is invariant under circular shifts") {
  Rng rng(12);
  DenseMatrix w = oracles::random_matrix(8, 10, rng);
  DenseMatrix shifted(8, 10);
  const std::size_t di = 3, dj = 7;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 10; ++j)
      shifted((i + di) % 8, (j + dj) % 10) = w(i, j);
  DenseMatrix a = spectrum2d(w), b = spectrum2d(shifted);
  REQUIRE(oracles::max_abs_diff(a.data(), b.data()) <= 1e-10);
}
