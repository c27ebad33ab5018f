// DEER forward physics. The dipolar trace of a spin pair at distance r is
// the orientation average
//     gamma(r, t) = integral_0^1 cos(D t (1 - 3 u^2)) du,
// which evaluates in closed form through the Fresnel integrals
//     FrC(x) = integral_0^x cos(s^2) ds,  FrS(x) = integral_0^x sin(s^2) ds
// as gamma = [cos(Dt) FrC(x) + sin(Dt) FrS(x)] / x with x = sqrt(3 D t).
// D = mu0 gamma_e^2 hbar / (4 pi r^3); time in microseconds, distance in
// nanometers, D in rad/us internally.
//
// Ensemble traces follow the Fredholm integral Gamma(t) = integral p(r)
// gamma(r, t) dr; synthetic datasets add exponential background, partial
// modulation depth and white noise.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <string>
#include <vector>

#include "dsg/dataset.hpp"
#include "dsg/linalg.hpp"
#include "dsg/matrix.hpp"
#include "dsg/rng.hpp"

namespace dsg {

// CODATA 2018: vacuum permeability [N/A^2], free-electron gyromagnetic
// ratio [rad/s/T], reduced Planck constant [J s]. Both electrons are taken
// at the free-electron value.
inline constexpr double k_mu0 = 1.25663706212e-6;
inline constexpr double k_gamma_e = 1.76085963023e11;
inline constexpr double k_hbar = 1.054571817e-34;

// mu0 gamma_e^2 hbar / (4 pi) converted to rad/us * nm^3 (~326.98; divided
// by 2 pi this is the familiar 52.04 MHz nm^3).
inline double dipolar_constant_rad_per_us_nm3() {
  return k_mu0 * k_gamma_e * k_gamma_e * k_hbar / (4.0 * std::numbers::pi) *
         1e21;
}

namespace detail {

// 15-point Gauss-Legendre nodes/weights on [-1, 1].
inline constexpr std::array<double, 15> k_gl_x = {
    -0.9879925180204854, -0.9372733924007060, -0.8482065834104272,
    -0.7244177313601701, -0.5709721726085388, -0.3941513470775634,
    -0.2011940939974345, 0.0,                 0.2011940939974345,
    0.3941513470775634,  0.5709721726085388,  0.7244177313601701,
    0.8482065834104272,  0.9372733924007060,  0.9879925180204854};
inline constexpr std::array<double, 15> k_gl_w = {
    0.03075324199611727, 0.07036604748810812, 0.1071592204671719,
    0.1395706779261543,  0.1662692058169939,  0.1861610000155622,
    0.1984314853271116,  0.2025782419255613,  0.1984314853271116,
    0.1861610000155622,  0.1662692058169939,  0.1395706779261543,
    0.1071592204671719,  0.07036604748810812, 0.03075324199611727};

template <typename F>
double gauss15(F&& f, double a, double b) {
  double c = 0.5 * (a + b), h = 0.5 * (b - a);
  double acc = 0;
  for (int i = 0; i < 15; ++i) acc += k_gl_w[i] * f(c + h * k_gl_x[i]);
  return acc * h;
}

// Composite quadrature of cos/sin(s^2) with subinterval length tied to the
// local oscillation period (phase rate 2s).
template <typename F>
double fresnel_integral(F&& f, double x) {
  double acc = 0, a = 0;
  const double pi = std::numbers::pi;
  while (a < x) {
    double h = pi / (8.0 * std::max(1.0, a));
    double b = std::min(x, a + h);
    acc += gauss15(f, a, b);
    a = b;
  }
  return acc;
}

}  // namespace detail

inline double fresnel_c(double x) {
  if (!std::isfinite(x)) throw domain_error("fresnel_c: non-finite argument");
  if (x < 0) return -fresnel_c(-x);  // odd
  return detail::fresnel_integral([](double s) { return std::cos(s * s); }, x);
}

inline double fresnel_s(double x) {
  if (!std::isfinite(x)) throw domain_error("fresnel_s: non-finite argument");
  if (x < 0) return -fresnel_s(-x);
  return detail::fresnel_integral([](double s) { return std::sin(s * s); }, x);
}

// Dipolar trace gamma(r, t); r in nm, t in us. Depends on r, t only through
// the product D t. |gamma| <= 1, gamma(r, 0) = 1.
inline double deer_kernel(double r, double t) {
  if (!(r > 0)) throw domain_error("deer_kernel: distance must be positive");
  if (!(t >= 0) || !std::isfinite(t))
    throw domain_error("deer_kernel: time must be finite and non-negative");
  double d = dipolar_constant_rad_per_us_nm3() / (r * r * r);
  double arg = d * t;
  // Series branch: gamma = 1 - (2/5) (Dt)^2 + O((Dt)^4).
  if (arg < 1e-6) return 1.0 - 0.4 * arg * arg;
  double x = std::sqrt(3.0 * arg);
  return (std::cos(arg) * fresnel_c(x) + std::sin(arg) * fresnel_s(x)) / x;
}

// Kernel matrix K[i][j] = gamma(r_j, t_i); every column starts at 1 when the
// time grid starts at zero.
inline DenseMatrix kernel_matrix(const std::vector<double>& time_grid,
                                 const std::vector<double>& dist_grid) {
  DenseMatrix k(time_grid.size(), dist_grid.size());
  for (std::size_t j = 0; j < dist_grid.size(); ++j)
    for (std::size_t i = 0; i < time_grid.size(); ++i)
      k(i, j) = deer_kernel(dist_grid[j], time_grid[i]);
  return k;
}

// Gamma = K p normalized so Gamma(0) = 1 (p is a probability vector on the
// grid, so the normalization is the sum of p).
inline std::vector<double> fredholm_forward(const std::vector<double>& p,
                                            const DenseMatrix& kernel) {
  if (p.size() != kernel.cols())
    throw shape_error("fredholm_forward: p length does not match kernel");
  double sum = 0;
  for (double v : p) {
    if (v < 0) throw domain_error("fredholm_forward: negative density entry");
    sum += v;
  }
  if (!(sum > 0)) throw domain_error("fredholm_forward: density sums to zero");
  std::vector<double> out(kernel.rows(), 0.0);
  for (std::size_t i = 0; i < kernel.rows(); ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < kernel.cols(); ++j) acc += kernel(i, j) * p[j];
    out[i] = acc / sum;
  }
  return out;
}

struct DeerGridConfig {
  std::size_t time_points = 64;
  double t_max = 3.0;  // us
  std::size_t dist_points = 64;
  double r_min = 2.5;  // nm
  double r_max = 5.5;
  std::pair<double, double> noise_sigma_range = {0.005, 0.05};
  std::pair<double, double> modulation_depth_range = {0.2, 0.5};
  std::pair<double, double> background_rate_range = {0.05, 0.3};  // per us
  std::size_t n_gaussians_max = 3;
  std::uint64_t seed = 0;

  void validate() const {
    if (time_points < 2 || dist_points < 2)
      throw config_error("grids need at least 2 points");
    if (!(r_min > 0)) throw config_error("r_min must be positive");
    if (!(r_max > r_min)) throw config_error("r_max must exceed r_min");
    if (!(t_max > 0)) throw config_error("t_max must be positive");
    auto ordered = [](std::pair<double, double> p) {
      return p.first <= p.second && p.first >= 0;
    };
    if (!ordered(noise_sigma_range) || !ordered(modulation_depth_range) ||
        !ordered(background_rate_range))
      throw config_error("parameter ranges must be ordered and non-negative");
    if (n_gaussians_max < 1) throw config_error("n_gaussians_max must be >= 1");
  }
};

inline std::vector<double> uniform_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo + step * static_cast<double>(i);
  return g;
}

// Per trace: a 1..n_gaussians_max Gaussian mixture p(r) (clipped, unit sum),
// V(t) = exp(-k t) (1 - lambda + lambda Gamma(t)) plus white noise. Draw
// order per trace is fixed: n_g, then (weight, mean, width) per component,
// then lambda, background rate, noise sigma, then the noise samples. Traces
// use derived seeds, so generation is order-independent.
inline DeerDataset generate_dataset(const DeerGridConfig& cfg,
                                    std::size_t n_traces) {
  cfg.validate();
  if (n_traces < 1) throw config_error("need at least one trace");

  DeerDataset ds;
  ds.seed = cfg.seed;
  ds.time_grid = uniform_grid(0.0, cfg.t_max, cfg.time_points);
  ds.dist_grid = uniform_grid(cfg.r_min, cfg.r_max, cfg.dist_points);
  DenseMatrix kernel = kernel_matrix(ds.time_grid, ds.dist_grid);
  ds.inputs = DenseMatrix(cfg.time_points, n_traces);
  ds.targets = DenseMatrix(cfg.dist_points, n_traces);

  const double range = cfg.r_max - cfg.r_min;
  for (std::size_t trace = 0; trace < n_traces; ++trace) {
    Rng rng(mix_seed(cfg.seed, trace));
    auto n_g = static_cast<std::size_t>(rng.uniform_int(1, cfg.n_gaussians_max));
    std::vector<double> p(cfg.dist_points, 0.0);
    for (std::size_t g = 0; g < n_g; ++g) {
      double weight = rng.uniform();
      double mean = rng.uniform(cfg.r_min + 0.1 * range, cfg.r_max - 0.1 * range);
      double width = rng.uniform(0.02 * range, 0.10 * range);
      for (std::size_t j = 0; j < cfg.dist_points; ++j) {
        double z = (ds.dist_grid[j] - mean) / width;
        p[j] += weight * std::exp(-0.5 * z * z);
      }
    }
    double sum = 0;
    for (double& v : p) {
      if (v < 0) v = 0;
      sum += v;
    }
    for (double& v : p) v /= sum;

    double lambda = rng.uniform(cfg.modulation_depth_range.first,
                                cfg.modulation_depth_range.second);
    double bg = rng.uniform(cfg.background_rate_range.first,
                            cfg.background_rate_range.second);
    double sigma = rng.uniform(cfg.noise_sigma_range.first,
                               cfg.noise_sigma_range.second);

    std::vector<double> gamma = fredholm_forward(p, kernel);
    for (std::size_t i = 0; i < cfg.time_points; ++i) {
      double clean = std::exp(-bg * ds.time_grid[i]) *
                     (1.0 - lambda + lambda * gamma[i]);
      double noise = sigma > 0 ? sigma * rng.normal() : 0.0;
      ds.inputs(i, trace) = clean + noise;
    }
    for (std::size_t j = 0; j < cfg.dist_points; ++j)
      ds.targets(j, trace) = p[j];
  }

  ds.meta["time_points"] = std::to_string(cfg.time_points);
  ds.meta["t_max"] = format_double(cfg.t_max);
  ds.meta["dist_points"] = std::to_string(cfg.dist_points);
  ds.meta["r_min"] = format_double(cfg.r_min);
  ds.meta["r_max"] = format_double(cfg.r_max);
  ds.meta["noise_sigma_lo"] = format_double(cfg.noise_sigma_range.first);
  ds.meta["noise_sigma_hi"] = format_double(cfg.noise_sigma_range.second);
  ds.meta["modulation_depth_lo"] =
      format_double(cfg.modulation_depth_range.first);
  ds.meta["modulation_depth_hi"] =
      format_double(cfg.modulation_depth_range.second);
  ds.meta["background_rate_lo"] = format_double(cfg.background_rate_range.first);
  ds.meta["background_rate_hi"] =
      format_double(cfg.background_rate_range.second);
  ds.meta["n_gaussians_max"] = std::to_string(cfg.n_gaussians_max);
  ds.meta["n_traces"] = std::to_string(n_traces);
  ds.meta["dipolar_constant_rad_per_us_nm3"] =
      format_double(dipolar_constant_rad_per_us_nm3());
  return ds;
}

}  // namespace dsg
