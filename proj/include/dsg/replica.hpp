// Rational DSP replica of the interpreted network: windowed-sinc FIR
// filters (low-pass for noise, DC notch for baseline) applied zero-phase,
// and a ridge-regularized time-to-distance transform selected on the
// L-curve. Frequencies are normalized to the sampling rate (Nyquist = 0.5),
// so band edges carry over between grid sizes unchanged.
#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <tuple>
#include <vector>

#include "dsg/linalg.hpp"
#include "dsg/matrix.hpp"

namespace dsg {

enum class FirKind { low_pass, high_pass_notch };

struct FirFilter {
  std::vector<double> taps;
  std::size_t order = 0;  // taps.size() - 1
  FirKind kind = FirKind::low_pass;
  double passband_edge = 0;
  double stopband_edge = 0;
  double cutoff = 0;  // midpoint of the edges
};

namespace detail {

inline double sinc(double x) {
  if (x == 0) return 1.0;
  double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

// Unit-DC-gain windowed-sinc low-pass prototype (Hamming).
inline std::vector<double> lowpass_taps(std::size_t order, double cutoff) {
  std::vector<double> h(order + 1);
  double m = static_cast<double>(order);
  double sum = 0;
  for (std::size_t n = 0; n <= order; ++n) {
    double k = static_cast<double>(n) - m / 2.0;
    double window =
        0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * static_cast<double>(n) / m);
    h[n] = 2.0 * cutoff * sinc(2.0 * cutoff * k) * window;
    sum += h[n];
  }
  for (double& v : h) v /= sum;
  return h;
}

// Amplitude response |H(f)| at normalized frequency f.
inline double fir_response(const std::vector<double>& taps, double f) {
  double re = 0, im = 0;
  for (std::size_t n = 0; n < taps.size(); ++n) {
    double ang = -2.0 * std::numbers::pi * f * static_cast<double>(n);
    re += taps[n] * std::cos(ang);
    im += taps[n] * std::sin(ang);
  }
  return std::hypot(re, im);
}

}  // namespace detail

// Windowed-sinc design with the cutoff at the midpoint of the band edges.
// Feasibility uses the Hamming transition width ~3.3/order: a low-pass needs
// it within |stop - pass|; the DC notch needs the mirrored transition region
// (-pass, pass) to hold it. The realized response is then verified on a
// 1024-point grid over the settled bands (outside the window transition).
inline FirFilter design_fir(FirKind kind, std::size_t order,
                            double passband_edge, double stopband_edge) {
  if (!(passband_edge > 0) || !(passband_edge < 0.5) || !(stopband_edge > 0) ||
      !(stopband_edge < 0.5))
    throw config_error("band edges must lie in (0, 0.5) of the sampling rate");
  if (order < 4 || order % 2 != 0)
    throw config_error("order must be even and >= 4");
  if (kind == FirKind::low_pass && !(passband_edge < stopband_edge))
    throw config_error("low-pass needs passband edge below stopband edge");
  if (kind == FirKind::high_pass_notch && !(stopband_edge < passband_edge))
    throw config_error("notch needs stopband edge below passband edge");

  const double transition = 3.3 / static_cast<double>(order);
  const double budget = kind == FirKind::low_pass
                            ? stopband_edge - passband_edge
                            : 2.0 * passband_edge;
  if (transition > budget) {
    auto min_order = static_cast<std::size_t>(std::ceil(3.3 / budget));
    if (min_order % 2 != 0) ++min_order;
    throw design_error("transition band narrower than 3.3/" +
                       std::to_string(order) + "; need order >= " +
                       std::to_string(min_order));
  }

  FirFilter f;
  f.kind = kind;
  f.order = order;
  f.passband_edge = passband_edge;
  f.stopband_edge = stopband_edge;
  f.cutoff = 0.5 * (passband_edge + stopband_edge);

  f.taps = detail::lowpass_taps(order, f.cutoff);
  if (kind == FirKind::high_pass_notch) {
    // Spectral inversion of the unit-gain prototype: exact null at DC.
    for (double& v : f.taps) v = -v;
    f.taps[order / 2] += 1.0;
  }

  // Settled-band verification: stopband attenuation >= 40 dB, passband
  // ripple <= 1 dB, measured clear of the half transition width.
  const double half = 0.5 * transition;
  const double stop_gain = std::pow(10.0, -40.0 / 20.0);
  const double rip_hi = std::pow(10.0, 1.0 / 20.0);
  const double rip_lo = std::pow(10.0, -1.0 / 20.0);
  const int grid = 1024;
  for (int i = 0; i < grid; ++i) {
    double freq = 0.5 * static_cast<double>(i) / static_cast<double>(grid - 1);
    double resp = detail::fir_response(f.taps, freq);
    bool in_pass, in_stop;
    if (kind == FirKind::low_pass) {
      in_pass = freq <= passband_edge;
      in_stop = freq >= std::max(stopband_edge, f.cutoff + half);
    } else {
      in_pass = freq >= std::max(passband_edge, f.cutoff + half);
      in_stop = freq == 0.0;
    }
    if (in_stop && resp > stop_gain)
      throw design_error("stopband attenuation below 40 dB at f=" +
                         format_double(freq));
    if (in_pass && (resp > rip_hi || resp < rip_lo))
      throw design_error("passband ripple above 1 dB at f=" +
                         format_double(freq));
  }
  if (kind == FirKind::high_pass_notch &&
      detail::fir_response(f.taps, 0.0) > 1e-3)
    throw design_error("notch DC gain above 1e-3");
  return f;
}

namespace detail {

inline std::vector<double> conv_full(const std::vector<double>& u,
                                     const std::vector<double>& h) {
  std::vector<double> y(u.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < u.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += u[i] * h[j];
  return y;
}

}  // namespace detail

// Zero-phase (forward-backward) filtering with reflection padding; output
// length equals input length, effective magnitude response is |H|^2.
inline std::vector<double> apply_fir(const FirFilter& f,
                                     const std::vector<double>& signal) {
  const std::size_t n = signal.size();
  const std::size_t t = f.taps.size();
  if (n < t) throw size_error("apply_fir: signal shorter than the filter");
  const std::size_t e = t - 1;

  std::vector<double> padded(n + 2 * e);
  for (std::size_t k = 0; k < e; ++k) padded[k] = signal[e - k];
  for (std::size_t k = 0; k < n; ++k) padded[e + k] = signal[k];
  for (std::size_t k = 0; k < e; ++k) padded[e + n + k] = signal[n - 2 - k];

  std::vector<double> y = detail::conv_full(padded, f.taps);
  std::reverse(y.begin(), y.end());
  y = detail::conv_full(y, f.taps);
  std::reverse(y.begin(), y.end());

  // Forward + backward passes each delay by (t-1); after the final reversal
  // original sample j of the padded signal sits at index j + (t-1).
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = y[2 * e + k];
  return out;
}

struct LCurvePoint {
  double lambda = 0;
  double residual_norm = 0;
  double solution_norm = 0;
};

struct RegularizedTransform {
  DenseMatrix t;  // n_r x n_t
  double lambda = 0;
  std::vector<LCurvePoint> lcurve_trace;
};

inline std::vector<double> default_lambda_grid(const DenseMatrix& f_solutions) {
  Mat f = to_eigen(f_solutions);
  double scale = (f * f.transpose()).trace() / static_cast<double>(f.rows());
  std::vector<double> grid(40);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double expo = -8.0 + 10.0 * static_cast<double>(i) /
                             static_cast<double>(grid.size() - 1);
    grid[i] = scale * std::pow(10.0, expo);
  }
  return grid;
}

// Ridge fit T = [(F F^T + lambda I)^-1 (F P^T)]^T for each grid lambda;
// the returned transform is the one at the L-curve corner (maximum
// curvature of the (log residual, log solution-norm) polyline, centered
// finite differences).
inline RegularizedTransform fit_transform(const DenseMatrix& f_solutions,
                                          const DenseMatrix& p_targets,
                                          std::vector<double> lambda_grid = {}) {
  if (f_solutions.cols() != p_targets.cols())
    throw shape_error("fit_transform: trace counts differ");
  if (lambda_grid.empty()) lambda_grid = default_lambda_grid(f_solutions);
  for (double l : lambda_grid)
    if (!(l > 0))
      throw config_error("lambda grid must be strictly positive");
  std::sort(lambda_grid.begin(), lambda_grid.end());

  Mat f = to_eigen(f_solutions);
  Mat p = to_eigen(p_targets);
  Mat fft = f * f.transpose();
  Mat fpt = f * p.transpose();
  Mat eye = Mat::Identity(fft.rows(), fft.cols());

  RegularizedTransform out;
  std::vector<Mat> transforms;
  transforms.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    Mat normal = fft + lambda * eye;
    Mat zt = Eigen::LLT<Mat>(normal).solve(fpt);  // T^T
    Mat t = zt.transpose();
    LCurvePoint pt;
    pt.lambda = lambda;
    pt.residual_norm = (t * f - p).norm();
    pt.solution_norm = t.norm();
    out.lcurve_trace.push_back(pt);
    transforms.push_back(std::move(t));
  }

  std::size_t best = 0;
  double best_kappa = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i + 1 < out.lcurve_trace.size(); ++i) {
    auto lg = [](double v) { return std::log(std::max(v, 1e-300)); };
    double xm = lg(out.lcurve_trace[i - 1].residual_norm);
    double x0 = lg(out.lcurve_trace[i].residual_norm);
    double xp = lg(out.lcurve_trace[i + 1].residual_norm);
    double ym = lg(out.lcurve_trace[i - 1].solution_norm);
    double y0 = lg(out.lcurve_trace[i].solution_norm);
    double yp = lg(out.lcurve_trace[i + 1].solution_norm);
    double dx = 0.5 * (xp - xm), dy = 0.5 * (yp - ym);
    double ddx = xp - 2 * x0 + xm, ddy = yp - 2 * y0 + ym;
    double denom = std::pow(dx * dx + dy * dy, 1.5);
    if (denom <= 0) continue;
    double kappa = (dx * ddy - dy * ddx) / denom;
    if (kappa > best_kappa) {
      best_kappa = kappa;
      best = i;
    }
  }
  out.lambda = lambda_grid[best];
  out.t = to_dense(transforms[best]);
  return out;
}

struct ReplicaOutput {
  std::vector<double> distribution;  // over the distance grid, unit sum
  std::vector<double> filtered;      // trace after both filters
  bool degenerate = false;           // all-nonpositive pre-normalization
};

// Low-pass, notch, transform, then clip negatives and renormalize to unit
// sum (the positivity role the log-sigmoid output plays in the network).
inline ReplicaOutput replica_pipeline(const std::vector<double>& trace,
                                      const FirFilter& low_pass,
                                      const FirFilter& notch,
                                      const RegularizedTransform& transform) {
  if (transform.t.cols() != trace.size())
    throw shape_error("replica_pipeline: transform does not match trace length");
  ReplicaOutput out;
  out.filtered = apply_fir(notch, apply_fir(low_pass, trace));
  std::vector<double> raw(transform.t.rows(), 0.0);
  for (std::size_t i = 0; i < transform.t.rows(); ++i) {
    double acc = 0;
    for (std::size_t j = 0; j < transform.t.cols(); ++j)
      acc += transform.t(i, j) * out.filtered[j];
    raw[i] = acc;
  }
  double sum = 0;
  for (double& v : raw) {
    if (v < 0) v = 0;
    sum += v;
  }
  if (!(sum > 0)) {
    out.degenerate = true;
    out.distribution.assign(raw.size(), 0.0);
    return out;
  }
  for (double& v : raw) v /= sum;
  out.distribution = std::move(raw);
  return out;
}

}  // namespace dsg
