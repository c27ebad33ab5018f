// Solves q = arg{min/max} eta(P(q) ...) over the antisymmetric parameters:
// limited-memory BFGS (two-loop recursion) with a strong Wolfe line search
// (bracket + zoom, cubic interpolation). Maximization runs as minimization
// of -eta; the reported trace stores the user-sense value.
//
// Also owns problem assembly from a network wiretap and application of a
// converged descrambler to the wiretapped weights.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "dsg/cayley.hpp"
#include "dsg/linalg.hpp"
#include "dsg/network.hpp"
#include "dsg/rng.hpp"
#include "dsg/spectral.hpp"

namespace dsg {

enum class WiretapPosition { pre_activation, post_activation };

struct WiretapSpec {
  std::size_t layer_index = 1;  // 1-based
  WiretapPosition position = WiretapPosition::pre_activation;
  double link_smoothing_weight = 0.0;  // alpha >= 0
};

enum class InitKind { zero, random_small };

struct OptimizerConfig {
  std::size_t memory = 10;
  double grad_tol = 1e-8;  // infinity norm, scaled by the initial gradient
  std::size_t max_iters = 5000;
  double wolfe_c1 = 1e-4;
  double wolfe_c2 = 0.9;
  InitKind init = InitKind::zero;
  double init_sigma = 0.01;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(wolfe_c1 > 0) || !(wolfe_c1 < wolfe_c2) || !(wolfe_c2 < 1))
      throw config_error("need 0 < c1 < c2 < 1");
    if (memory < 1) throw config_error("memory must be >= 1");
  }
};

struct DescrambleResult {
  Descrambler p;
  AntisymParams q;
  std::vector<double> objective_trace;  // user-sense value per accepted step
  bool converged = false;
  bool line_search_failed = false;
  std::size_t iterations = 0;
};

namespace detail {

inline double elementwise_apply(Activation act, double x) {
  switch (act) {
    case Activation::tanh_sigmoid: return std::tanh(x);
    case Activation::log_sigmoid: return 1.0 / (1.0 + std::exp(-x));
    case Activation::identity: return x;
  }
  throw error("unreachable activation");
}

inline Mat apply_activation(Activation act, Mat m) {
  if (act == Activation::identity) return m;
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      m(i, j) = elementwise_apply(act, m(i, j));
  return m;
}

}  // namespace detail

// Wiretap signal array: propagate x through layers < k, then take the k-th
// layer's output before or after its activation.
inline DenseMatrix wiretap_signal(const FeedForwardNet& net,
                                  const DenseMatrix& x,
                                  const WiretapSpec& spec) {
  if (spec.layer_index < 1 || spec.layer_index > net.depth())
    throw config_error("wiretap layer index out of range");
  if (x.rows() != net.input_dim())
    throw shape_error("input rows " + std::to_string(x.rows()) +
                      " do not match network input dim " +
                      std::to_string(net.input_dim()));
  Mat s = to_eigen(x);
  for (std::size_t k = 1; k < spec.layer_index; ++k) {
    const Layer& l = net.layer(k);
    s = detail::apply_activation(l.activation, to_eigen(l.weights) * s);
  }
  const Layer& l = net.layer(spec.layer_index);
  s = to_eigen(l.weights) * s;
  if (spec.position == WiretapPosition::post_activation)
    s = detail::apply_activation(l.activation, std::move(s));
  return to_dense(s);
}

// Assembles the frozen Tikhonov objective at the wiretap. With alpha > 0 the
// signal array is augmented with sqrt(alpha) * W_{k+1}^T as extra columns:
// ||D P W_{k+1}^T||_F^2 is the second-derivative norm along the link
// dimension of the descrambled next layer, so one Frobenius objective covers
// both terms.
inline DescramblingProblem assemble_problem(const FeedForwardNet& net,
                                            const DenseMatrix& x,
                                            const WiretapSpec& spec,
                                            const DiffMatrix& d) {
  if (!(spec.link_smoothing_weight >= 0) ||
      !std::isfinite(spec.link_smoothing_weight))
    throw config_error("link smoothing weight must be finite and >= 0");
  DenseMatrix s = wiretap_signal(net, x, spec);
  if (spec.link_smoothing_weight > 0) {
    if (spec.layer_index >= net.depth())
      throw config_error(
          "link smoothing needs a next layer; wiretap is at the last layer");
    Mat sm = to_eigen(s);
    Mat wt = to_eigen(net.layer(spec.layer_index + 1).weights).transpose();
    if (wt.rows() != sm.rows())
      throw shape_error("next-layer link dimension does not match signal rows");
    Mat aug(sm.rows(), sm.cols() + wt.cols());
    aug.leftCols(sm.cols()) = sm;
    aug.rightCols(wt.cols()) = std::sqrt(spec.link_smoothing_weight) * wt;
    s = to_dense(aug);
  }
  return make_tikhonov_problem(s, d);
}

// Descrambled views of the wiretapped layer. P W_k reorders the layer's
// output side; a post-activation wiretap additionally exposes the conjugate
// view W_{k+1} P^T of the next layer. The network itself is never mutated.
struct DescrambledView {
  DenseMatrix weight;                        // P * W_k
  std::optional<DenseMatrix> next_weight;    // W_{k+1} * P^T (post-activation)
};

inline DescrambledView apply_descrambler(const FeedForwardNet& net,
                                         const WiretapSpec& spec,
                                         const Descrambler& p) {
  if (spec.layer_index < 1 || spec.layer_index > net.depth())
    throw config_error("wiretap layer index out of range");
  Mat pm = to_eigen(p.p);
  Mat wk = to_eigen(net.layer(spec.layer_index).weights);
  if (pm.cols() != wk.rows())
    throw shape_error("descrambler dim does not match layer output dim");
  DescrambledView view;
  view.weight = to_dense(Mat(pm * wk));
  if (spec.position == WiretapPosition::post_activation &&
      spec.layer_index < net.depth()) {
    Mat wn = to_eigen(net.layer(spec.layer_index + 1).weights);
    view.next_weight = to_dense(Mat(wn * pm.transpose()));
  }
  return view;
}

// Forward pass with the unit operator P^-1 P spliced in at the wiretap; for
// orthogonal P the inverse is the transpose. Output must match the plain
// forward pass to roundoff.
inline DenseMatrix forward_with_wiretap(const FeedForwardNet& net,
                                        const DenseMatrix& x,
                                        const WiretapSpec& spec,
                                        const Descrambler& p) {
  if (spec.layer_index < 1 || spec.layer_index > net.depth())
    throw config_error("wiretap layer index out of range");
  if (x.rows() != net.input_dim())
    throw shape_error("input rows do not match network input dim");
  Mat pm = to_eigen(p.p);
  Mat s = to_eigen(x);
  for (std::size_t k = 1; k <= net.depth(); ++k) {
    const Layer& l = net.layer(k);
    s = to_eigen(l.weights) * s;
    if (k == spec.layer_index &&
        spec.position == WiretapPosition::pre_activation)
      s = pm.transpose() * (pm * s);
    s = detail::apply_activation(l.activation, std::move(s));
    if (k == spec.layer_index &&
        spec.position == WiretapPosition::post_activation)
      s = pm.transpose() * (pm * s);
  }
  return to_dense(s);
}

namespace detail {

struct LbfgsPair {
  Vec s, y;
  double rho;
};

// Two-loop recursion with gamma-scaled initial Hessian.
inline Vec lbfgs_direction(const Vec& g, const std::deque<LbfgsPair>& mem) {
  Vec q = g;
  std::vector<double> alpha(mem.size());
  for (std::size_t i = mem.size(); i-- > 0;) {
    alpha[i] = mem[i].rho * mem[i].s.dot(q);
    q -= alpha[i] * mem[i].y;
  }
  if (!mem.empty()) {
    const auto& last = mem.back();
    double gamma = last.s.dot(last.y) / last.y.dot(last.y);
    q *= gamma;
  }
  for (std::size_t i = 0; i < mem.size(); ++i) {
    double beta = mem[i].rho * mem[i].y.dot(q);
    q += (alpha[i] - beta) * mem[i].s;
  }
  return -q;
}

template <typename Objective>
struct WolfeResult {
  bool ok = false;
  double alpha = 0, f = 0;
  Vec g;
};

// Nocedal-Wright cubic minimizer on [alo, ahi]; falls back to bisection when
// the interpolant is degenerate or lands outside the safeguard margins.
inline double cubic_step(double alo, double flo, double dlo, double ahi,
                         double fhi, double dhi) {
  double d1 = dlo + dhi - 3.0 * (flo - fhi) / (alo - ahi);
  double disc = d1 * d1 - dlo * dhi;
  double mid = 0.5 * (alo + ahi);
  if (!(disc >= 0)) return mid;
  double d2 = std::sqrt(disc) * (ahi > alo ? 1.0 : -1.0);
  double denom = dhi - dlo + 2.0 * d2;
  if (denom == 0) return mid;
  double a = ahi - (ahi - alo) * (dhi + d2 - d1) / denom;
  double lo = std::min(alo, ahi), hi = std::max(alo, ahi);
  double margin = 0.1 * (hi - lo);
  if (!std::isfinite(a) || a < lo + margin || a > hi - margin) return mid;
  return a;
}

// Strong Wolfe search: phi(a) = f(x + a d). Returns failure (not an
// exception) when the zoom budget is exhausted.
template <typename Objective>
WolfeResult<Objective> wolfe_search(Objective&& obj, const Vec& x, const Vec& d,
                                    double f0, const Vec& g0, double alpha0,
                                    double c1, double c2) {
  WolfeResult<Objective> res;
  const double dphi0 = g0.dot(d);
  if (!(dphi0 < 0)) return res;  // not a descent direction

  const int max_zoom = 50;
  double f_alpha = 0;
  Vec g_alpha;
  auto phi = [&](double a) {
    Vec xt = x + a * d;
    f_alpha = obj(xt, g_alpha);
    return f_alpha;
  };

  auto zoom = [&](double alo, double flo, double dlo, double ahi, double fhi,
                  double dhi) {
    for (int it = 0; it < max_zoom; ++it) {
      double a = cubic_step(alo, flo, dlo, ahi, fhi, dhi);
      double fa = phi(a);
      double da = g_alpha.dot(d);
      if (fa > f0 + c1 * a * dphi0 || fa >= flo) {
        ahi = a; fhi = fa; dhi = da;
      } else {
        if (std::abs(da) <= -c2 * dphi0) {
          res.ok = true; res.alpha = a; res.f = fa; res.g = g_alpha;
          return;
        }
        if (da * (ahi - alo) >= 0) { ahi = alo; fhi = flo; dhi = dlo; }
        alo = a; flo = fa; dlo = da;
      }
      if (std::abs(ahi - alo) < 1e-18 * std::max(1.0, std::abs(alo))) break;
    }
  };

  double a_prev = 0, f_prev = f0, d_prev = dphi0;
  double a = alpha0;
  for (int it = 0; it < 60; ++it) {
    double fa = phi(a);
    double da = g_alpha.dot(d);
    if (fa > f0 + c1 * a * dphi0 || (it > 0 && fa >= f_prev)) {
      zoom(a_prev, f_prev, d_prev, a, fa, da);
      return res;
    }
    if (std::abs(da) <= -c2 * dphi0) {
      res.ok = true; res.alpha = a; res.f = fa; res.g = g_alpha;
      return res;
    }
    if (da >= 0) {
      zoom(a, fa, da, a_prev, f_prev, d_prev);
      return res;
    }
    a_prev = a; f_prev = fa; d_prev = da;
    a *= 2.0;
    if (!(a < 1e12)) break;
  }
  return res;
}

}  // namespace detail

inline DescrambleResult optimize(const DescramblingProblem& prob,
                                 const OptimizerConfig& cfg) {
  cfg.validate();
  const std::size_t dim = prob.dim;
  const std::size_t nparam = AntisymParams::param_count(dim);
  const double sign = prob.sense == Sense::maximize ? -1.0 : 1.0;

  Vec x = Vec::Zero(static_cast<Eigen::Index>(nparam));
  if (cfg.init == InitKind::random_small) {
    Rng rng(cfg.seed);
    for (Eigen::Index i = 0; i < x.size(); ++i)
      x(i) = cfg.init_sigma * rng.normal();
  }

  auto to_params = [dim](const Vec& v) {
    AntisymParams q = AntisymParams::zero(dim);
    for (std::size_t i = 0; i < q.q_upper.size(); ++i)
      q.q_upper[i] = v(static_cast<Eigen::Index>(i));
    return q;
  };

  // Internal objective is always minimized.
  auto objective = [&](const Vec& v, Vec& grad) {
    FunctionalEval ev = eval_with_gradient(to_params(v), prob);
    grad.resize(v.size());
    for (std::size_t i = 0; i < ev.gradient.q_upper.size(); ++i)
      grad(static_cast<Eigen::Index>(i)) = sign * ev.gradient.q_upper[i];
    return sign * ev.value;
  };

  Vec g;
  double f = objective(x, g);
  DescrambleResult result;
  result.objective_trace.push_back(sign * f);

  const double g0_norm = g.lpNorm<Eigen::Infinity>();
  // Absolute noise floor: gradients at the scale of pure roundoff on the
  // problem data count as zero (e.g. a stationary start).
  const double floor = 1e-13 * gradient_scale(prob);
  auto converged = [&](const Vec& grad) {
    double gn = grad.lpNorm<Eigen::Infinity>();
    return gn <= std::max(cfg.grad_tol * g0_norm, floor);
  };

  if (converged(g)) {
    result.converged = true;
    result.q = to_params(x);
    result.p = cayley_map(result.q);
    return result;
  }

  std::deque<detail::LbfgsPair> mem;
  for (std::size_t iter = 1; iter <= cfg.max_iters; ++iter) {
    Vec d = detail::lbfgs_direction(g, mem);
    if (!(g.dot(d) < 0)) {  // safeguard: reset to steepest descent
      mem.clear();
      d = -g;
    }
    // First step is scaled by the gradient so the trajectory is invariant
    // under exact rescaling of the objective; later steps try 1 first.
    double alpha0 = mem.empty() ? 1.0 / g.lpNorm<Eigen::Infinity>() : 1.0;
    auto ls = detail::wolfe_search(objective, x, d, f, g, alpha0, cfg.wolfe_c1,
                                   cfg.wolfe_c2);
    result.iterations = iter;
    if (!ls.ok) {
      result.line_search_failed = true;
      break;
    }
    Vec s = ls.alpha * d;
    Vec y = ls.g - g;
    double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      mem.push_back(detail::LbfgsPair{s, y, 1.0 / sy});
      if (mem.size() > cfg.memory) mem.pop_front();
    }
    x += s;
    f = ls.f;
    g = ls.g;
    result.objective_trace.push_back(sign * f);
    if (converged(g)) {
      result.converged = true;
      break;
    }
  }

  result.q = to_params(x);
  result.p = cayley_map(result.q);
  return result;
}

}  // namespace dsg
