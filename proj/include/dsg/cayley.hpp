// Descrambler-group machinery: antisymmetric parameterization, the Cayley
// map Q -> P = (I+Q)^-1 (I-Q) into SO(n), the interpretability functionals
// (Tikhonov smoothness, maximum diagonal sum / diagonal norm square), and
// their analytic gradients with respect to the free strict-upper-triangle
// parameters of Q.
//
// Gradients of a functional eta(P) are pulled back through the Cayley map as
//   dEta/dQ = -(I+Q)^-T (dEta/dP) (I+P)^T,
// then projected to the free parameters: g_ij = G_ij - G_ji for i < j
// (Q_ji = -Q_ij). For antisymmetric Q, (I+Q)^T = I-Q, so the transposed
// solve reuses a factorization of I-Q.
#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "dsg/linalg.hpp"
#include "dsg/matrix.hpp"
#include "dsg/spectral.hpp"

namespace dsg {

struct AntisymParams {
  std::size_t dim = 0;
  std::vector<double> q_upper;  // strict upper triangle, row-major

  static std::size_t param_count(std::size_t n) { return n * (n - 1) / 2; }

  static AntisymParams zero(std::size_t n) {
    return AntisymParams{n, std::vector<double>(param_count(n), 0.0)};
  }

  // Index of (i, j), i < j, in the row-major strict upper triangle.
  std::size_t index(std::size_t i, std::size_t j) const {
    return i * dim - i * (i + 1) / 2 + (j - i - 1);
  }

  void validate() const {
    if (dim < 1) throw size_error("AntisymParams: dim must be positive");
    if (q_upper.size() != param_count(dim))
      throw structure_error("AntisymParams: parameter count mismatch");
    for (double v : q_upper)
      if (!std::isfinite(v))
        throw domain_error("AntisymParams: non-finite parameter");
  }
};

// Q with Q^T = -Q exactly by construction.
inline Mat antisym_matrix(const AntisymParams& q) {
  q.validate();
  auto n = static_cast<Eigen::Index>(q.dim);
  Mat m = Mat::Zero(n, n);
  std::size_t idx = 0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      double v = q.q_upper[idx++];
      m(i, j) = v;
      m(j, i) = -v;
    }
  return m;
}

inline AntisymParams project_antisym(const Mat& g_full, std::size_t dim) {
  AntisymParams out = AntisymParams::zero(dim);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j)
      out.q_upper[idx++] = g_full(static_cast<Eigen::Index>(i),
                                  static_cast<Eigen::Index>(j)) -
                           g_full(static_cast<Eigen::Index>(j),
                                  static_cast<Eigen::Index>(i));
  return out;
}

struct Descrambler {
  DenseMatrix p;
};

namespace detail {

// Shared per-evaluation state. I+Q is nonsingular for every real
// antisymmetric Q (eigenvalues 1 +- i lambda), so the map never fails.
struct CayleyState {
  Eigen::Index n;
  Mat p;
  Mat i_plus_p_t;
  Eigen::PartialPivLU<Mat> lu_plus;   // I + Q
  Eigen::PartialPivLU<Mat> lu_minus;  // I - Q = (I + Q)^T

  explicit CayleyState(const AntisymParams& q) {
    Mat qm = antisym_matrix(q);
    n = qm.rows();
    Mat eye = Mat::Identity(n, n);
    lu_plus.compute(eye + qm);
    lu_minus.compute(eye - qm);
    p = lu_plus.solve(eye - qm);
    i_plus_p_t = (eye + p).transpose();
  }

  // (I+Q)^-T B via the I-Q factorization.
  Mat solve_plus_transposed(const Mat& b) const { return lu_minus.solve(b); }
};

}  // namespace detail

inline Descrambler cayley_map(const AntisymParams& q) {
  detail::CayleyState st(q);
  return Descrambler{to_dense(st.p)};
}

enum class Functional { tikhonov, mds, mdns };
enum class Sense { minimize, maximize };

inline const char* functional_name(Functional f) {
  switch (f) {
    case Functional::tikhonov: return "tikhonov";
    case Functional::mds: return "mds";
    case Functional::mdns: return "mdns";
  }
  throw error("unreachable functional");
}

// Frozen objective: kind, constant factors, and the arrays they came from.
struct DescramblingProblem {
  Functional functional = Functional::tikhonov;
  Sense sense = Sense::minimize;
  std::size_t dim = 0;
  DenseMatrix signal;  // S (tikhonov), n x m
  DenseMatrix weight;  // W (mds/mdns), n x c
  DenseMatrix dtd;     // D^T D, precomputed (tikhonov)
  DenseMatrix sst;     // S S^T, precomputed (tikhonov)
};

namespace detail {

inline Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

// S S^T accumulated over fixed-width column blocks in left-to-right order;
// signals may arrive in batches, the sum is deterministic.
inline Mat accumulate_sst(const Mat& s, Eigen::Index block = 64) {
  Mat acc = Mat::Zero(s.rows(), s.rows());
  for (Eigen::Index c0 = 0; c0 < s.cols(); c0 += block) {
    Eigen::Index w = std::min(block, s.cols() - c0);
    acc += s.middleCols(c0, w) * s.middleCols(c0, w).transpose();
  }
  return symmetrize(acc);
}

}  // namespace detail

inline DescramblingProblem make_tikhonov_problem(const DenseMatrix& signal,
                                                 const DiffMatrix& d) {
  if (d.d.rows() != signal.rows())
    throw shape_error("tikhonov problem: D is " + std::to_string(d.d.rows()) +
                      "x" + std::to_string(d.d.cols()) + " but signal has " +
                      std::to_string(signal.rows()) + " rows");
  DescramblingProblem prob;
  prob.functional = Functional::tikhonov;
  prob.sense = Sense::minimize;
  prob.dim = signal.rows();
  prob.signal = signal;
  Mat dm = to_eigen(d.d);
  prob.dtd = to_dense(detail::symmetrize(dm.transpose() * dm));
  prob.sst = to_dense(detail::accumulate_sst(to_eigen(signal)));
  return prob;
}

inline DescramblingProblem make_mds_problem(const DenseMatrix& weight) {
  DescramblingProblem prob;
  prob.functional = Functional::mds;
  prob.sense = Sense::maximize;
  prob.dim = weight.rows();
  prob.weight = weight;
  return prob;
}

inline DescramblingProblem make_mdns_problem(const DenseMatrix& weight) {
  DescramblingProblem prob;
  prob.functional = Functional::mdns;
  prob.sense = Sense::maximize;
  prob.dim = weight.rows();
  prob.weight = weight;
  return prob;
}

namespace detail {

inline void check_dim(const AntisymParams& q, const DescramblingProblem& prob,
                      Functional expect) {
  if (prob.functional != expect)
    throw config_error("problem holds a different functional");
  if (q.dim != prob.dim)
    throw shape_error("parameter dim " + std::to_string(q.dim) +
                      " does not match problem dim " + std::to_string(prob.dim));
}

}  // namespace detail

// eta_T = ||D P S||_F^2 = Tr[(D^T D) P (S S^T) P^T], via the precomputed
// factors.
inline double eval_tikhonov_state(const detail::CayleyState& st,
                                  const DescramblingProblem& prob) {
  Mat a = to_eigen(prob.dtd), b = to_eigen(prob.sst);
  Mat apb = a * (st.p * b);
  // A squared norm; roundoff near zero must not leak a negative value.
  return std::max(0.0, apb.cwiseProduct(st.p).sum());
}

inline double eval_tikhonov(const AntisymParams& q,
                            const DescramblingProblem& prob) {
  detail::check_dim(q, prob, Functional::tikhonov);
  detail::CayleyState st(q);
  return eval_tikhonov_state(st, prob);
}

// eta_MDS = Tr[P W] over the leading min-dimension diagonal.
inline double eval_mds_state(const detail::CayleyState& st,
                             const DescramblingProblem& prob) {
  Mat w = to_eigen(prob.weight);
  Mat pw = st.p * w;
  return pw.diagonal().sum();
}

inline double eval_mds(const AntisymParams& q, const DescramblingProblem& prob) {
  detail::check_dim(q, prob, Functional::mds);
  detail::CayleyState st(q);
  return eval_mds_state(st, prob);
}

// eta_MDNS = sum_i (P W)_ii^2 over the leading min-dimension diagonal.
inline double eval_mdns_state(const detail::CayleyState& st,
                              const DescramblingProblem& prob) {
  Mat w = to_eigen(prob.weight);
  Mat pw = st.p * w;
  return pw.diagonal().squaredNorm();
}

inline double eval_mdns(const AntisymParams& q, const DescramblingProblem& prob) {
  detail::check_dim(q, prob, Functional::mdns);
  detail::CayleyState st(q);
  return eval_mdns_state(st, prob);
}

// Generic chain-rule pullback from a P-gradient to the free Q parameters.
inline AntisymParams cayley_pullback(const DenseMatrix& dEta_dP,
                                     const AntisymParams& q,
                                     const Descrambler& p) {
  if (dEta_dP.rows() != q.dim || dEta_dP.cols() != q.dim ||
      p.p.rows() != q.dim || p.p.cols() != q.dim)
    throw shape_error("cayley_pullback: all operands must be n x n");
  detail::CayleyState st(q);
  Mat g = to_eigen(dEta_dP);
  Mat full = -(st.solve_plus_transposed(g) * st.i_plus_p_t);
  return project_antisym(full, q.dim);
}

namespace detail {

inline AntisymParams grad_tikhonov_state(const CayleyState& st,
                                         const DescramblingProblem& prob,
                                         std::size_t dim) {
  Mat a = to_eigen(prob.dtd), b = to_eigen(prob.sst);
  Mat apb = a * (st.p * b);
  Mat full = -2.0 * (st.solve_plus_transposed(apb) * st.i_plus_p_t);
  return project_antisym(full, dim);
}

// dEta/dP for MDS: W^T on the leading block, zero rows beyond min(n, c).
inline Mat mds_p_gradient(const Mat& w, Eigen::Index n) {
  Mat g = Mat::Zero(n, n);
  Eigen::Index m = std::min(n, w.cols());
  g.topLeftCorner(m, w.rows()) = w.leftCols(m).transpose();
  return g;
}

inline AntisymParams grad_mds_state(const CayleyState& st,
                                    const DescramblingProblem& prob,
                                    std::size_t dim) {
  Mat w = to_eigen(prob.weight);
  Mat g = mds_p_gradient(w, st.n);
  Mat full = -(st.solve_plus_transposed(g) * st.i_plus_p_t);
  return project_antisym(full, dim);
}

// dEta/dP for MDNS: rows of W^T scaled by twice the diagonal of P W,
// (dEta/dP)_lk = 2 (PW)_ll W_kl.
inline Mat mdns_p_gradient(const Mat& w, const Mat& p) {
  Eigen::Index n = p.rows();
  Mat pw = p * w;
  Mat g = Mat::Zero(n, n);
  Eigen::Index m = std::min(n, w.cols());
  for (Eigen::Index l = 0; l < m; ++l)
    g.row(l).head(w.rows()) = 2.0 * pw(l, l) * w.col(l).transpose();
  return g;
}

inline AntisymParams grad_mdns_state(const CayleyState& st,
                                     const DescramblingProblem& prob,
                                     std::size_t dim) {
  Mat w = to_eigen(prob.weight);
  Mat g = mdns_p_gradient(w, st.p);
  Mat full = -(st.solve_plus_transposed(g) * st.i_plus_p_t);
  return project_antisym(full, dim);
}

}  // namespace detail

inline AntisymParams grad_tikhonov(const AntisymParams& q,
                                   const DescramblingProblem& prob) {
  detail::check_dim(q, prob, Functional::tikhonov);
  detail::CayleyState st(q);
  return detail::grad_tikhonov_state(st, prob, q.dim);
}

inline AntisymParams grad_mds(const AntisymParams& q,
                              const DescramblingProblem& prob) {
  detail::check_dim(q, prob, Functional::mds);
  detail::CayleyState st(q);
  return detail::grad_mds_state(st, prob, q.dim);
}

inline AntisymParams grad_mdns(const AntisymParams& q,
                               const DescramblingProblem& prob) {
  detail::check_dim(q, prob, Functional::mdns);
  detail::CayleyState st(q);
  return detail::grad_mdns_state(st, prob, q.dim);
}

// Dispatch used by the optimizer: value and gradient from one shared
// factorization.
struct FunctionalEval {
  double value = 0;
  AntisymParams gradient;
};

inline FunctionalEval eval_with_gradient(const AntisymParams& q,
                                         const DescramblingProblem& prob) {
  detail::check_dim(q, prob, prob.functional);
  detail::CayleyState st(q);
  FunctionalEval out;
  switch (prob.functional) {
    case Functional::tikhonov:
      out.value = eval_tikhonov_state(st, prob);
      out.gradient = detail::grad_tikhonov_state(st, prob, q.dim);
      return out;
    case Functional::mds:
      out.value = eval_mds_state(st, prob);
      out.gradient = detail::grad_mds_state(st, prob, q.dim);
      return out;
    case Functional::mdns:
      out.value = eval_mdns_state(st, prob);
      out.gradient = detail::grad_mdns_state(st, prob, q.dim);
      return out;
  }
  throw error("unreachable functional");
}

inline double eval_functional(const AntisymParams& q,
                              const DescramblingProblem& prob) {
  switch (prob.functional) {
    case Functional::tikhonov: return eval_tikhonov(q, prob);
    case Functional::mds: return eval_mds(q, prob);
    case Functional::mdns: return eval_mdns(q, prob);
  }
  throw error("unreachable functional");
}

// Natural magnitude of the problem's gradient, used as an absolute noise
// floor by the optimizer. Scales exactly with the data (powers of the input
// scaling), so scaled problems stop at identical iterates.
inline double gradient_scale(const DescramblingProblem& prob) {
  switch (prob.functional) {
    case Functional::tikhonov: {
      Mat a = to_eigen(prob.dtd), b = to_eigen(prob.sst);
      return a.norm() * b.norm();
    }
    case Functional::mds:
      return to_eigen(prob.weight).norm();
    case Functional::mdns: {
      double w = to_eigen(prob.weight).norm();
      return w * w;
    }
  }
  throw error("unreachable functional");
}

}  // namespace dsg
