// Forward evaluation and desk-scale training of bias-free fully connected
// networks (MSE loss, backpropagation, Adam), plus SVD rank reduction of
// weight matrices. Training is bit-reproducible given (topology, data,
// config, seed): weight init, shuffling and batch order all come from the
// seeded generator, reductions are fixed-order.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dsg/dataset.hpp"
#include "dsg/descramble.hpp"
#include "dsg/linalg.hpp"
#include "dsg/network.hpp"
#include "dsg/rng.hpp"

namespace dsg {

inline DenseMatrix forward(const FeedForwardNet& net, const DenseMatrix& x) {
  if (x.rows() != net.input_dim())
    throw shape_error("forward: input rows " + std::to_string(x.rows()) +
                      " do not match network input dim " +
                      std::to_string(net.input_dim()));
  Mat s = to_eigen(x);
  for (std::size_t k = 1; k <= net.depth(); ++k) {
    const Layer& l = net.layer(k);
    s = detail::apply_activation(l.activation, to_eigen(l.weights) * s);
  }
  return to_dense(s);
}

struct LayerSpec {
  std::size_t dim = 0;
  Activation activation = Activation::tanh_sigmoid;
};

struct TrainConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 100;
  double learning_rate = 1e-3;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;
  // Multiplier on the Glorot-style uniform bound +-sqrt(6/(fan_in+fan_out)).
  double init_scale = 1.0;

  void validate() const {
    if (batch_size < 1) throw config_error("batch_size must be positive");
    if (!(learning_rate > 0)) throw config_error("learning_rate must be positive");
    if (!(validation_fraction > 0) || !(validation_fraction < 0.5))
      throw config_error("validation_fraction must be in (0, 0.5)");
    if (!(init_scale > 0)) throw config_error("init_scale must be positive");
  }
};

struct EpochStats {
  std::size_t epoch = 0;
  double train_loss = 0;
  double val_loss = 0;
};

struct TrainReport {
  std::uint64_t seed = 0;
  TrainConfig config;
  std::vector<EpochStats> epochs;
};

struct TrainResult {
  FeedForwardNet net;
  TrainReport report;
};

namespace detail {

inline Mat activation_derivative(Activation act, const Mat& activated) {
  switch (act) {
    case Activation::tanh_sigmoid:
      return (1.0 - activated.array().square()).matrix();
    case Activation::log_sigmoid:
      return (activated.array() * (1.0 - activated.array())).matrix();
    case Activation::identity:
      return Mat::Ones(activated.rows(), activated.cols());
  }
  throw error("unreachable activation");
}

inline double mse(const Mat& y, const Mat& t) {
  return (y - t).squaredNorm() /
         static_cast<double>(y.rows() * y.cols());
}

inline std::vector<Mat> glorot_init(const std::vector<LayerSpec>& topology,
                                    std::size_t input_dim, double scale,
                                    Rng& rng) {
  std::vector<Mat> w;
  std::size_t fan_in = input_dim;
  for (const auto& spec : topology) {
    double bound = scale * std::sqrt(6.0 / static_cast<double>(fan_in + spec.dim));
    Mat m(static_cast<Eigen::Index>(spec.dim),
          static_cast<Eigen::Index>(fan_in));
    for (Eigen::Index i = 0; i < m.rows(); ++i)
      for (Eigen::Index j = 0; j < m.cols(); ++j)
        m(i, j) = rng.uniform(-bound, bound);
    w.push_back(std::move(m));
    fan_in = spec.dim;
  }
  return w;
}

}  // namespace detail

inline TrainResult train(const std::vector<LayerSpec>& topology,
                         const DeerDataset& data, const TrainConfig& cfg) {
  cfg.validate();
  if (topology.empty()) throw config_error("topology must not be empty");
  if (topology.back().dim != data.targets.rows())
    throw shape_error("topology output dim does not match target grid");

  const std::size_t input_dim = data.inputs.rows();
  const std::size_t n = data.inputs.cols();
  Rng rng(cfg.seed);
  std::vector<Mat> w =
      detail::glorot_init(topology, input_dim, cfg.init_scale, rng);

  Mat inputs = to_eigen(data.inputs);
  Mat targets = to_eigen(data.targets);

  // Fixed split: shuffle all trace indices once, last fraction validates.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  std::size_t n_val = std::max<std::size_t>(
      1, static_cast<std::size_t>(std::floor(cfg.validation_fraction *
                                             static_cast<double>(n))));
  if (n_val >= n) throw config_error("dataset too small for validation split");
  std::vector<std::size_t> train_idx(order.begin(), order.end() - n_val);
  std::vector<std::size_t> val_idx(order.end() - n_val, order.end());

  auto gather = [&](const Mat& src, const std::vector<std::size_t>& idx) {
    Mat out(src.rows(), static_cast<Eigen::Index>(idx.size()));
    for (std::size_t j = 0; j < idx.size(); ++j)
      out.col(static_cast<Eigen::Index>(j)) =
          src.col(static_cast<Eigen::Index>(idx[j]));
    return out;
  };

  const std::size_t depth = topology.size();
  auto forward_pass = [&](const Mat& x, std::vector<Mat>& acts) {
    acts.assign(depth + 1, Mat());
    acts[0] = x;
    for (std::size_t k = 0; k < depth; ++k)
      acts[k + 1] = detail::apply_activation(topology[k].activation,
                                             w[k] * acts[k]);
    return acts[depth];
  };

  auto full_loss = [&](const Mat& x, const Mat& t) {
    std::vector<Mat> acts;
    return detail::mse(forward_pass(x, acts), t);
  };

  Mat train_x = gather(inputs, train_idx), train_t = gather(targets, train_idx);
  Mat val_x = gather(inputs, val_idx), val_t = gather(targets, val_idx);

  std::vector<Mat> adam_m, adam_v;
  for (const auto& m : w) {
    adam_m.push_back(Mat::Zero(m.rows(), m.cols()));
    adam_v.push_back(Mat::Zero(m.rows(), m.cols()));
  }
  std::size_t adam_t = 0;

  TrainReport report;
  report.seed = cfg.seed;
  report.config = cfg;

  std::vector<std::size_t> batch_order(train_idx.size());
  std::iota(batch_order.begin(), batch_order.end(), 0);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(batch_order);
    for (std::size_t b0 = 0; b0 < batch_order.size(); b0 += cfg.batch_size) {
      std::size_t bn = std::min(cfg.batch_size, batch_order.size() - b0);
      Mat bx(train_x.rows(), static_cast<Eigen::Index>(bn));
      Mat bt(train_t.rows(), static_cast<Eigen::Index>(bn));
      for (std::size_t j = 0; j < bn; ++j) {
        auto src = static_cast<Eigen::Index>(batch_order[b0 + j]);
        bx.col(static_cast<Eigen::Index>(j)) = train_x.col(src);
        bt.col(static_cast<Eigen::Index>(j)) = train_t.col(src);
      }

      std::vector<Mat> acts;
      Mat y = forward_pass(bx, acts);
      double denom = static_cast<double>(y.rows() * y.cols());
      Mat delta = (2.0 / denom) * (y - bt);
      if (!std::isfinite(detail::mse(y, bt)))
        throw divergence_error("training diverged (NaN loss) at epoch " +
                               std::to_string(epoch));

      ++adam_t;
      double bc1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(adam_t));
      double bc2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(adam_t));
      for (std::size_t k = depth; k-- > 0;) {
        Mat dz = delta.cwiseProduct(
            detail::activation_derivative(topology[k].activation, acts[k + 1]));
        Mat grad = dz * acts[k].transpose();
        if (k > 0) delta = w[k].transpose() * dz;
        adam_m[k] = cfg.adam_beta1 * adam_m[k] + (1.0 - cfg.adam_beta1) * grad;
        adam_v[k] = cfg.adam_beta2 * adam_v[k] +
                    (1.0 - cfg.adam_beta2) * grad.cwiseProduct(grad);
        Mat mhat = adam_m[k] / bc1;
        Mat vhat = adam_v[k] / bc2;
        w[k] -= cfg.learning_rate *
                (mhat.array() / (vhat.array().sqrt() + cfg.adam_eps)).matrix();
      }
    }

    EpochStats st;
    st.epoch = epoch;
    st.train_loss = full_loss(train_x, train_t);
    st.val_loss = full_loss(val_x, val_t);
    if (!std::isfinite(st.train_loss) || !std::isfinite(st.val_loss))
      throw divergence_error("training diverged (NaN loss) at epoch " +
                             std::to_string(epoch));
    report.epochs.push_back(st);
  }

  std::vector<Layer> layers;
  for (std::size_t k = 0; k < depth; ++k)
    layers.push_back(Layer{to_dense(w[k]), topology[k].activation});
  return TrainResult{FeedForwardNet(std::move(layers)), std::move(report)};
}

// Backprop gradient of the batch MSE with respect to each weight matrix;
// exposed for finite-difference verification.
inline std::vector<DenseMatrix> loss_gradients(const FeedForwardNet& net,
                                               const DenseMatrix& x,
                                               const DenseMatrix& t) {
  Mat tx = to_eigen(x), tt = to_eigen(t);
  std::size_t depth = net.depth();
  std::vector<Mat> acts(depth + 1);
  acts[0] = tx;
  for (std::size_t k = 0; k < depth; ++k)
    acts[k + 1] = detail::apply_activation(net.layer(k + 1).activation,
                                           to_eigen(net.layer(k + 1).weights) *
                                               acts[k]);
  double denom = static_cast<double>(acts[depth].rows() * acts[depth].cols());
  Mat delta = (2.0 / denom) * (acts[depth] - tt);
  std::vector<DenseMatrix> grads(depth);
  for (std::size_t k = depth; k-- > 0;) {
    Mat dz = delta.cwiseProduct(detail::activation_derivative(
        net.layer(k + 1).activation, acts[k + 1]));
    grads[k] = to_dense(Mat(dz * acts[k].transpose()));
    if (k > 0) delta = to_eigen(net.layer(k + 1).weights).transpose() * dz;
  }
  return grads;
}

inline double mse_loss(const FeedForwardNet& net, const DenseMatrix& x,
                       const DenseMatrix& t) {
  Mat y = to_eigen(forward(net, x));
  return detail::mse(y, to_eigen(t));
}

// Best rank-r approximation (Eckart-Young) via SVD.
inline DenseMatrix svd_truncate(const DenseMatrix& w, std::size_t rank) {
  std::size_t maxr = std::min(w.rows(), w.cols());
  if (rank < 1 || rank > maxr)
    throw size_error("svd_truncate: rank " + std::to_string(rank) +
                     " out of range 1.." + std::to_string(maxr));
  Mat m = to_eigen(w);
  Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  auto r = static_cast<Eigen::Index>(rank);
  Mat out = svd.matrixU().leftCols(r) *
            svd.singularValues().head(r).asDiagonal() *
            svd.matrixV().leftCols(r).transpose();
  return to_dense(out);
}

}  // namespace dsg
