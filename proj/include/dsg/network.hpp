// Bias-free fully connected network: an ordered list of (weights, activation)
// with chained dimensions. Manifest (.net) references per-layer .dmat files.
#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dsg/matrix.hpp"

namespace dsg {

enum class Activation { tanh_sigmoid, log_sigmoid, identity };

inline std::string activation_name(Activation a) {
  switch (a) {
    case Activation::tanh_sigmoid: return "tanh-sigmoid";
    case Activation::log_sigmoid: return "log-sigmoid";
    case Activation::identity: return "identity";
  }
  throw error("unreachable activation");
}

inline Activation activation_from_name(const std::string& s) {
  if (s == "tanh-sigmoid") return Activation::tanh_sigmoid;
  if (s == "log-sigmoid") return Activation::log_sigmoid;
  if (s == "identity") return Activation::identity;
  throw parse_error("unknown activation tag '" + s + "'");
}

struct Layer {
  DenseMatrix weights;
  Activation activation = Activation::identity;
};

class FeedForwardNet {
public:
  FeedForwardNet() = default;

  explicit FeedForwardNet(std::vector<Layer> layers) : layers_(std::move(layers)) {
    if (layers_.empty())
      throw structure_error("network must have at least one layer");
    for (std::size_t i = 0; i + 1 < layers_.size(); ++i) {
      if (layers_[i].weights.rows() != layers_[i + 1].weights.cols())
        throw structure_error(
            "layer " + std::to_string(i + 2) + " input dimension " +
            std::to_string(layers_[i + 1].weights.cols()) +
            " does not chain with layer " + std::to_string(i + 1) +
            " output dimension " + std::to_string(layers_[i].weights.rows()));
    }
  }

  std::size_t depth() const { return layers_.size(); }
  std::size_t input_dim() const { return layers_.front().weights.cols(); }
  std::size_t output_dim() const { return layers_.back().weights.rows(); }

  // 1-based, matching the k of the wiretap convention.
  const Layer& layer(std::size_t k) const {
    if (k < 1 || k > layers_.size())
      throw config_error("layer index " + std::to_string(k) + " out of range");
    return layers_[k - 1];
  }

  const std::vector<Layer>& layers() const { return layers_; }

  bool operator==(const FeedForwardNet& o) const {
    if (layers_.size() != o.layers_.size()) return false;
    for (std::size_t i = 0; i < layers_.size(); ++i)
      if (!(layers_[i].weights == o.layers_[i].weights) ||
          layers_[i].activation != o.layers_[i].activation)
        return false;
    return true;
  }

private:
  std::vector<Layer> layers_;
};

// Manifest lines: "layer <index> weights=<relative path> activation=<tag>".
// Weight files are written next to the manifest as <stem>_layer<k>.dmat.
inline void save_network(const FeedForwardNet& net,
                         const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw error("cannot open for writing: " + path.string());
  auto dir = path.parent_path();
  auto stem = path.stem().string();
  for (std::size_t k = 1; k <= net.depth(); ++k) {
    std::string wname = stem + "_layer" + std::to_string(k) + ".dmat";
    save_matrix(net.layer(k).weights, dir / wname);
    out << "layer " << k << " weights=" << wname
        << " activation=" << activation_name(net.layer(k).activation) << '\n';
  }
  if (!out) throw error("write failure: " + path.string());
}

inline FeedForwardNet load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw error("cannot open for reading: " + path.string());
  auto dir = path.parent_path();
  std::vector<Layer> layers;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 4 || toks[0] != "layer")
      throw parse_error("line " + std::to_string(line_no) +
                        ": expected 'layer <k> weights=<path> activation=<tag>'");
    std::size_t idx = 0;
    {
      auto t = toks[1];
      auto res = std::from_chars(t.data(), t.data() + t.size(), idx);
      if (res.ec != std::errc{} || res.ptr != t.data() + t.size())
        throw parse_error("line " + std::to_string(line_no) + ": bad layer index");
    }
    if (idx != layers.size() + 1)
      throw structure_error("line " + std::to_string(line_no) +
                            ": layers must appear in order starting at 1");
    auto field = [&](std::string_view tok, std::string_view key) {
      if (tok.substr(0, key.size()) != key)
        throw parse_error("line " + std::to_string(line_no) + ": expected '" +
                          std::string(key) + "...'");
      return std::string(tok.substr(key.size()));
    };
    std::string wpath = field(toks[2], "weights=");
    std::string act = field(toks[3], "activation=");
    layers.push_back(Layer{load_matrix(dir / wpath), activation_from_name(act)});
  }
  return FeedForwardNet(std::move(layers));
}

}  // namespace dsg
