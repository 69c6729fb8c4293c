#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "smirl/core/random.hpp"
#include "smirl/nn/graph.hpp"

namespace smirl::nn {

enum class Activation { relu, tanh, linear };

inline std::string to_string(Activation a) {
  switch (a) {
    case Activation::relu: return "relu";
    case Activation::tanh: return "tanh";
    case Activation::linear: return "linear";
  }
  return "?";
}

inline Activation parse_activation(const std::string& s) {
  if (s == "relu") return Activation::relu;
  if (s == "tanh") return Activation::tanh;
  if (s == "linear") return Activation::linear;
  throw ContractError("unknown activation '" + s + "'");
}

struct Layer {
  Matrix weight;  // in x out
  Matrix bias;    // 1 x out
  Activation activation = Activation::linear;
};

/// Fully connected feed-forward network. Parameters are ordered
/// [W0, b0, W1, b1, ...]; that order is also the flat serialization order.
class Network {
 public:
  Network() = default;

  /// `sizes` = {in, hidden..., out}; hidden layers use `hidden`, the last
  /// layer `output`. Weights ~ U(-1/sqrt(fan_in), 1/sqrt(fan_in)), biases 0.
  Network(const std::vector<std::size_t>& sizes, Activation hidden, Activation output, Rng& rng) {
    require(sizes.size() >= 2, "Network: need at least input and output sizes");
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
      require(sizes[l] >= 1 && sizes[l + 1] >= 1, "Network: layer sizes must be >= 1");
      Layer layer;
      const double bound = 1.0 / std::sqrt(static_cast<double>(sizes[l]));
      std::uniform_real_distribution<double> init(-bound, bound);
      layer.weight.resize(static_cast<Eigen::Index>(sizes[l]), static_cast<Eigen::Index>(sizes[l + 1]));
      for (Eigen::Index i = 0; i < layer.weight.size(); ++i) layer.weight.data()[i] = init(rng);
      layer.bias = Matrix::Zero(1, static_cast<Eigen::Index>(sizes[l + 1]));
      layer.activation = (l + 2 == sizes.size()) ? output : hidden;
      layers_.push_back(std::move(layer));
    }
  }

  explicit Network(std::vector<Layer> layers) : layers_(std::move(layers)) {
    require(!layers_.empty(), "Network: no layers");
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      require(layers_[l].bias.rows() == 1 && layers_[l].bias.cols() == layers_[l].weight.cols(),
              "Network: bias shape does not match weight");
      if (l > 0) require(layers_[l].weight.rows() == layers_[l - 1].weight.cols(), "Network: layer shapes do not chain");
    }
  }

  std::size_t input_dim() const { return static_cast<std::size_t>(layers_.front().weight.rows()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(layers_.back().weight.cols()); }
  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }

  std::vector<std::size_t> sizes() const {
    std::vector<std::size_t> s{input_dim()};
    for (const auto& l : layers_) s.push_back(static_cast<std::size_t>(l.weight.cols()));
    return s;
  }

  std::vector<Matrix*> parameters() {
    std::vector<Matrix*> p;
    for (auto& l : layers_) {
      p.push_back(&l.weight);
      p.push_back(&l.bias);
    }
    return p;
  }
  std::vector<const Matrix*> parameters() const {
    std::vector<const Matrix*> p;
    for (const auto& l : layers_) {
      p.push_back(&l.weight);
      p.push_back(&l.bias);
    }
    return p;
  }

  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto* p : parameters()) n += static_cast<std::size_t>(p->size());
    return n;
  }

  std::vector<double> flat_parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (const auto* p : parameters()) flat.insert(flat.end(), p->data(), p->data() + p->size());
    return flat;
  }

  void load_flat_parameters(std::span<const double> flat) {
    require_dim(flat.size(), parameter_count(), "Network::load_flat_parameters");
    std::size_t k = 0;
    for (auto* p : parameters()) {
      std::copy(flat.begin() + static_cast<std::ptrdiff_t>(k), flat.begin() + static_cast<std::ptrdiff_t>(k + static_cast<std::size_t>(p->size())), p->data());
      k += static_cast<std::size_t>(p->size());
    }
  }

  bool finite() const {
    for (const auto* p : parameters()) {
      if (!p->allFinite()) return false;
    }
    return true;
  }

  /// Single-sample forward pass without recording.
  std::vector<double> forward(std::span<const double> x) const {
    require_dim(x.size(), input_dim(), "Network::forward");
    Matrix row(1, static_cast<Eigen::Index>(x.size()));
    std::copy(x.begin(), x.end(), row.data());
    Matrix out = forward_batch(row);
    return {out.data(), out.data() + out.size()};
  }

  /// Row-per-sample forward pass without recording.
  Matrix forward_batch(const Matrix& x) const {
    require(static_cast<std::size_t>(x.cols()) == input_dim(), "Network::forward_batch: dimension mismatch");
    Matrix h = x;
    for (const auto& l : layers_) {
      Matrix z = h * l.weight;
      z.rowwise() += l.bias.row(0);
      apply(l.activation, z);
      h = std::move(z);
    }
    return h;
  }

  /// Parameter leaves recorded on a graph, in parameters() order.
  struct Bound {
    std::vector<Var> params;
  };

  Bound bind(Graph& g) const {
    Bound b;
    for (const auto* p : parameters()) b.params.push_back(g.param(*p));
    return b;
  }

  Var forward(Graph& g, const Bound& bound, Var x) const {
    require_dim(bound.params.size(), 2 * layers_.size(), "Network::forward(graph)");
    Var h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      h = g.add_bias(g.matmul(h, bound.params[2 * l]), bound.params[2 * l + 1]);
      switch (layers_[l].activation) {
        case Activation::relu: h = g.relu(h); break;
        case Activation::tanh: h = g.tanh(h); break;
        case Activation::linear: break;
      }
    }
    return h;
  }

  /// Gradients of the bound parameters after g.backward().
  static std::vector<Matrix> gradients(const Graph& g, const Bound& bound) {
    std::vector<Matrix> grads;
    grads.reserve(bound.params.size());
    for (Var v : bound.params) grads.push_back(g.grad(v));
    return grads;
  }

 private:
  static void apply(Activation a, Matrix& z) {
    switch (a) {
      case Activation::relu: z = z.cwiseMax(0.0); break;
      case Activation::tanh: z = z.array().tanh().matrix(); break;
      case Activation::linear: break;
    }
  }

  std::vector<Layer> layers_;
};

}  // namespace smirl::nn
