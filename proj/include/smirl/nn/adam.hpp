#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "smirl/nn/graph.hpp"

namespace smirl::nn {

/// Training produced a NaN/Inf loss, gradient or parameter.
class NonFiniteError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AdamConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double max_grad_norm = 0.0;  // global-norm clipping; 0 disables
};

/// Adam with bias-corrected moments. Moment buffers are shaped lazily on the
/// first step and must keep matching the parameters afterwards.
class Adam {
 public:
  explicit Adam(AdamConfig cfg = {}) : cfg_(cfg) {
    require(cfg_.learning_rate >= 0.0 && cfg_.beta1 >= 0.0 && cfg_.beta1 < 1.0 && cfg_.beta2 >= 0.0 &&
                cfg_.beta2 < 1.0 && cfg_.epsilon > 0.0 && cfg_.max_grad_norm >= 0.0,
            "Adam: invalid hyperparameters");
  }

  const AdamConfig& config() const { return cfg_; }
  std::size_t step_count() const { return steps_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

  void restore(std::size_t steps, std::vector<Matrix> m, std::vector<Matrix> v) {
    require(m.size() == v.size(), "Adam::restore: moment lists differ in length");
    steps_ = steps;
    m_ = std::move(m);
    v_ = std::move(v);
  }

  void step(std::span<Matrix* const> params, std::span<const Matrix> grads) {
    require_dim(grads.size(), params.size(), "Adam::step parameter/gradient count");
    if (m_.empty()) {
      for (const auto* p : params) {
        m_.push_back(Matrix::Zero(p->rows(), p->cols()));
        v_.push_back(Matrix::Zero(p->rows(), p->cols()));
      }
    }
    require_dim(m_.size(), params.size(), "Adam::step moment count");
    double scale = 1.0;
    double norm2 = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
      if (grads[i].rows() != params[i]->rows() || grads[i].cols() != params[i]->cols() ||
          m_[i].rows() != params[i]->rows() || m_[i].cols() != params[i]->cols()) {
        throw ContractError("Adam::step: shape mismatch at parameter " + std::to_string(i));
      }
      if (!grads[i].allFinite()) throw NonFiniteError("Adam::step: non-finite gradient");
      norm2 += grads[i].squaredNorm();
    }
    if (cfg_.max_grad_norm > 0.0 && norm2 > cfg_.max_grad_norm * cfg_.max_grad_norm) {
      scale = cfg_.max_grad_norm / std::sqrt(norm2);
    }
    ++steps_;
    const double c1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(steps_));
    const double c2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(steps_));
    const double lr = cfg_.learning_rate;
    for (std::size_t i = 0; i < params.size(); ++i) {
      auto g = (grads[i].array() * scale);
      m_[i].array() = cfg_.beta1 * m_[i].array() + (1.0 - cfg_.beta1) * g;
      v_[i].array() = cfg_.beta2 * v_[i].array() + (1.0 - cfg_.beta2) * g.square();
      params[i]->array() -= lr * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + cfg_.epsilon);
      if (!params[i]->allFinite()) throw NonFiniteError("Adam::step: parameter became non-finite");
    }
  }

 private:
  AdamConfig cfg_;
  std::size_t steps_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace smirl::nn
