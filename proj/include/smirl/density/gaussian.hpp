#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "smirl/core/types.hpp"

namespace smirl::density {

/// Per-dimension streaming mean and population variance (Welford).
class RunningMoments {
 public:
  explicit RunningMoments(std::size_t dim = 0) : mean_(dim, 0.0), m2_(dim, 0.0) {}

  std::size_t dim() const { return mean_.size(); }
  std::size_t count() const { return n_; }
  void clear() {
    std::fill(mean_.begin(), mean_.end(), 0.0);
    std::fill(m2_.begin(), m2_.end(), 0.0);
    n_ = 0;
  }

  void add(std::span<const double> x) {
    ++n_;
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (std::size_t i = 0; i < mean_.size(); ++i) {
      const double delta = x[i] - mean_[i];
      mean_[i] += delta * inv_n;
      m2_[i] += delta * (x[i] - mean_[i]);
    }
  }

  double mean(std::size_t i) const { return mean_[i]; }
  // Divides by n (population), not n - 1.
  double variance(std::size_t i) const { return n_ == 0 ? 0.0 : std::max(0.0, m2_[i] / static_cast<double>(n_)); }

 private:
  std::vector<double> mean_;
  std::vector<double> m2_;
  std::size_t n_ = 0;
};

/// Independent Gaussian per observation dimension: mu_i is the mean of D_t,
/// sigma_i = max(sigma_min, population std of D_t).
class GaussianModel {
 public:
  explicit GaussianModel(std::size_t dim, double sigma_min = 0.01) : moments_(dim), sigma_min_(sigma_min) {
    require(dim >= 1, "GaussianModel: dim must be >= 1");
    require(sigma_min > 0.0 && std::isfinite(sigma_min), "GaussianModel: sigma_min must be finite and > 0");
  }

  std::size_t dim() const { return moments_.dim(); }
  std::size_t count() const { return moments_.count(); }
  double sigma_min() const { return sigma_min_; }

  void fit_reset(std::span<const std::vector<double>> init_states) {
    require(!init_states.empty(), "GaussianModel::fit_reset: needs at least one state");
    moments_.clear();
    for (const auto& s : init_states) update(s);
  }

  void update(std::span<const double> s) {
    require_dim(s.size(), dim(), "GaussianModel::update");
    moments_.add(s);
  }

  double mean(std::size_t i) const { return moments_.mean(i); }
  double sigma(std::size_t i) const { return std::max(sigma_min_, std::sqrt(moments_.variance(i))); }

  double log_prob(std::span<const double> s) const {
    require_dim(s.size(), dim(), "GaussianModel::log_prob");
    require(count() >= 1, "GaussianModel::log_prob: model has no data");
    double lp = 0.0;
    for (std::size_t i = 0; i < dim(); ++i) {
      const double sg = sigma(i);
      const double r = s[i] - mean(i);
      lp -= std::log(sg) + r * r / (2.0 * sg * sg);
    }
    return lp;
  }

  /// Interleaved [mu_0, sigma_0, mu_1, sigma_1, ...].
  std::vector<double> theta_features() const {
    std::vector<double> f(2 * dim());
    for (std::size_t i = 0; i < dim(); ++i) {
      f[2 * i] = mean(i);
      f[2 * i + 1] = sigma(i);
    }
    return f;
  }

  static std::size_t feature_dim(std::size_t obs_dim) { return 2 * obs_dim; }

 private:
  RunningMoments moments_;
  double sigma_min_;
};

}  // namespace smirl::density
