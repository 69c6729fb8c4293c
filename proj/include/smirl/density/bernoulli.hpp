#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "smirl/core/types.hpp"

namespace smirl::density {

/// Product of independent Bernoullis over binary observations with Laplace
/// smoothing: theta_i = (counts_i + alpha) / (n + 2 alpha).
///
/// alpha > 0 keeps every theta_i strictly inside (0, 1) so log_prob is always
/// finite. alpha = 0 is accepted and yields the raw sample mean, whose log
/// probability is -inf for any cell that has been constant so far.
class BernoulliModel {
 public:
  explicit BernoulliModel(std::size_t dim, double alpha = 1.0) : counts_(dim, 0.0), alpha_(alpha) {
    require(dim >= 1, "BernoulliModel: dim must be >= 1");
    require(alpha >= 0.0 && std::isfinite(alpha), "BernoulliModel: alpha must be finite and >= 0");
  }

  std::size_t dim() const { return counts_.size(); }
  double alpha() const { return alpha_; }
  double count() const { return n_; }
  const std::vector<double>& counts() const { return counts_; }

  void fit_reset(std::span<const std::vector<double>> init_states) {
    std::fill(counts_.begin(), counts_.end(), 0.0);
    n_ = 0.0;
    for (const auto& s : init_states) update(s);
  }

  void update(std::span<const double> s) {
    check(s, "BernoulliModel::update");
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += s[i];
    n_ += 1.0;
  }

  double theta(std::size_t i) const { return (counts_[i] + alpha_) / (n_ + 2.0 * alpha_); }

  double log_prob(std::span<const double> s) const {
    check(s, "BernoulliModel::log_prob");
    double lp = 0.0;
    const double denom = n_ + 2.0 * alpha_;
    for (std::size_t i = 0; i < counts_.size(); ++i) {
      const double on = counts_[i] + alpha_;
      const double off = denom - on;
      lp += s[i] != 0.0 ? std::log(on / denom) : std::log(off / denom);
    }
    return lp;
  }

  /// theta_i per dimension.
  std::vector<double> theta_features() const {
    std::vector<double> f(counts_.size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = theta(i);
    return f;
  }

  static std::size_t feature_dim(std::size_t obs_dim) { return obs_dim; }

 private:
  void check(std::span<const double> s, const char* where) const {
    require_dim(s.size(), counts_.size(), where);
    for (double v : s) {
      if (v != 0.0 && v != 1.0) throw ContractError(std::string(where) + ": observation is not binary");
    }
  }

  std::vector<double> counts_;
  double n_ = 0.0;
  double alpha_;
};

}  // namespace smirl::density
