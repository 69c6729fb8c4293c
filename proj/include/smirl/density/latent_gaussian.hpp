#pragma once

#include <functional>
#include <span>
#include <vector>

#include "smirl/density/gaussian.hpp"

namespace smirl::density {

/// Maps an observation to the mean of q(z|s). Held fixed for a whole episode.
using Encoder = std::function<std::vector<double>(std::span<const double>)>;

/// Independent Gaussian over encoder means z_0..z_t of the episode's states:
///   mu = sum_j z_j / (t+1),  sigma^2 = sum_j (mu - z_j)^2 / (t+1),  theta = [mu, sigma]
/// with sigma floored at sigma_min.
class LatentGaussianModel {
 public:
  LatentGaussianModel(Encoder encoder, std::size_t obs_dim, std::size_t latent_dim, double sigma_min = 0.01)
      : encoder_(std::move(encoder)), obs_dim_(obs_dim), stats_(latent_dim, sigma_min) {
    require(static_cast<bool>(encoder_), "LatentGaussianModel: encoder is empty");
  }

  std::size_t dim() const { return obs_dim_; }
  std::size_t latent_dim() const { return stats_.dim(); }
  std::size_t count() const { return zs_.size(); }
  const std::vector<std::vector<double>>& latents() const { return zs_; }
  const GaussianModel& latent_stats() const { return stats_; }

  std::vector<double> encode(std::span<const double> s) const {
    require_dim(s.size(), obs_dim_, "LatentGaussianModel::encode");
    std::vector<double> z = encoder_(s);
    require_dim(z.size(), stats_.dim(), "LatentGaussianModel encoder output");
    return z;
  }

  void fit_reset(std::span<const std::vector<double>> init_states) {
    require(!init_states.empty(), "LatentGaussianModel::fit_reset: needs at least one state");
    zs_.clear();
    stats_ = GaussianModel(stats_.dim(), stats_.sigma_min());
    for (const auto& s : init_states) update(s);
  }

  void update(std::span<const double> s) {
    zs_.push_back(encode(s));
    stats_.update(zs_.back());
  }

  double log_prob(std::span<const double> s) const { return stats_.log_prob(encode(s)); }

  /// Interleaved [mu_0, sigma_0, ...] over latent dimensions.
  std::vector<double> theta_features() const { return stats_.theta_features(); }

 private:
  Encoder encoder_;
  std::size_t obs_dim_;
  GaussianModel stats_;
  std::vector<std::vector<double>> zs_;
};

}  // namespace smirl::density
