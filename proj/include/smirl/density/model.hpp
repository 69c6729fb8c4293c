#pragma once

#include <span>
#include <string>
#include <variant>
#include <vector>

#include "smirl/density/bernoulli.hpp"
#include "smirl/density/gaussian.hpp"
#include "smirl/density/latent_gaussian.hpp"

namespace smirl::density {

enum class DensityKind { bernoulli, gaussian, latent };

inline std::string to_string(DensityKind k) {
  switch (k) {
    case DensityKind::bernoulli: return "bernoulli";
    case DensityKind::gaussian: return "gaussian";
    case DensityKind::latent: return "latent";
  }
  return "?";
}

inline DensityKind parse_density_kind(const std::string& s) {
  if (s == "bernoulli") return DensityKind::bernoulli;
  if (s == "gaussian") return DensityKind::gaussian;
  if (s == "latent") return DensityKind::latent;
  throw ContractError("unknown density kind '" + s + "'");
}

/// Everything needed to build a fresh per-episode model.
struct DensitySpec {
  DensityKind kind = DensityKind::bernoulli;
  double alpha = 1.0;       // Bernoulli Laplace pseudo-count
  double sigma_min = 0.01;  // Gaussian / latent std floor
  std::size_t latent_dim = 0;
  Encoder encoder;          // latent only; frozen for the episode
};

using DensityModel = std::variant<BernoulliModel, GaussianModel, LatentGaussianModel>;

inline DensityModel make_model(const DensitySpec& spec, std::size_t obs_dim) {
  switch (spec.kind) {
    case DensityKind::bernoulli: return BernoulliModel(obs_dim, spec.alpha);
    case DensityKind::gaussian: return GaussianModel(obs_dim, spec.sigma_min);
    case DensityKind::latent:
      require(spec.latent_dim >= 1, "latent density needs latent_dim >= 1");
      return LatentGaussianModel(spec.encoder, obs_dim, spec.latent_dim, spec.sigma_min);
  }
  throw ContractError("make_model: bad kind");
}

/// Length of theta_features for this spec.
inline std::size_t feature_dim(const DensitySpec& spec, std::size_t obs_dim) {
  switch (spec.kind) {
    case DensityKind::bernoulli: return BernoulliModel::feature_dim(obs_dim);
    case DensityKind::gaussian: return GaussianModel::feature_dim(obs_dim);
    case DensityKind::latent: return GaussianModel::feature_dim(spec.latent_dim);
  }
  return 0;
}

inline void fit_reset(DensityModel& m, std::span<const std::vector<double>> init_states) {
  std::visit([&](auto& model) { model.fit_reset(init_states); }, m);
}

inline void update(DensityModel& m, std::span<const double> s) {
  std::visit([&](auto& model) { model.update(s); }, m);
}

inline double log_prob(const DensityModel& m, std::span<const double> s) {
  return std::visit([&](const auto& model) { return model.log_prob(s); }, m);
}

inline std::vector<double> theta_features(const DensityModel& m) {
  return std::visit([](const auto& model) { return model.theta_features(); }, m);
}

inline std::size_t sample_count(const DensityModel& m) {
  return std::visit([](const auto& model) { return static_cast<std::size_t>(model.count()); }, m);
}

}  // namespace smirl::density
