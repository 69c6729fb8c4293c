#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "smirl/density/model.hpp"
#include "smirl/training/episode.hpp"

namespace smirl::training {

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  require_dim(a.size(), b.size(), "max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    if (std::isnan(d)) return INFINITY;
    m = std::max(m, d);
  }
  return m;
}

/// D_t rebuilt from the log: imitation states, then s_0..s_t.
inline std::vector<Observation> history_prefix(const Trajectory& traj, const std::vector<Observation>& imitation,
                                               std::size_t t) {
  std::vector<Observation> d = imitation;
  d.insert(d.end(), traj.observations.begin(), traj.observations.begin() + static_cast<std::ptrdiff_t>(t + 1));
  return d;
}

/// Largest deviation between each logged r_smirl[t] and log p(s_{t+1}) under a
/// model batch-fitted from scratch on the logged D_t.
inline double reward_audit(const Trajectory& traj, const density::DensitySpec& spec,
                           const std::vector<Observation>& imitation) {
  const std::size_t dim = traj.observations.front().size();
  double worst = 0.0;
  for (std::size_t t = 0; t < traj.length(); ++t) {
    density::DensityModel m = density::make_model(spec, dim);
    density::fit_reset(m, history_prefix(traj, imitation, t));
    const double r = density::log_prob(m, traj.observations[t + 1]);
    worst = std::max(worst, std::abs(r - traj.r_smirl[t]));
    worst = std::max(worst, max_abs_diff(density::theta_features(m), traj.thetas[t]));
  }
  return worst;
}

/// theta_{t+1} computed from (theta_t, |D_t|, s_{t+1}) alone, when the model
/// family allows it: Bernoulli always; Gaussian while no sigma floor is active.
inline std::optional<std::vector<double>> successor_theta(const density::DensitySpec& spec,
                                                          const std::vector<double>& theta, std::size_t n,
                                                          const Observation& next) {
  const auto nn = static_cast<double>(n);
  std::vector<double> out(theta.size());
  switch (spec.kind) {
    case density::DensityKind::bernoulli: {
      const double a = spec.alpha;
      for (std::size_t i = 0; i < theta.size(); ++i) out[i] = (theta[i] * (nn + 2 * a) + next[i]) / (nn + 1 + 2 * a);
      return out;
    }
    case density::DensityKind::gaussian:
    case density::DensityKind::latent: {
      std::vector<double> z = next;
      if (spec.kind == density::DensityKind::latent) z = spec.encoder(next);
      for (std::size_t i = 0; i < z.size(); ++i) {
        const double mu = theta[2 * i];
        const double sigma = theta[2 * i + 1];
        if (sigma <= spec.sigma_min) return std::nullopt;
        const double d = z[i] - mu;
        const double var = (nn * sigma * sigma + nn * d * d / (nn + 1)) / (nn + 1);
        out[2 * i] = mu + d / (nn + 1);
        out[2 * i + 1] = std::max(spec.sigma_min, std::sqrt(var));
      }
      return out;
    }
  }
  return std::nullopt;
}

struct ThetaAuditResult {
  double max_replay_error = 0.0;     // logged theta_{t+1} vs U(D_t) followed by one update
  double max_successor_error = 0.0;  // logged theta_{t+1} vs successor_theta(theta_t, ...)
  std::size_t successor_checks = 0;
};

/// The successor belief is a deterministic function of the logged quantities.
inline ThetaAuditResult theta_audit(const Trajectory& traj, const density::DensitySpec& spec,
                                    const std::vector<Observation>& imitation) {
  ThetaAuditResult res;
  const std::size_t dim = traj.observations.front().size();
  for (std::size_t t = 0; t < traj.length(); ++t) {
    density::DensityModel m = density::make_model(spec, dim);
    density::fit_reset(m, history_prefix(traj, imitation, t));
    density::update(m, traj.observations[t + 1]);
    res.max_replay_error = std::max(res.max_replay_error, max_abs_diff(density::theta_features(m), traj.thetas[t + 1]));
    const std::size_t n = imitation.size() + t + 1;
    if (auto next = successor_theta(spec, traj.thetas[t], n, traj.observations[t + 1])) {
      res.max_successor_error = std::max(res.max_successor_error, max_abs_diff(*next, traj.thetas[t + 1]));
      ++res.successor_checks;
    }
  }
  return res;
}

/// theta_0 depends only on the imitation states and s_0 of this episode.
inline double isolation_audit(const Trajectory& traj, const density::DensitySpec& spec,
                              const std::vector<Observation>& imitation) {
  density::DensityModel m = density::make_model(spec, traj.observations.front().size());
  density::fit_reset(m, history_prefix(traj, imitation, 0));
  return max_abs_diff(density::theta_features(m), traj.thetas.front());
}

}  // namespace smirl::training
