#pragma once

#include <cmath>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "smirl/core/types.hpp"
#include "smirl/nn/adam.hpp"
#include "smirl/nn/network.hpp"

namespace smirl::nn {

enum class Reconstruction { gaussian, bernoulli };

inline std::string to_string(Reconstruction r) { return r == Reconstruction::gaussian ? "gaussian" : "bernoulli"; }
inline Reconstruction parse_reconstruction(const std::string& s) {
  if (s == "gaussian") return Reconstruction::gaussian;
  if (s == "bernoulli") return Reconstruction::bernoulli;
  throw ContractError("unknown reconstruction loss '" + s + "'");
}

struct VaeConfig {
  std::size_t obs_dim = 1;
  std::size_t latent_dim = 8;
  std::vector<std::size_t> hidden = {64};
  Activation activation = Activation::relu;
  double beta = 1.0;  // KL coefficient
  Reconstruction reconstruction = Reconstruction::gaussian;
};

/// KL(N(mu, exp(logvar)) || N(0, I)) = 1/2 sum(mu^2 + sigma^2 - 1 - log sigma^2).
inline double kl_standard_normal(std::span<const double> mu, std::span<const double> logvar) {
  require_dim(logvar.size(), mu.size(), "kl_standard_normal");
  double kl = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) kl += 0.5 * (mu[i] * mu[i] + std::exp(logvar[i]) - 1.0 - logvar[i]);
  return kl;
}

/// Encoder emits [mean | log-variance] of q(z|s); decoder maps z back to
/// observation space (means for the Gaussian loss, logits for Bernoulli).
class Vae {
 public:
  struct Loss {
    double total = 0.0;
    double reconstruction = 0.0;
    double kl = 0.0;
  };

  Vae(VaeConfig cfg, Rng& rng) : cfg_(std::move(cfg)) {
    require(cfg_.obs_dim >= 1 && cfg_.latent_dim >= 1, "Vae: dimensions must be >= 1");
    require(cfg_.beta > 0.0, "Vae: beta must be > 0");
    std::vector<std::size_t> enc{cfg_.obs_dim};
    enc.insert(enc.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    enc.push_back(2 * cfg_.latent_dim);
    std::vector<std::size_t> dec{cfg_.latent_dim};
    dec.insert(dec.end(), cfg_.hidden.rbegin(), cfg_.hidden.rend());
    dec.push_back(cfg_.obs_dim);
    encoder_ = Network(enc, cfg_.activation, Activation::linear, rng);
    decoder_ = Network(dec, cfg_.activation, Activation::linear, rng);
  }

  Vae(VaeConfig cfg, Network encoder, Network decoder)
      : cfg_(std::move(cfg)), encoder_(std::move(encoder)), decoder_(std::move(decoder)) {
    require(encoder_.input_dim() == cfg_.obs_dim && encoder_.output_dim() == 2 * cfg_.latent_dim,
            "Vae: encoder shape does not match config");
    require(decoder_.input_dim() == cfg_.latent_dim && decoder_.output_dim() == cfg_.obs_dim,
            "Vae: decoder shape does not match config");
  }

  const VaeConfig& config() const { return cfg_; }
  const Network& encoder() const { return encoder_; }
  const Network& decoder() const { return decoder_; }
  Network& encoder() { return encoder_; }
  Network& decoder() { return decoder_; }

  /// E[q(z|s)]: the mean head, no sampling.
  std::vector<double> encode_mean(std::span<const double> s) const {
    std::vector<double> out = encoder_.forward(s);
    out.resize(cfg_.latent_dim);
    return out;
  }

  std::vector<Matrix*> parameters() {
    std::vector<Matrix*> p = encoder_.parameters();
    for (auto* q : decoder_.parameters()) p.push_back(q);
    return p;
  }

  /// Batch-mean negative ELBO with one reparameterized sample per state.
  Loss loss(const std::vector<Observation>& batch, Rng& rng) const {
    Graph g;
    const Built b = build(g, batch, rng);
    return {g.scalar(b.total), g.scalar(b.recon), g.scalar(b.kl)};
  }

  /// Gradients of the batch loss w.r.t. parameters(), in the same order.
  std::vector<Matrix> gradients(const std::vector<Observation>& batch, Rng& rng, Loss* value = nullptr) const {
    Graph g;
    const Built b = build(g, batch, rng);
    if (value != nullptr) *value = {g.scalar(b.total), g.scalar(b.recon), g.scalar(b.kl)};
    g.backward(b.total);
    std::vector<Matrix> grads = Network::gradients(g, b.enc);
    for (auto& m : Network::gradients(g, b.dec)) grads.push_back(std::move(m));
    return grads;
  }

  /// One Adam step on the negative ELBO; returns the pre-step loss.
  Loss train_step(const std::vector<Observation>& batch, Adam& opt, Rng& rng) {
    Loss before;
    const std::vector<Matrix> grads = gradients(batch, rng, &before);
    if (!std::isfinite(before.total)) throw NonFiniteError("Vae::train_step: non-finite loss");
    std::vector<Matrix*> params = parameters();
    opt.step(params, grads);
    return before;
  }

 private:
  struct Built {
    Network::Bound enc;
    Network::Bound dec;
    Var total;
    Var recon;
    Var kl;
  };

  Built build(Graph& g, const std::vector<Observation>& batch, Rng& rng) const {
    require(!batch.empty(), "Vae: empty batch");
    const auto rows = static_cast<Eigen::Index>(batch.size());
    const auto obs = static_cast<Eigen::Index>(cfg_.obs_dim);
    const auto lat = static_cast<Eigen::Index>(cfg_.latent_dim);
    Matrix x(rows, obs);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const auto& s = batch[static_cast<std::size_t>(r)];
      require_dim(s.size(), cfg_.obs_dim, "Vae batch");
      std::copy(s.begin(), s.end(), x.row(r).data());
    }
    Matrix eps(rows, lat);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (Eigen::Index i = 0; i < eps.size(); ++i) eps.data()[i] = unit(rng);

    Built b;
    b.enc = encoder_.bind(g);
    b.dec = decoder_.bind(g);
    const Var xv = g.input(x);
    const Var h = encoder_.forward(g, b.enc, xv);
    const Var mu = g.slice_cols(h, 0, cfg_.latent_dim);
    const Var logvar = g.slice_cols(h, cfg_.latent_dim, cfg_.latent_dim);
    const Var z = g.add(mu, g.mul(g.exp(g.scale(logvar, 0.5)), g.input(eps)));
    const Var out = decoder_.forward(g, b.dec, z);

    Var recon_sum;
    if (cfg_.reconstruction == Reconstruction::gaussian) {
      recon_sum = g.scale(g.sum(g.square(g.sub(out, xv))), 0.5);
    } else {
      // Bernoulli NLL with logits l: softplus(l) - x l
      recon_sum = g.sub(g.sum(g.softplus(out)), g.sum(g.mul(xv, out)));
    }
    const Var kl_sum = g.add_scalar(g.scale(g.sum(g.sub(g.add(g.square(mu), g.exp(logvar)), logvar)), 0.5),
                                    -0.5 * static_cast<double>(rows * lat));
    const double inv = 1.0 / static_cast<double>(rows);
    b.recon = g.scale(recon_sum, inv);
    b.kl = g.scale(kl_sum, inv);
    b.total = g.add(b.recon, g.scale(b.kl, cfg_.beta));
    return b;
  }

  VaeConfig cfg_;
  Network encoder_;
  Network decoder_;
};

/// Snapshot of the current encoder as a density-model encoder (mean head only).
inline auto frozen_encoder(const Vae& vae) {
  auto net = std::make_shared<const Network>(vae.encoder());
  const std::size_t latent = vae.config().latent_dim;
  return [net, latent](std::span<const double> s) {
    std::vector<double> out = net->forward(s);
    out.resize(latent);
    return out;
  };
}

}  // namespace smirl::nn
