#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "smirl/core/random.hpp"
#include "smirl/density/model.hpp"

using namespace smirl;
using namespace smirl::density;

namespace {

std::vector<Observation> random_binary(Rng& rng, std::size_t n, std::size_t dim) {
  std::vector<Observation> out(n, Observation(dim));
  for (auto& s : out) {
    for (auto& v : s) v = static_cast<double>(uniform_index(rng, 2));
  }
  return out;
}

std::vector<Observation> random_real(Rng& rng, std::size_t n, std::size_t dim, double scale) {
  std::normal_distribution<double> g(0.0, scale);
  std::vector<Observation> out(n, Observation(dim));
  for (auto& s : out) {
    for (auto& v : s) v = g(rng);
  }
  return out;
}

// Two-pass population statistics, kept separate from the streaming code under test.
void two_pass(const std::vector<Observation>& data, std::size_t i, double& mu, double& var) {
  mu = 0.0;
  for (const auto& d : data) mu += d[i];
  mu /= static_cast<double>(data.size());
  var = 0.0;
  for (const auto& d : data) var += (d[i] - mu) * (d[i] - mu);
  var /= static_cast<double>(data.size());
}

}  // namespace

TEST(Bernoulli, FitSingleStateGivesLaplaceTheta) {
  BernoulliModel m(2, 1.0);
  m.fit_reset(std::vector<Observation>{{1.0, 0.0}});
  EXPECT_NEAR(m.theta(0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(m.theta(1), 1.0 / 3.0, 1e-15);
  const auto f = m.theta_features();
  ASSERT_EQ(f.size(), 2u);
  EXPECT_NEAR(f[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(f[1], 1.0 / 3.0, 1e-15);
}

TEST(Bernoulli, AllZeroStateGivesOneThird) {
  BernoulliModel m(7, 1.0);
  m.fit_reset(std::vector<Observation>{Observation(7, 0.0)});
  for (double t : m.theta_features()) EXPECT_NEAR(t, 1.0 / 3.0, 1e-15);
}

TEST(Bernoulli, UpdateCounts) {
  BernoulliModel m(2, 1.0);
  m.fit_reset(std::vector<Observation>{{1.0, 0.0}});
  m.update(Observation{1.0, 1.0});
  EXPECT_EQ(m.counts()[0], 2.0);
  EXPECT_EQ(m.counts()[1], 1.0);
  EXPECT_EQ(m.count(), 2.0);
}

TEST(Bernoulli, LogProbHandValues) {
  BernoulliModel half(2, 1.0);
  half.fit_reset(std::vector<Observation>{{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_NEAR(half.log_prob(Observation{1.0, 0.0}), 2.0 * std::log(0.5), 1e-12);
  EXPECT_NEAR(half.log_prob(Observation{1.0, 0.0}), -1.386294361, 1e-9);

  BernoulliModel m(2, 1.0);
  m.fit_reset(std::vector<Observation>{{1.0, 0.0}});
  EXPECT_NEAR(m.log_prob(Observation{1.0, 0.0}), 2.0 * std::log(2.0 / 3.0), 1e-12);
  EXPECT_NEAR(m.log_prob(Observation{1.0, 0.0}), -0.810930216, 1e-9);
}

TEST(Bernoulli, NormalizesOverAllBinaryStates) {
  Rng rng(3);
  for (std::size_t k = 1; k <= 10; ++k) {
    BernoulliModel m(k, k % 2 == 0 ? 1.0 : 0.5);
    m.fit_reset(random_binary(rng, 1 + k, k));
    double total = 0.0;
    Observation s(k);
    for (std::size_t code = 0; code < (std::size_t{1} << k); ++code) {
      for (std::size_t i = 0; i < k; ++i) s[i] = static_cast<double>((code >> i) & 1u);
      total += std::exp(m.log_prob(s));
    }
    EXPECT_NEAR(total, 1.0, 1e-12) << "k=" << k;
  }
}

TEST(Bernoulli, RepeatedStateBecomesMoreLikely) {
  Rng rng(4);
  BernoulliModel m(12, 1.0);
  m.fit_reset(random_binary(rng, 3, 12));
  const Observation s = random_binary(rng, 1, 12).front();
  double prev = m.log_prob(s);
  for (int i = 0; i < 200; ++i) {
    m.update(s);
    const double now = m.log_prob(s);
    EXPECT_GT(now, prev) << "step " << i;
    prev = now;
  }
}

TEST(Bernoulli, ThetaStaysInsideUnitInterval) {
  BernoulliModel m(3, 1.0);
  m.fit_reset(std::vector<Observation>{{1.0, 1.0, 0.0}});
  for (int i = 0; i < 10000; ++i) m.update(Observation{1.0, 1.0, 0.0});
  for (double t : m.theta_features()) {
    EXPECT_GT(t, 0.0);
    EXPECT_LT(t, 1.0);
  }
  EXPECT_TRUE(std::isfinite(m.log_prob(Observation{0.0, 0.0, 1.0})));
}

TEST(Bernoulli, ZeroPseudoCountReproducesLogZero) {
  BernoulliModel m(2, 0.0);
  m.fit_reset(std::vector<Observation>{{1.0, 0.0}});
  EXPECT_EQ(m.log_prob(Observation{0.0, 0.0}), -INFINITY);
}

TEST(Bernoulli, RejectsBadInput) {
  BernoulliModel m(2, 1.0);
  EXPECT_THROW(m.update(Observation{1.0}), ContractError);
  EXPECT_THROW(m.update(Observation{0.5, 1.0}), ContractError);
  EXPECT_THROW(BernoulliModel(0), ContractError);
  EXPECT_THROW(BernoulliModel(2, -1.0), ContractError);
}

TEST(Gaussian, FitTwoPoints) {
  GaussianModel m(1);
  m.fit_reset(std::vector<Observation>{{0.0}, {2.0}});
  EXPECT_DOUBLE_EQ(m.mean(0), 1.0);
  EXPECT_DOUBLE_EQ(m.sigma(0), 1.0);
  const auto f = m.theta_features();
  ASSERT_EQ(f.size(), 2u);
  EXPECT_DOUBLE_EQ(f[0], 1.0);
  EXPECT_DOUBLE_EQ(f[1], 1.0);
}

TEST(Gaussian, UpdateThirdPoint) {
  GaussianModel m(1);
  m.fit_reset(std::vector<Observation>{{0.0}, {2.0}});
  m.update(Observation{4.0});
  EXPECT_NEAR(m.mean(0), 2.0, 1e-15);
  EXPECT_NEAR(m.sigma(0), std::sqrt(8.0 / 3.0), 1e-15);
}

TEST(Gaussian, ZeroResidualUnitSigmaIsZero) {
  GaussianModel m(3);
  m.fit_reset(std::vector<Observation>{{-1.0, 0.0, 5.0}, {1.0, 2.0, 7.0}});
  EXPECT_NEAR(m.log_prob(Observation{0.0, 1.0, 6.0}), 0.0, 1e-15);
}

TEST(Gaussian, LogProbHandValue) {
  // mu = 1, sigma = 1 from {0, 2}; s = 3: -(log 1 + 4/2) = -2.
  GaussianModel m(1);
  m.fit_reset(std::vector<Observation>{{0.0}, {2.0}});
  EXPECT_NEAR(m.log_prob(Observation{3.0}), -2.0, 1e-15);
}

TEST(Gaussian, FloorKeepsDegenerateHistoryFinite) {
  GaussianModel m(2, 0.01);
  m.fit_reset(std::vector<Observation>{{3.0, -1.0}});
  EXPECT_EQ(m.sigma(0), 0.01);
  EXPECT_NEAR(m.log_prob(Observation{3.0, -1.0}), -2.0 * std::log(0.01), 1e-12);
  EXPECT_TRUE(std::isfinite(m.log_prob(Observation{1e150, -1e150})));
  for (int i = 0; i < 100; ++i) m.update(Observation{3.0, -1.0});
  EXPECT_EQ(m.sigma(1), 0.01);
}

TEST(Gaussian, EmptyInitRejected) {
  GaussianModel m(2);
  EXPECT_THROW(m.fit_reset(std::vector<Observation>{}), ContractError);
  EXPECT_THROW(GaussianModel(2, 0.0), ContractError);
}

TEST(Gaussian, StreamingMatchesTwoPassOnShiftedData) {
  // Large offset with small spread: naive sum-of-squares loses all precision here.
  Rng rng(5);
  auto data = random_real(rng, 500, 3, 1e-3);
  for (auto& s : data) {
    for (auto& v : s) v += 1e6;
  }
  GaussianModel m(3, 1e-12);
  m.fit_reset(std::span(data.data(), 1));
  for (std::size_t t = 1; t < data.size(); ++t) m.update(data[t]);
  for (std::size_t i = 0; i < 3; ++i) {
    double mu = 0.0, var = 0.0;
    two_pass(data, i, mu, var);
    EXPECT_NEAR(m.mean(i), mu, 1e-9);
    EXPECT_NEAR(m.sigma(i), std::sqrt(var), 1e-9);
  }
}

TEST(Density, IncrementalEqualsBatchOnRandomSequences) {
  Rng rng(6);
  double worst = 0.0;
  for (int seq = 0; seq < 1000; ++seq) {
    const std::size_t dim = 1 + uniform_index(rng, 40);
    const std::size_t len = 1 + uniform_index(rng, 64);
    const bool binary = seq % 2 == 0;
    const auto data = binary ? random_binary(rng, len, dim) : random_real(rng, len, dim, 3.0);
    DensitySpec spec;
    spec.kind = binary ? DensityKind::bernoulli : DensityKind::gaussian;
    DensityModel inc = make_model(spec, dim);
    fit_reset(inc, std::span(data.data(), 1));
    for (std::size_t t = 1; t < len; ++t) update(inc, data[t]);
    DensityModel batch = make_model(spec, dim);
    fit_reset(batch, data);
    const auto a = theta_features(inc);
    const auto b = theta_features(batch);
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    worst = std::max(worst, std::abs(log_prob(inc, data.back()) - log_prob(batch, data.back())));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(Latent, IdentityEncoderMatchesGaussian) {
  Rng rng(7);
  const auto data = random_real(rng, 30, 1, 2.0);
  LatentGaussianModel lat([](std::span<const double> s) { return std::vector<double>(s.begin(), s.end()); }, 1, 1);
  GaussianModel g(1);
  lat.fit_reset(std::span(data.data(), 1));
  g.fit_reset(std::span(data.data(), 1));
  for (std::size_t t = 1; t < data.size(); ++t) {
    EXPECT_EQ(lat.log_prob(data[t]), g.log_prob(data[t]));
    lat.update(data[t]);
    g.update(data[t]);
    EXPECT_EQ(lat.theta_features(), g.theta_features());
  }
}

TEST(Latent, StoresEncodedMeansAndMatchesBruteForce) {
  Rng rng(8);
  // Fixed nonlinear encoder R^4 -> R^3.
  const Encoder enc = [](std::span<const double> s) {
    return std::vector<double>{std::tanh(s[0] + s[1]), s[2] * s[3], 0.5 * s[0] - s[3]};
  };
  const auto data = random_real(rng, 25, 4, 1.0);
  LatentGaussianModel m(enc, 4, 3);
  m.fit_reset(std::span(data.data(), 2));
  for (std::size_t t = 2; t < data.size(); ++t) m.update(data[t]);
  ASSERT_EQ(m.latents().size(), data.size());
  std::vector<Observation> zs;
  for (const auto& s : data) zs.push_back(enc(s));
  for (std::size_t i = 0; i < 3; ++i) {
    double mu = 0.0, var = 0.0;
    two_pass(zs, i, mu, var);
    EXPECT_NEAR(m.theta_features()[2 * i], mu, 1e-12);
    EXPECT_NEAR(m.theta_features()[2 * i + 1], std::max(0.01, std::sqrt(var)), 1e-12);
  }
  EXPECT_EQ(m.theta_features().size(), 6u);
}

TEST(Latent, EncoderOutputDimensionChecked) {
  LatentGaussianModel m([](std::span<const double>) { return std::vector<double>{1.0, 2.0}; }, 2, 3);
  EXPECT_THROW(m.fit_reset(std::vector<Observation>{{0.0, 0.0}}), ContractError);
}

TEST(Density, FeatureDimensions) {
  DensitySpec b;
  EXPECT_EQ(feature_dim(b, 42), 42u);
  DensitySpec g;
  g.kind = DensityKind::gaussian;
  EXPECT_EQ(feature_dim(g, 2), 4u);
  DensitySpec l;
  l.kind = DensityKind::latent;
  l.latent_dim = 3;
  EXPECT_EQ(feature_dim(l, 42), 6u);
}
