// SPDX-License-Identifier: Apache-2.0

#include "uqc/uq/uq.hpp"

#include <cmath>
#include <string>

#include "uqc/errors.hpp"
#include "uqc/nn/layers.hpp"

namespace uqc {

namespace {

void require_samples(std::size_t n, const char* what) {
  if (n == 0) throw ArgumentError(std::string(what) + ": need at least one sample");
}

double plogp(double p) { return p > 0.0 ? p * std::log(p) : 0.0; }

Distribution sampled_mean_softmax(const Distribution& center, const Distribution& scale,
                                  std::size_t s_logit, RngStream& rng) {
  if (s_logit == 0) throw ArgumentError("S_logit must be >= 1");
  double acc1 = 0.0;
  for (std::size_t s = 0; s < s_logit; ++s) {
    const double z0 = center[0] + scale[0] * rng.normal();
    const double z1 = center[1] + scale[1] * rng.normal();
    acc1 += softmax(Distribution{z0, z1})[1];
  }
  const double p1 = acc1 / static_cast<double>(s_logit);
  return {1.0 - p1, p1};
}

struct LogitMoments {
  Distribution mu_bar{};
  Distribution sigma_rms{};
  Distribution mu_std{};
};

LogitMoments logit_moments(std::span<const Distribution> mu, std::span<const Distribution> sigma) {
  if (mu.size() != sigma.size()) throw ArgumentError("hetero_decompose: mu and sigma counts differ");
  require_samples(mu.size(), "hetero_decompose");
  const auto t = static_cast<double>(mu.size());
  LogitMoments m;
  for (std::size_t c = 0; c < kNumClasses; ++c) {
    double sum_mu = 0.0;
    double sum_s2 = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      if (!(sigma[k][c] > 0.0)) throw DomainError("hetero_decompose: sigma must be positive");
      sum_mu += mu[k][c];
      sum_s2 += sigma[k][c] * sigma[k][c];
    }
    m.mu_bar[c] = sum_mu / t;
    m.sigma_rms[c] = std::sqrt(sum_s2 / t);
    double var = 0.0;
    for (std::size_t k = 0; k < mu.size(); ++k) {
      const double d = mu[k][c] - m.mu_bar[c];
      var += d * d;
    }
    m.mu_std[c] = std::sqrt(var / t);
  }
  return m;
}

}  // namespace

Distribution mean_predictive(std::span<const Distribution> samples) {
  require_samples(samples.size(), "mean_predictive");
  Distribution sum{0.0, 0.0};
  for (const Distribution& p : samples) {
    sum[0] += p[0];
    sum[1] += p[1];
  }
  const auto t = static_cast<double>(samples.size());
  return {sum[0] / t, sum[1] / t};
}

double predictive_entropy(const Distribution& p) { return -(plogp(p[0]) + plogp(p[1])); }

double expected_entropy(std::span<const Distribution> samples) {
  require_samples(samples.size(), "expected_entropy");
  double sum = 0.0;
  for (const Distribution& p : samples) sum += predictive_entropy(p);
  return sum / static_cast<double>(samples.size());
}

double mutual_information(std::span<const Distribution> samples) {
  require_samples(samples.size(), "mutual_information");
  const double mi = predictive_entropy(mean_predictive(samples)) - expected_entropy(samples);
  return (mi < 0.0 && mi >= -1e-9) ? 0.0 : mi;
}

VarianceDecomposition total_variance_decompose(std::span<const Distribution> samples) {
  require_samples(samples.size(), "total_variance_decompose");
  const auto t = static_cast<double>(samples.size());
  double mean = 0.0;
  double aleatoric = 0.0;
  for (const Distribution& p : samples) {
    mean += p[1];
    aleatoric += p[1] * (1.0 - p[1]);
  }
  mean /= t;
  aleatoric /= t;
  double epistemic = 0.0;
  for (const Distribution& p : samples) epistemic += (p[1] - mean) * (p[1] - mean);
  epistemic /= t;
  return {aleatoric + epistemic, epistemic, aleatoric};
}

AleatoricOnly hetero_aleatoric(std::span<const Distribution> mu, std::span<const Distribution> sigma,
                               std::size_t s_logit, RngStream& rng) {
  const LogitMoments m = logit_moments(mu, sigma);
  AleatoricOnly out;
  out.p_ale = sampled_mean_softmax(m.mu_bar, m.sigma_rms, s_logit, rng);
  out.h_ale = predictive_entropy(out.p_ale);
  return out;
}

HeteroDecomposition hetero_decompose(std::span<const Distribution> mu,
                                     std::span<const Distribution> sigma, std::size_t s_logit,
                                     RngStream& rng) {
  if (mu.size() < 2) {
    throw ArgumentError("hetero_decompose: the epistemic branch needs T >= 2 weight samples");
  }
  const LogitMoments m = logit_moments(mu, sigma);
  HeteroDecomposition out;
  out.p_ale = sampled_mean_softmax(m.mu_bar, m.sigma_rms, s_logit, rng);
  out.p_epi = sampled_mean_softmax(m.mu_bar, m.mu_std, s_logit, rng);
  out.h_ale = predictive_entropy(out.p_ale);
  out.h_epi = predictive_entropy(out.p_epi);
  return out;
}

UqSummary summarize(std::span<const Distribution> samples) {
  UqSummary s;
  s.p_bar = mean_predictive(samples);
  s.h_total = predictive_entropy(s.p_bar);
  s.h_expected = expected_entropy(samples);
  s.mutual_info = mutual_information(samples);
  const VarianceDecomposition v = total_variance_decompose(samples);
  s.var_total = v.total;
  s.var_epistemic = v.epistemic;
  s.var_aleatoric = v.aleatoric;
  return s;
}

}  // namespace uqc
