// SPDX-License-Identifier: Apache-2.0

#include "uqc/nn/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "uqc/errors.hpp"

namespace uqc {

namespace {

void check_labels(std::span<const int> labels, Eigen::Index rows, std::string_view what) {
  if (static_cast<Eigen::Index>(labels.size()) != rows) {
    throw DimensionError(std::string(what) + ": " + std::to_string(labels.size()) +
                         " labels for " + std::to_string(rows) + " rows");
  }
  for (int y : labels) {
    if (y < 0 || y >= static_cast<int>(kNumClasses)) {
      throw DomainError(std::string(what) + ": label out of range: " + std::to_string(y));
    }
  }
}

}  // namespace

LossAndGrad cross_entropy_loss(const Matrix& probs, std::span<const int> labels) {
  if (probs.cols() != static_cast<Eigen::Index>(kNumClasses)) {
    throw DimensionError("cross_entropy_loss: expected two class columns");
  }
  check_labels(labels, probs.rows(), "cross_entropy_loss");
  if (probs.rows() == 0) throw DimensionError("cross_entropy_loss: empty batch");

  const auto batch = static_cast<double>(probs.rows());
  LossAndGrad out;
  out.grad_logits = probs;
  double total = 0.0;
  for (Eigen::Index i = 0; i < probs.rows(); ++i) {
    const int y = labels[static_cast<std::size_t>(i)];
    total -= std::log(std::max(probs(i, y), kLogFloor));
    out.grad_logits(i, y) -= 1.0;
  }
  out.grad_logits /= batch;
  out.loss = total / batch;
  return out;
}

LogitNoise::LogitNoise(std::size_t instances, std::size_t samples, RngStream& rng)
    : draws_(static_cast<Eigen::Index>(instances), static_cast<Eigen::Index>(samples * kNumClasses)),
      samples_(samples) {
  if (samples == 0) throw ArgumentError("LogitNoise: need at least one sample");
  for (Eigen::Index r = 0; r < draws_.rows(); ++r) {
    for (Eigen::Index c = 0; c < draws_.cols(); ++c) draws_(r, c) = rng.normal();
  }
}

HeteroLossAndGrad stochastic_nll_loss(const Matrix& mu, const Matrix& sigma,
                                      std::span<const int> labels, const LogitNoise& noise) {
  if (mu.cols() != static_cast<Eigen::Index>(kNumClasses)) {
    throw DimensionError("stochastic_nll_loss: expected two class columns");
  }
  require_shape(sigma, mu.rows(), mu.cols(), "stochastic_nll_loss sigma");
  check_labels(labels, mu.rows(), "stochastic_nll_loss");
  if (mu.rows() == 0) throw DimensionError("stochastic_nll_loss: empty batch");
  if (noise.instances() != static_cast<std::size_t>(mu.rows())) {
    throw DimensionError("stochastic_nll_loss: noise rows do not match batch");
  }
  if (!(sigma.array() > 0.0).all()) {
    throw DomainError("stochastic_nll_loss: sigma must be strictly positive");
  }

  const std::size_t s_count = noise.samples();
  const auto batch = static_cast<double>(mu.rows());
  const double log_s = std::log(static_cast<double>(s_count));
  const double log_floor = std::log(kLogFloor);

  HeteroLossAndGrad out;
  out.grad_mu = Matrix::Zero(mu.rows(), mu.cols());
  out.grad_sigma = Matrix::Zero(mu.rows(), mu.cols());

  std::vector<double> log_py(s_count);
  std::vector<Distribution> probs(s_count);
  double total = 0.0;
  for (Eigen::Index i = 0; i < mu.rows(); ++i) {
    const auto y = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
    const auto ui = static_cast<std::size_t>(i);
    double max_a = -INFINITY;
    for (std::size_t s = 0; s < s_count; ++s) {
      const double z0 = mu(i, 0) + sigma(i, 0) * noise.at(ui, s, 0);
      const double z1 = mu(i, 1) + sigma(i, 1) * noise.at(ui, s, 1);
      const double zmax = std::max(z0, z1);
      const double lse = zmax + std::log(std::exp(z0 - zmax) + std::exp(z1 - zmax));
      log_py[s] = (y == 0 ? z0 : z1) - lse;
      probs[s] = {std::exp(z0 - lse), std::exp(z1 - lse)};
      max_a = std::max(max_a, log_py[s]);
    }
    double sum_w = 0.0;
    for (std::size_t s = 0; s < s_count; ++s) sum_w += std::exp(log_py[s] - max_a);
    const double log_mean = max_a + std::log(sum_w) - log_s;
    if (log_mean < log_floor) {
      // Clamped region: constant loss, zero gradient.
      total -= log_floor;
      continue;
    }
    total -= log_mean;
    for (std::size_t s = 0; s < s_count; ++s) {
      const double w = std::exp(log_py[s] - max_a) / sum_w;
      for (std::size_t c = 0; c < kNumClasses; ++c) {
        const double onehot = c == y ? 1.0 : 0.0;
        const double g = -w * (onehot - probs[s][c]) / batch;
        const auto ci = static_cast<Eigen::Index>(c);
        out.grad_mu(i, ci) += g;
        out.grad_sigma(i, ci) += g * noise.at(ui, s, c);
      }
    }
  }
  out.loss = total / batch;
  return out;
}

HeteroLossAndGrad stochastic_nll_loss(const Matrix& mu, const Matrix& sigma,
                                      std::span<const int> labels, std::size_t s_logit,
                                      RngStream& rng) {
  if (s_logit == 0) throw ArgumentError("stochastic_nll_loss: S_logit must be >= 1");
  const LogitNoise noise(static_cast<std::size_t>(mu.rows()), s_logit, rng);
  return stochastic_nll_loss(mu, sigma, labels, noise);
}

}  // namespace uqc
