// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "uqc/nn/matrix.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

// Floor applied before taking the log of any probability.
inline constexpr double kLogFloor = 1e-12;

struct LossAndGrad {
  double loss = 0.0;
  // Gradient of the batch-mean loss wrt the logits that produced `probs`.
  Matrix grad_logits;
};

// Mean of -log p[y] over the batch. `probs` are softmax outputs; the returned
// gradient is (probs - onehot(y)) / batch.
LossAndGrad cross_entropy_loss(const Matrix& probs, std::span<const int> labels);

// Standard-normal draws for the sampled-logit loss: row i holds
// S_logit consecutive pairs (eps_s0, eps_s1).
class LogitNoise {
 public:
  LogitNoise() = default;
  LogitNoise(std::size_t instances, std::size_t samples, RngStream& rng);

  std::size_t instances() const { return static_cast<std::size_t>(draws_.rows()); }
  std::size_t samples() const { return samples_; }
  double at(std::size_t instance, std::size_t sample, std::size_t cls) const {
    return draws_(static_cast<Eigen::Index>(instance),
                  static_cast<Eigen::Index>(sample * kNumClasses + cls));
  }

 private:
  Matrix draws_;
  std::size_t samples_ = 0;
};

struct HeteroLossAndGrad {
  double loss = 0.0;
  Matrix grad_mu;
  Matrix grad_sigma;
};

// Sampled-logit negative log likelihood for dual-head (mu, sigma) outputs:
// per instance, z_s = mu + sigma * eps_s and
//   loss_i = -log( (1/S) sum_s softmax(z_s)[y] )
// evaluated with log-sum-exp and averaged over the batch. Gradients flow
// through the reparameterized samples with `noise` held fixed.
HeteroLossAndGrad stochastic_nll_loss(const Matrix& mu, const Matrix& sigma,
                                      std::span<const int> labels, const LogitNoise& noise);

// Draws fresh noise with S_logit samples per instance from `rng`.
HeteroLossAndGrad stochastic_nll_loss(const Matrix& mu, const Matrix& sigma,
                                      std::span<const int> labels, std::size_t s_logit,
                                      RngStream& rng);

}  // namespace uqc
