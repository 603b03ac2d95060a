// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "uqc/data/dataset.hpp"
#include "uqc/nn/adam.hpp"
#include "uqc/nn/layers.hpp"
#include "uqc/nn/losses.hpp"
#include "uqc/nn/matrix.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

enum class Head { Homoscedastic, Heteroscedastic };

std::string_view to_string(Head head);
// Accepts "homo"/"hetero" (and the long names).
Head parse_head(std::string_view text);

struct ModelConfig {
  std::size_t input_dim = 0;
  std::size_t hidden_layers = 3;
  std::size_t hidden_width = 300;
  double dropout = 0.1;
  Head head = Head::Heteroscedastic;
  AdamOptions adam;
  std::size_t max_epochs = 200;
  std::size_t patience = 5;
  std::size_t batch_size = 64;
  // Logit samples per instance for the heteroscedastic loss and predictions.
  std::size_t s_logit = 50;

  // Throws ConfigError.
  void validate() const;
};

// Raw head outputs for a batch. Homoscedastic models fill `logits`;
// heteroscedastic models fill `mu` (ReLU) and `sigma` (softplus).
struct HeadOutputs {
  Matrix logits;
  Matrix mu;
  Matrix sigma;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
};

// Hidden stack of (Linear -> ReLU -> Dropout) blocks followed by either one
// logit head or a (mu, sigma) head pair.
class MlpModel {
 public:
  MlpModel(const ModelConfig& config, std::uint64_t init_seed);

  const ModelConfig& config() const { return config_; }
  Head head() const { return config_.head; }
  std::uint64_t init_seed() const { return init_seed_; }

  bool trained() const { return trained_; }
  void mark_trained() { trained_ = true; }

  // Inference without touching any cache. Dropout masks are drawn from
  // `dropout_rng` when it is non-null and from nowhere (eval mode) otherwise.
  HeadOutputs infer(const Matrix& x, RngStream* dropout_rng) const;

  // Training-mode pass: caches activations and samples dropout masks.
  HeadOutputs forward_train(const Matrix& x, RngStream& rng);
  // Homoscedastic: pass the logit gradient and leave `grad_sigma` null.
  // Heteroscedastic: pass gradients wrt mu and sigma.
  void backward(const Matrix& grad_primary, const Matrix* grad_sigma);
  void zero_grad();
  void clear_caches();

  std::vector<Matrix*> parameters();
  std::vector<const Matrix*> parameters() const;
  std::vector<const Matrix*> gradients() const;

  std::vector<LinearLayer>& hidden() { return hidden_; }
  const std::vector<LinearLayer>& hidden() const { return hidden_; }
  // One entry (logits) or two (mu, sigma).
  std::vector<LinearLayer>& heads() { return heads_; }
  const std::vector<LinearLayer>& heads() const { return heads_; }

  const std::vector<EpochRecord>& history() const { return history_; }
  std::size_t selected_epoch() const { return selected_epoch_; }
  double best_val_loss() const { return best_val_loss_; }
  void set_training_record(std::vector<EpochRecord> history, std::size_t selected_epoch,
                           double best_val_loss);

 private:
  ModelConfig config_;
  std::uint64_t init_seed_;
  bool trained_ = false;

  std::vector<LinearLayer> hidden_;
  std::vector<DropoutLayer> dropouts_;
  std::vector<LinearLayer> heads_;
  std::vector<Matrix> hidden_pre_;
  Matrix mu_pre_;
  Matrix sigma_pre_;

  std::vector<EpochRecord> history_;
  std::size_t selected_epoch_ = 0;
  double best_val_loss_ = 0.0;
};

// Loss of `model` on (x, y) in eval mode. Heteroscedastic models need the
// frozen `noise` (one row per instance); homoscedastic ones ignore it.
double evaluation_loss(const MlpModel& model, const Matrix& x, std::span<const int> y,
                       const LogitNoise* noise);

// Adam with minibatches, early stopping on validation loss, and restoration
// of the best-validation checkpoint. Heteroscedastic validation uses noise
// drawn once per call so every epoch is scored against the same draws.
// Throws ConfigError on empty or mismatched splits and DivergenceError when
// a loss turns non-finite.
MlpModel train(MlpModel model, const Dataset& train_set, const Dataset& val_set, RngStream& rng);

}  // namespace uqc
