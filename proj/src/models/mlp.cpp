// SPDX-License-Identifier: Apache-2.0

#include "uqc/models/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <utility>

#include "uqc/errors.hpp"

namespace uqc {

std::string_view to_string(Head head) {
  return head == Head::Homoscedastic ? "homo" : "hetero";
}

Head parse_head(std::string_view text) {
  if (text == "homo" || text == "homoscedastic") return Head::Homoscedastic;
  if (text == "hetero" || text == "heteroscedastic") return Head::Heteroscedastic;
  throw ConfigError("unknown head '" + std::string(text) + "' (expected homo or hetero)");
}

void ModelConfig::validate() const {
  if (input_dim == 0) throw ConfigError("model: input_dim must be positive");
  if (hidden_layers == 0) throw ConfigError("model: need at least one hidden layer");
  if (hidden_width == 0) throw ConfigError("model: hidden_width must be >= 1");
  if (!(dropout >= 0.0 && dropout < 1.0)) throw ConfigError("model: dropout must lie in [0, 1)");
  if (patience == 0) throw ConfigError("model: patience must be >= 1");
  if (max_epochs == 0) throw ConfigError("model: max_epochs must be >= 1");
  if (batch_size == 0) throw ConfigError("model: batch_size must be >= 1");
  if (s_logit == 0) throw ConfigError("model: s_logit must be >= 1");
  if (!(adam.learning_rate > 0.0)) throw ConfigError("model: learning rate must be positive");
}

MlpModel::MlpModel(const ModelConfig& config, std::uint64_t init_seed)
    : config_(config), init_seed_(init_seed) {
  config_.validate();
  RngStream rng(init_seed);
  std::size_t in = config_.input_dim;
  for (std::size_t l = 0; l < config_.hidden_layers; ++l) {
    hidden_.emplace_back(in, config_.hidden_width);
    hidden_.back().init_glorot(rng);
    dropouts_.emplace_back(config_.dropout);
    in = config_.hidden_width;
  }
  const std::size_t n_heads = config_.head == Head::Homoscedastic ? 1 : 2;
  for (std::size_t h = 0; h < n_heads; ++h) {
    heads_.emplace_back(in, kNumClasses);
    heads_.back().init_glorot(rng);
  }
  hidden_pre_.resize(hidden_.size());
}

HeadOutputs MlpModel::infer(const Matrix& x, RngStream* dropout_rng) const {
  Matrix h = x;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    h = relu(hidden_[l].apply(h));
    if (dropout_rng != nullptr) h = dropouts_[l].apply(h, true, *dropout_rng);
  }
  HeadOutputs out;
  if (config_.head == Head::Homoscedastic) {
    out.logits = heads_[0].apply(h);
  } else {
    out.mu = relu(heads_[0].apply(h));
    out.sigma = softplus(heads_[1].apply(h));
  }
  return out;
}

HeadOutputs MlpModel::forward_train(const Matrix& x, RngStream& rng) {
  Matrix h = x;
  for (std::size_t l = 0; l < hidden_.size(); ++l) {
    hidden_pre_[l] = hidden_[l].forward(h, true);
    h = dropouts_[l].forward(relu(hidden_pre_[l]), true, rng);
  }
  HeadOutputs out;
  if (config_.head == Head::Homoscedastic) {
    out.logits = heads_[0].forward(h, true);
  } else {
    mu_pre_ = heads_[0].forward(h, true);
    sigma_pre_ = heads_[1].forward(h, true);
    out.mu = relu(mu_pre_);
    out.sigma = softplus(sigma_pre_);
  }
  return out;
}

void MlpModel::backward(const Matrix& grad_primary, const Matrix* grad_sigma) {
  Matrix grad;
  if (config_.head == Head::Homoscedastic) {
    grad = heads_[0].backward(grad_primary);
  } else {
    if (grad_sigma == nullptr) throw ArgumentError("heteroscedastic backward needs a sigma gradient");
    const Matrix grad_mu_pre = relu_backward(mu_pre_, grad_primary);
    const Matrix grad_sigma_pre =
        grad_sigma->cwiseProduct(sigma_pre_.unaryExpr([](double v) { return sigmoid(v); }));
    grad = heads_[0].backward(grad_mu_pre) + heads_[1].backward(grad_sigma_pre);
  }
  for (std::size_t l = hidden_.size(); l-- > 0;) {
    grad = dropouts_[l].backward(grad);
    grad = relu_backward(hidden_pre_[l], grad);
    grad = hidden_[l].backward(grad);
  }
}

void MlpModel::zero_grad() {
  for (auto& layer : hidden_) layer.zero_grad();
  for (auto& layer : heads_) layer.zero_grad();
}

void MlpModel::clear_caches() {
  for (auto& layer : hidden_) layer.clear_cache();
  for (auto& layer : heads_) layer.clear_cache();
  for (auto& d : dropouts_) d.clear_cache();
  for (auto& m : hidden_pre_) m.resize(0, 0);
  mu_pre_.resize(0, 0);
  sigma_pre_.resize(0, 0);
}

std::vector<Matrix*> MlpModel::parameters() {
  std::vector<Matrix*> out;
  for (auto& layer : hidden_) {
    out.push_back(&layer.weights());
    out.push_back(&layer.bias());
  }
  for (auto& layer : heads_) {
    out.push_back(&layer.weights());
    out.push_back(&layer.bias());
  }
  return out;
}

std::vector<const Matrix*> MlpModel::parameters() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : hidden_) {
    out.push_back(&layer.weights());
    out.push_back(&layer.bias());
  }
  for (const auto& layer : heads_) {
    out.push_back(&layer.weights());
    out.push_back(&layer.bias());
  }
  return out;
}

std::vector<const Matrix*> MlpModel::gradients() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : hidden_) {
    out.push_back(&layer.weight_grad());
    out.push_back(&layer.bias_grad());
  }
  for (const auto& layer : heads_) {
    out.push_back(&layer.weight_grad());
    out.push_back(&layer.bias_grad());
  }
  return out;
}

void MlpModel::set_training_record(std::vector<EpochRecord> history, std::size_t selected_epoch,
                                   double best_val_loss) {
  history_ = std::move(history);
  selected_epoch_ = selected_epoch;
  best_val_loss_ = best_val_loss;
}

double evaluation_loss(const MlpModel& model, const Matrix& x, std::span<const int> y,
                       const LogitNoise* noise) {
  const HeadOutputs out = model.infer(x, nullptr);
  if (model.head() == Head::Homoscedastic) {
    return cross_entropy_loss(softmax(out.logits), y).loss;
  }
  if (noise == nullptr) throw ArgumentError("heteroscedastic evaluation loss needs frozen noise");
  return stochastic_nll_loss(out.mu, out.sigma, y, *noise).loss;
}

namespace {

Matrix gather_rows(const Matrix& x, std::span<const std::size_t> rows) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out.row(static_cast<Eigen::Index>(k)) = x.row(static_cast<Eigen::Index>(rows[k]));
  }
  return out;
}

}  // namespace

MlpModel train(MlpModel model, const Dataset& train_set, const Dataset& val_set, RngStream& rng) {
  const ModelConfig& cfg = model.config();
  if (train_set.empty()) throw ConfigError("train: training split is empty");
  if (val_set.empty()) throw ConfigError("train: validation split is empty");
  if (train_set.feature_dim() != cfg.input_dim || val_set.feature_dim() != cfg.input_dim) {
    throw ConfigError("train: feature width does not match model input_dim " +
                      std::to_string(cfg.input_dim));
  }

  const Matrix x_train = train_set.feature_matrix();
  const std::vector<int> y_train = train_set.labels();
  const Matrix x_val = val_set.feature_matrix();
  const std::vector<int> y_val = val_set.labels();

  const bool hetero = cfg.head == Head::Heteroscedastic;
  RngStream val_rng = rng.fork(0x5A1);
  const LogitNoise val_noise =
      hetero ? LogitNoise(val_set.size(), cfg.s_logit, val_rng) : LogitNoise();

  AdamState adam(cfg.adam);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  std::vector<EpochRecord> history;
  std::vector<Matrix> best_params;
  double best_val = std::numeric_limits<double>::infinity();
  std::size_t best_epoch = 0;
  std::size_t stale = 0;

  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
      const std::size_t len = std::min(cfg.batch_size, order.size() - start);
      const std::span<const std::size_t> rows(order.data() + start, len);
      const Matrix xb = gather_rows(x_train, rows);
      std::vector<int> yb(len);
      for (std::size_t k = 0; k < len; ++k) yb[k] = y_train[rows[k]];

      model.zero_grad();
      const HeadOutputs out = model.forward_train(xb, rng);
      double batch_loss = 0.0;
      if (hetero) {
        const HeteroLossAndGrad lg = stochastic_nll_loss(out.mu, out.sigma, yb, cfg.s_logit, rng);
        batch_loss = lg.loss;
        model.backward(lg.grad_mu, &lg.grad_sigma);
      } else {
        const LossAndGrad lg = cross_entropy_loss(softmax(out.logits), yb);
        batch_loss = lg.loss;
        model.backward(lg.grad_logits, nullptr);
      }
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("training diverged at epoch " + std::to_string(epoch), epoch);
      }
      const auto params = model.parameters();
      const auto grads = model.gradients();
      adam.step(params, grads);
      loss_sum += batch_loss * static_cast<double>(len);
    }

    const double val_loss = evaluation_loss(model, x_val, y_val, hetero ? &val_noise : nullptr);
    if (!std::isfinite(val_loss)) {
      throw DivergenceError("validation loss diverged at epoch " + std::to_string(epoch), epoch);
    }
    history.push_back({epoch, loss_sum / static_cast<double>(order.size()), val_loss});

    if (val_loss < best_val) {
      best_val = val_loss;
      best_epoch = epoch;
      stale = 0;
      best_params.clear();
      for (const Matrix* p : std::as_const(model).parameters()) best_params.push_back(*p);
    } else if (++stale >= cfg.patience) {
      break;
    }
  }

  const auto params = model.parameters();
  for (std::size_t k = 0; k < params.size(); ++k) *params[k] = best_params[k];
  model.zero_grad();
  model.clear_caches();
  model.set_training_record(std::move(history), best_epoch, best_val);
  model.mark_trained();
  return model;
}

}  // namespace uqc
