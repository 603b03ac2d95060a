// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>

#include "uqc/nn/matrix.hpp"
#include "uqc/nn/rng.hpp"

namespace uqc {

// Element-wise activations. All are total on finite input.
Matrix relu(const Matrix& x);
// Gradient of relu given the pre-activation and the upstream gradient.
Matrix relu_backward(const Matrix& pre, const Matrix& grad_out);
double softplus(double x);
Matrix softplus(const Matrix& x);
double sigmoid(double x);
// Row-wise softmax with max subtraction.
Matrix softmax(const Matrix& logits);
Distribution softmax(const Distribution& logits);

// Fully connected layer y = x W^T + b.
class LinearLayer {
 public:
  LinearLayer(std::size_t in_dim, std::size_t out_dim);

  // Uniform in +-sqrt(6 / (fan_in + fan_out)); bias zero.
  void init_glorot(RngStream& rng);

  // Caches the input when `train` is set so that backward() can run.
  Matrix forward(const Matrix& x, bool train);
  // Stateless inference.
  Matrix apply(const Matrix& x) const;
  // Accumulates weight/bias gradients and returns the gradient wrt the input.
  Matrix backward(const Matrix& grad_out);
  void zero_grad();
  void clear_cache() { cached_input_.reset(); }
  bool has_cache() const { return cached_input_.has_value(); }

  std::size_t in_dim() const { return static_cast<std::size_t>(weights_.cols()); }
  std::size_t out_dim() const { return static_cast<std::size_t>(weights_.rows()); }

  Matrix& weights() { return weights_; }
  const Matrix& weights() const { return weights_; }
  // 1 x out row.
  Matrix& bias() { return bias_; }
  const Matrix& bias() const { return bias_; }
  const Matrix& weight_grad() const { return weight_grad_; }
  const Matrix& bias_grad() const { return bias_grad_; }

 private:
  Matrix weights_;
  Matrix bias_;
  Matrix weight_grad_;
  Matrix bias_grad_;
  std::optional<Matrix> cached_input_;
};

// Inverted dropout: survivors are scaled by 1/(1-p) at train time so the
// eval-mode pass is the identity.
class DropoutLayer {
 public:
  explicit DropoutLayer(double drop_probability);

  double drop_probability() const { return p_; }

  // `active` is caller-controlled so MC-dropout inference can keep masks on.
  // Caches the mask for backward().
  Matrix forward(const Matrix& x, bool active, RngStream& rng);
  Matrix apply(const Matrix& x, bool active, RngStream& rng) const;
  Matrix backward(const Matrix& grad_out) const;
  void clear_cache() { mask_.reset(); }

 private:
  Matrix sample_mask(Eigen::Index rows, Eigen::Index cols, RngStream& rng) const;

  double p_;
  std::optional<Matrix> mask_;
};

}  // namespace uqc
