// SPDX-License-Identifier: Apache-2.0

#include "uqc/nn/layers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uqc/errors.hpp"

namespace uqc {

void require_finite(const Matrix& m, std::string_view what) {
  if (!m.allFinite()) {
    throw DomainError(std::string(what) + ": non-finite value");
  }
}

void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw DimensionError(std::string(what) + ": expected " + std::to_string(rows) + "x" +
                         std::to_string(cols) + ", got " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()));
  }
}

Matrix relu(const Matrix& x) { return x.cwiseMax(0.0); }

Matrix relu_backward(const Matrix& pre, const Matrix& grad_out) {
  return (pre.array() > 0.0).select(grad_out, 0.0);
}

double softplus(double x) {
  // log(1 + e^x) without overflow for large x.
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

Matrix softplus(const Matrix& x) {
  return x.unaryExpr([](double v) { return softplus(v); });
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

Matrix softmax(const Matrix& logits) {
  Matrix out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const double mx = logits.row(r).maxCoeff();
    double sum = 0.0;
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      out(r, c) = std::exp(logits(r, c) - mx);
      sum += out(r, c);
    }
    out.row(r) /= sum;
  }
  return out;
}

Distribution softmax(const Distribution& z) {
  const double mx = std::max(z[0], z[1]);
  const double e0 = std::exp(z[0] - mx);
  const double e1 = std::exp(z[1] - mx);
  const double sum = e0 + e1;
  return {e0 / sum, e1 / sum};
}

LinearLayer::LinearLayer(std::size_t in_dim, std::size_t out_dim)
    : weights_(Matrix::Zero(static_cast<Eigen::Index>(out_dim), static_cast<Eigen::Index>(in_dim))),
      bias_(Matrix::Zero(1, static_cast<Eigen::Index>(out_dim))),
      weight_grad_(Matrix::Zero(weights_.rows(), weights_.cols())),
      bias_grad_(Matrix::Zero(1, bias_.cols())) {
  if (in_dim == 0 || out_dim == 0) throw DimensionError("LinearLayer: zero dimension");
}

void LinearLayer::init_glorot(RngStream& rng) {
  const double limit = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
  for (Eigen::Index r = 0; r < weights_.rows(); ++r) {
    for (Eigen::Index c = 0; c < weights_.cols(); ++c) {
      weights_(r, c) = (2.0 * rng.uniform() - 1.0) * limit;
    }
  }
  bias_.setZero();
}

Matrix LinearLayer::apply(const Matrix& x) const {
  if (x.cols() != weights_.cols()) {
    throw DimensionError("linear_forward: input has " + std::to_string(x.cols()) +
                         " columns, layer expects " + std::to_string(weights_.cols()));
  }
  Matrix out = x * weights_.transpose();
  out.rowwise() += bias_.row(0);
  return out;
}

Matrix LinearLayer::forward(const Matrix& x, bool train) {
  Matrix out = apply(x);
  if (train) {
    cached_input_ = x;
  } else {
    cached_input_.reset();
  }
  return out;
}

Matrix LinearLayer::backward(const Matrix& grad_out) {
  if (!cached_input_) throw StateError("linear backward without a cached training forward pass");
  require_shape(grad_out, cached_input_->rows(), weights_.rows(), "linear backward");
  weight_grad_.noalias() += grad_out.transpose() * (*cached_input_);
  bias_grad_ += grad_out.colwise().sum();
  return grad_out * weights_;
}

void LinearLayer::zero_grad() {
  weight_grad_.setZero();
  bias_grad_.setZero();
}

DropoutLayer::DropoutLayer(double drop_probability) : p_(drop_probability) {
  if (!(p_ >= 0.0 && p_ < 1.0)) throw ArgumentError("dropout probability must lie in [0, 1)");
}

Matrix DropoutLayer::sample_mask(Eigen::Index rows, Eigen::Index cols, RngStream& rng) const {
  const double keep_scale = 1.0 / (1.0 - p_);
  Matrix mask(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) {
      mask(r, c) = rng.uniform() < p_ ? 0.0 : keep_scale;
    }
  }
  return mask;
}

Matrix DropoutLayer::apply(const Matrix& x, bool active, RngStream& rng) const {
  if (!active || p_ == 0.0) return x;
  return x.cwiseProduct(sample_mask(x.rows(), x.cols(), rng));
}

Matrix DropoutLayer::forward(const Matrix& x, bool active, RngStream& rng) {
  if (!active || p_ == 0.0) {
    mask_.reset();
    return x;
  }
  mask_ = sample_mask(x.rows(), x.cols(), rng);
  return x.cwiseProduct(*mask_);
}

Matrix DropoutLayer::backward(const Matrix& grad_out) const {
  if (!mask_) return grad_out;
  return grad_out.cwiseProduct(*mask_);
}

}  // namespace uqc
