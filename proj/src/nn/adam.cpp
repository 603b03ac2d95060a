// SPDX-License-Identifier: Apache-2.0

#include "uqc/nn/adam.hpp"

#include <cmath>

#include "uqc/errors.hpp"

namespace uqc {

AdamState::AdamState(AdamOptions options) : options_(options) {
  if (!(options_.learning_rate > 0.0) || !(options_.beta1 >= 0.0 && options_.beta1 < 1.0) ||
      !(options_.beta2 >= 0.0 && options_.beta2 < 1.0) || !(options_.epsilon > 0.0)) {
    throw ArgumentError("invalid Adam hyperparameters");
  }
}

void AdamState::step(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
  if (params.size() != grads.size()) {
    throw DimensionError("adam_step: parameter and gradient counts differ");
  }
  if (m_.empty()) {
    for (const Matrix* p : params) {
      m_.push_back(Matrix::Zero(p->rows(), p->cols()));
      v_.push_back(Matrix::Zero(p->rows(), p->cols()));
    }
  }
  if (m_.size() != params.size()) throw DimensionError("adam_step: parameter count changed");
  for (std::size_t k = 0; k < params.size(); ++k) {
    require_shape(*params[k], m_[k].rows(), m_[k].cols(), "adam_step parameter");
    require_shape(*grads[k], m_[k].rows(), m_[k].cols(), "adam_step gradient");
  }

  ++t_;
  const double b1 = options_.beta1;
  const double b2 = options_.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  for (std::size_t k = 0; k < params.size(); ++k) {
    Matrix& m = m_[k];
    Matrix& v = v_[k];
    const Matrix& g = *grads[k];
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    auto update = (m.array() / correction1) /
                  ((v.array() / correction2).sqrt() + options_.epsilon);
    params[k]->array() -= options_.learning_rate * update;
  }
}

}  // namespace uqc
