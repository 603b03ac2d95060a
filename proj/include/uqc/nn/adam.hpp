// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uqc/nn/matrix.hpp"

namespace uqc {

struct AdamOptions {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with bias correction. Moment buffers are sized on the first step and
// must match the parameter shapes on every later step.
class AdamState {
 public:
  explicit AdamState(AdamOptions options = {});

  void step(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

  const AdamOptions& options() const { return options_; }
  std::uint64_t t() const { return t_; }
  const std::vector<Matrix>& first_moments() const { return m_; }
  const std::vector<Matrix>& second_moments() const { return v_; }

 private:
  AdamOptions options_;
  std::uint64_t t_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace uqc
