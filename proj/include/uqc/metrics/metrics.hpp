// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>

#include "uqc/nn/matrix.hpp"

namespace uqc {

// Mean over instances of the squared distance between the predicted
// distribution and the one-hot label. Lies in [0, 2] for two classes.
double brier(std::span<const Distribution> probs, std::span<const int> labels);

struct EvalReport {
  double brier = 0.0;
  double f1 = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
};

// Predicted class is the argmax with ties going to class 0; class 1 is the
// positive class. Precision, recall and F1 are 0 when their denominator is 0.
EvalReport classification_report(std::span<const Distribution> probs, std::span<const int> labels);

// F1 from confusion counts: 2TP / (2TP + FP + FN), or 0 on a zero denominator.
double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

inline int predicted_class(const Distribution& p) { return p[1] > p[0] ? 1 : 0; }

}  // namespace uqc
