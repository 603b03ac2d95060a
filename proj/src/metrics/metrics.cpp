// SPDX-License-Identifier: Apache-2.0

#include "uqc/metrics/metrics.hpp"

#include <string>

#include "uqc/errors.hpp"

namespace uqc {

namespace {

void check_inputs(std::span<const Distribution> probs, std::span<const int> labels, const char* what) {
  if (probs.size() != labels.size()) {
    throw ArgumentError(std::string(what) + ": " + std::to_string(probs.size()) + " predictions vs " +
                        std::to_string(labels.size()) + " labels");
  }
  for (int y : labels) {
    if (y != 0 && y != 1) throw ArgumentError(std::string(what) + ": labels must be 0 or 1");
  }
}

}  // namespace

double brier(std::span<const Distribution> probs, std::span<const int> labels) {
  check_inputs(probs, labels, "brier");
  if (probs.empty()) throw ArgumentError("brier: empty input");
  double total = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    for (std::size_t c = 0; c < kNumClasses; ++c) {
      const double target = static_cast<int>(c) == labels[t] ? 1.0 : 0.0;
      const double d = probs[t][c] - target;
      total += d * d;
    }
  }
  return total / static_cast<double>(probs.size());
}

double f1_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  const std::size_t denom = 2 * tp + fp + fn;
  return denom == 0 ? 0.0 : 2.0 * static_cast<double>(tp) / static_cast<double>(denom);
}

EvalReport classification_report(std::span<const Distribution> probs, std::span<const int> labels) {
  check_inputs(probs, labels, "classification_report");
  if (probs.empty()) throw ArgumentError("classification_report: empty input");
  EvalReport r;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    const int pred = predicted_class(probs[t]);
    if (pred == 1 && labels[t] == 1) ++r.tp;
    if (pred == 1 && labels[t] == 0) ++r.fp;
    if (pred == 0 && labels[t] == 1) ++r.fn;
    if (pred == 0 && labels[t] == 0) ++r.tn;
  }
  r.precision = r.tp + r.fp == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fp);
  r.recall = r.tp + r.fn == 0 ? 0.0 : static_cast<double>(r.tp) / static_cast<double>(r.tp + r.fn);
  r.f1 = f1_from_counts(r.tp, r.fp, r.fn);
  r.brier = brier(probs, labels);
  return r;
}

}  // namespace uqc
