// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace uqc {

// Mixes a base seed with stream identifiers (splitmix64 finalizer chain).
// Used to give every ensemble member, repetition and round its own stream.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

// Deterministic random stream. Raw bits come from mt19937_64, whose output
// sequence is fixed by the C++ standard; every derived draw (uniform, normal,
// index, shuffle) is computed here rather than through <random>
// distributions, whose algorithms are implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  // Number of raw 64-bit words consumed so far.
  std::uint64_t counter() const { return counter_; }

  std::uint64_t next_u64();
  // Uniform on [0, 1) with 53 bits of resolution.
  double uniform();
  // Standard normal via Box-Muller (one output per two uniforms).
  double normal();
  bool bernoulli(double p);
  // Uniform on {0, ..., n-1}; n must be positive.
  std::size_t uniform_index(std::size_t n);

  template <class T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = uniform_index(i);
      using std::swap;
      swap(items[i - 1], items[j]);
    }
  }

  // Independent child stream; does not advance this stream.
  RngStream fork(std::uint64_t stream_id) const;

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  std::mt19937_64 engine_;
};

}  // namespace uqc
