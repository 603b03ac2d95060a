// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace uqc {

// Environment variable that caps worker threads for share-nothing work
// (ensemble members, repetitions). Unset means hardware concurrency.
inline constexpr const char* kThreadsEnvVar = "UQC_THREADS";

std::size_t parallelism_degree();

// Runs fn(0..n-1) on up to parallelism_degree() threads. Each index must own
// its outputs. If any call throws, the exception from the lowest index is
// rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace uqc
