// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>

#include <array>
#include <cstddef>
#include <string_view>

namespace uqc {

// Row-major dense matrix of 64-bit floats. Feature batches are (instances x
// features); layer weights are (out x in).
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr std::size_t kNumClasses = 2;

// A categorical distribution over the two classes {0, 1}.
using Distribution = std::array<double, kNumClasses>;

// Throws DomainError naming `what` when any entry is NaN or infinite.
void require_finite(const Matrix& m, std::string_view what);

// Throws DimensionError unless `m` is rows x cols.
void require_shape(const Matrix& m, Eigen::Index rows, Eigen::Index cols, std::string_view what);

inline Distribution row_distribution(const Matrix& m, Eigen::Index row) {
  return {m(row, 0), m(row, 1)};
}

}  // namespace uqc
