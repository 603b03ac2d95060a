// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "uqc/metrics/stats.hpp"

namespace uqc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `uqcurate` tool. Returns the process exit code: 0 on
// success, 2 for usage, configuration and input-format errors, 1 otherwise.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Header plus string cells of a comma-separated results file.
struct ResultsTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

ResultsTable load_results_table(const std::filesystem::path& path);

// Significance summary of column `a` versus column `b` over the rows whose
// `where_key` cell equals `where_value` (numerically when both parse as
// numbers). Empty cells are skipped. An empty `where_key` keeps every row.
MannWhitneyResult compare_columns(const ResultsTable& table, const std::string& a, const std::string& b,
                                  const std::string& where_key, const std::string& where_value);

}  // namespace uqc
