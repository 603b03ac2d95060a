// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace uqc {

// One documented configuration key.
struct KeySpec {
  std::string key;
  std::string default_value;
  std::string description;
};

// Plain-text `key = value` configuration. Blank lines and lines starting with
// '#' are ignored; a repeated key is an error.
class KvConfig {
 public:
  static KvConfig parse(std::istream& in, const std::string& source_name);
  static KvConfig load(const std::filesystem::path& path);

  void set(const std::string& key, const std::string& value) { entries_[key] = value; }
  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;
};

// Configuration with every schema key present (explicit value or default).
class ResolvedConfig {
 public:
  // Unknown keys raise ConfigError listing the valid ones.
  static ResolvedConfig resolve(const KvConfig& raw, std::span<const KeySpec> schema);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::size_t get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::string> get_string_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return values_; }
  // `key=value` lines in key order; the canonical form used for hashing.
  std::string canonical() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace uqc
