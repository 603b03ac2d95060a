// SPDX-License-Identifier: Apache-2.0

#include "uqc/data/kv_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "uqc/errors.hpp"

namespace uqc {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> items;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* begin = text.data();
  if (!text.empty() && text.front() == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + text + "'");
  }
  return v;
}

}  // namespace

KvConfig KvConfig::parse(std::istream& in, const std::string& source_name) {
  KvConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(line);
    if (body.empty() || body.front() == '#') continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": expected key=value");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty()) throw ConfigError(source_name + ":" + std::to_string(line_no) + ": empty key");
    if (!cfg.entries_.emplace(key, value).second) {
      throw ConfigError(source_name + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
  }
  return cfg;
}

KvConfig KvConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  return parse(in, path.string());
}

ResolvedConfig ResolvedConfig::resolve(const KvConfig& raw, std::span<const KeySpec> schema) {
  ResolvedConfig out;
  for (const KeySpec& spec : schema) out.values_[spec.key] = spec.default_value;
  for (const auto& [key, value] : raw.entries()) {
    auto it = out.values_.find(key);
    if (it == out.values_.end()) {
      std::string msg = "unknown config key '" + key + "'; valid keys:";
      for (const KeySpec& spec : schema) msg += "\n  " + spec.key;
      throw ConfigError(msg);
    }
    it->second = value;
  }
  return out;
}

const std::string& ResolvedConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("config key '" + key + "' is not defined");
  return it->second;
}

double ResolvedConfig::get_double(const std::string& key) const { return to_double(key, get(key)); }

std::uint64_t ResolvedConfig::get_u64(const std::string& key) const {
  const std::string& text = get(key);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
    throw ConfigError("config key '" + key + "': expected a nonnegative integer, got '" + text + "'");
  }
  return v;
}

std::vector<double> ResolvedConfig::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const std::string& item : split_list(get(key))) out.push_back(to_double(key, item));
  return out;
}

std::vector<std::string> ResolvedConfig::get_string_list(const std::string& key) const {
  return split_list(get(key));
}

std::string ResolvedConfig::canonical() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
  return out;
}

}  // namespace uqc
