// SPDX-License-Identifier: Apache-2.0

#include "uqc/experiments/outputs.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "uqc/errors.hpp"

namespace uqc {

namespace {

void write_file(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + path.string() + "'");
  out << body;
  if (!out) throw Error("failed writing '" + path.string() + "'");
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

}  // namespace

std::string output_stem(std::string_view kind, const ResolvedConfig& config) {
  return std::string(kind) + "-" + hex64(fnv1a64(std::string(kind) + "\n" + config.canonical()));
}

std::string input_digest(const ExperimentSpec& spec) {
  if (spec.data_path.empty()) {
    std::string synthetic;
    for (const auto& [key, value] : spec.config.entries()) {
      if (key.rfind("synthetic.", 0) == 0) synthetic += key + "=" + value + "\n";
    }
    return "fnv1a64:" + hex64(fnv1a64(synthetic));
  }
  std::ifstream in(spec.data_path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + spec.data_path.string() + "'");
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return "fnv1a64:" + hex64(fnv1a64(bytes));
}

WrittenOutputs write_outputs(std::string_view kind, const ExperimentSpec& spec,
                             const std::vector<std::uint64_t>& run_seeds, const std::vector<OutputTable>& tables,
                             const std::filesystem::path& out_dir) {
  if (!std::filesystem::is_directory(out_dir)) {
    throw ArgumentError("output directory '" + out_dir.string() + "' does not exist");
  }
  const std::string stem = output_stem(kind, spec.config);
  WrittenOutputs written;
  nlohmann::json outputs = nlohmann::json::array();
  for (const auto& table : tables) {
    const auto path = out_dir / (stem + "-" + table.name + ".csv");
    write_file(path, table.csv);
    written.tables.push_back(path);
    outputs.push_back(path.filename().string());
  }

  nlohmann::json manifest;
  manifest["format"] = "uqcurate-manifest";
  manifest["version"] = 1;
  manifest["tool"] = std::string(kToolVersion);
  manifest["experiment"] = std::string(kind);
  manifest["config"] = nlohmann::json::object();
  for (const auto& [key, value] : spec.config.entries()) manifest["config"][key] = value;
  manifest["seeds"] = {{"experiment", spec.seed}, {"synthetic", spec.synthetic_seed}, {"repetitions", run_seeds}};
  manifest["input"] = {{"source", spec.data_path.empty() ? std::string("synthetic") : spec.data_path.string()},
                       {"digest", input_digest(spec)}};
  manifest["outputs"] = outputs;
  manifest["created"] = utc_timestamp();

  written.manifest = out_dir / (stem + "-manifest.json");
  write_file(written.manifest, manifest.dump(2) + "\n");
  return written;
}

KvConfig config_from_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot open manifest '" + manifest.string() + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("manifest '" + manifest.string() + "': " + e.what());
  }
  if (!j.is_object() || j.value("format", "") != "uqcurate-manifest" || !j.contains("config") ||
      !j["config"].is_object()) {
    throw ParseError("'" + manifest.string() + "' is not a run manifest");
  }
  KvConfig raw;
  for (const auto& [key, value] : j["config"].items()) {
    if (!value.is_string()) throw ParseError("manifest config value for '" + key + "' is not a string");
    raw.set(key, value.get<std::string>());
  }
  return raw;
}

KvConfig load_run_config(const std::filesystem::path& path) {
  if (path.extension() == ".json") return config_from_manifest(path);
  return KvConfig::load(path);
}

}  // namespace uqc
