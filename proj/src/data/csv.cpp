// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "uqc/data/dataset.hpp"
#include "uqc/errors.hpp"
#include "uqc/format.hpp"

namespace uqc {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

[[noreturn]] void fail(const std::string& source, std::size_t line, const std::string& msg) {
  throw ParseError(source + ": line " + std::to_string(line) + ": " + msg);
}

double parse_double(std::string_view cell, const std::string& source, std::size_t line,
                    std::string_view column) {
  if (cell.empty()) fail(source, line, "missing value in column '" + std::string(column) + "'");
  std::string_view body = cell;
  if (body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc() || ptr != body.data() + body.size()) {
    fail(source, line, "cannot parse '" + std::string(cell) + "' in column '" + std::string(column) + "'");
  }
  if (!std::isfinite(value)) {
    fail(source, line, "non-finite value in column '" + std::string(column) + "'");
  }
  return value;
}

int parse_binary(std::string_view cell, const std::string& source, std::size_t line,
                 std::string_view column) {
  if (cell == "0") return 0;
  if (cell == "1") return 1;
  if (cell.empty()) fail(source, line, "missing value in column '" + std::string(column) + "'");
  fail(source, line, "column '" + std::string(column) + "' must be 0 or 1, got '" + std::string(cell) + "'");
}

}  // namespace

Dataset parse_csv(std::istream& in, const std::string& source_name) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError(source_name + ": missing header");
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  const auto header = split_cells(line);
  if (header.size() < 3 || header.front() != "id") {
    throw ParseError(source_name + ": header must be id,f0,...,f{d-1},label[,noise_tag]");
  }
  const bool has_tag = header.back() == "noise_tag";
  const std::size_t label_col = header.size() - (has_tag ? 2 : 1);
  if (header[label_col] != "label") throw ParseError(source_name + ": header lacks a label column");
  const std::size_t dim = label_col - 1;
  if (dim == 0) throw ParseError(source_name + ": no feature columns");
  for (std::size_t c = 0; c < dim; ++c) {
    if (header[c + 1] != "f" + std::to_string(c)) {
      throw ParseError(source_name + ": feature column " + std::to_string(c) + " must be named f" +
                       std::to_string(c));
    }
  }

  std::vector<Instance> instances;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_cells(line);
    if (cells.size() != header.size()) {
      fail(source_name, line_no,
           "expected " + std::to_string(header.size()) + " cells, got " + std::to_string(cells.size()));
    }
    Instance inst;
    inst.id = std::string(cells[0]);
    if (inst.id.empty()) fail(source_name, line_no, "missing id");
    inst.features.reserve(dim);
    for (std::size_t c = 0; c < dim; ++c) {
      inst.features.push_back(parse_double(cells[c + 1], source_name, line_no, header[c + 1]));
    }
    inst.label = parse_binary(cells[label_col], source_name, line_no, "label");
    if (has_tag) inst.noise_tag = parse_binary(cells[label_col + 1], source_name, line_no, "noise_tag") == 1;
    instances.push_back(std::move(inst));
  }
  try {
    return Dataset(std::move(instances), dim, source_name);
  } catch (const Error& e) {
    throw ParseError(source_name + ": " + e.what());
  }
}

Dataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  return parse_csv(in, path.string());
}

void write_csv(const Dataset& ds, std::ostream& out) {
  const bool tags = ds.has_noise_tags();
  out << "id";
  for (std::size_t c = 0; c < ds.feature_dim(); ++c) out << ",f" << c;
  out << ",label";
  if (tags) out << ",noise_tag";
  out << '\n';
  for (const Instance& inst : ds.instances()) {
    out << inst.id;
    for (double v : inst.features) {
      out << ',';
      write_double(out, v);
    }
    out << ',' << inst.label;
    if (tags) out << ',' << (*inst.noise_tag ? 1 : 0);
    out << '\n';
  }
}

void save_csv(const Dataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  write_csv(ds, out);
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace uqc
