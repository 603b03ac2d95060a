// SPDX-License-Identifier: Apache-2.0

#include "uqc/models/checkpoint.hpp"

#include <fstream>
#include <string>

#include <json.hpp>

#include "uqc/errors.hpp"

namespace uqc {

namespace {

using nlohmann::json;

constexpr const char* kFormat = "uqcurate-checkpoint";

json matrix_to_json(const Matrix& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

void matrix_from_json(const json& j, Matrix& target) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const json& data = j.at("data");
  if (rows != target.rows() || cols != target.cols() ||
      data.size() != static_cast<std::size_t>(rows * cols)) {
    throw ParseError("checkpoint: parameter shape does not match the stored config");
  }
  std::size_t k = 0;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) target(r, c) = data[k++].get<double>();
  }
}

json config_to_json(const ModelConfig& c) {
  return json{{"input_dim", c.input_dim},
              {"hidden_layers", c.hidden_layers},
              {"hidden_width", c.hidden_width},
              {"dropout", c.dropout},
              {"head", std::string(to_string(c.head))},
              {"learning_rate", c.adam.learning_rate},
              {"beta1", c.adam.beta1},
              {"beta2", c.adam.beta2},
              {"epsilon", c.adam.epsilon},
              {"max_epochs", c.max_epochs},
              {"patience", c.patience},
              {"batch_size", c.batch_size},
              {"s_logit", c.s_logit}};
}

ModelConfig config_from_json(const json& j) {
  ModelConfig c;
  c.input_dim = j.at("input_dim").get<std::size_t>();
  c.hidden_layers = j.at("hidden_layers").get<std::size_t>();
  c.hidden_width = j.at("hidden_width").get<std::size_t>();
  c.dropout = j.at("dropout").get<double>();
  c.head = parse_head(j.at("head").get<std::string>());
  c.adam.learning_rate = j.at("learning_rate").get<double>();
  c.adam.beta1 = j.at("beta1").get<double>();
  c.adam.beta2 = j.at("beta2").get<double>();
  c.adam.epsilon = j.at("epsilon").get<double>();
  c.max_epochs = j.at("max_epochs").get<std::size_t>();
  c.patience = j.at("patience").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.s_logit = j.at("s_logit").get<std::size_t>();
  return c;
}

}  // namespace

void write_checkpoint(const std::vector<MlpModel>& models, std::ostream& out) {
  json members = json::array();
  for (const MlpModel& m : models) {
    json params = json::array();
    for (const Matrix* p : m.parameters()) params.push_back(matrix_to_json(*p));
    json history = json::array();
    for (const EpochRecord& e : m.history()) {
      history.push_back({{"epoch", e.epoch}, {"train_loss", e.train_loss}, {"val_loss", e.val_loss}});
    }
    members.push_back({{"config", config_to_json(m.config())},
                       {"init_seed", m.init_seed()},
                       {"trained", m.trained()},
                       {"selected_epoch", m.selected_epoch()},
                       {"best_val_loss", m.best_val_loss()},
                       {"history", std::move(history)},
                       {"parameters", std::move(params)}});
  }
  const json doc{{"format", kFormat}, {"version", kCheckpointVersion}, {"members", std::move(members)}};
  out << doc.dump() << '\n';
}

void save_checkpoint(const std::vector<MlpModel>& models, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write checkpoint '" + path.string() + "'");
  write_checkpoint(models, out);
}

std::vector<MlpModel> read_checkpoint(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
  try {
    if (doc.at("format") != kFormat) throw ParseError("checkpoint: unrecognized format");
    if (doc.at("version").get<int>() != kCheckpointVersion) {
      throw ParseError("checkpoint: unsupported version " + doc.at("version").dump());
    }
    std::vector<MlpModel> models;
    for (const json& jm : doc.at("members")) {
      MlpModel model(config_from_json(jm.at("config")), jm.at("init_seed").get<std::uint64_t>());
      const json& params = jm.at("parameters");
      auto targets = model.parameters();
      if (params.size() != targets.size()) throw ParseError("checkpoint: parameter count mismatch");
      for (std::size_t k = 0; k < targets.size(); ++k) matrix_from_json(params[k], *targets[k]);
      std::vector<EpochRecord> history;
      for (const json& e : jm.at("history")) {
        history.push_back({e.at("epoch").get<std::size_t>(), e.at("train_loss").get<double>(),
                           e.at("val_loss").get<double>()});
      }
      model.set_training_record(std::move(history), jm.at("selected_epoch").get<std::size_t>(),
                                jm.at("best_val_loss").get<double>());
      if (jm.at("trained").get<bool>()) model.mark_trained();
      models.push_back(std::move(model));
    }
    return models;
  } catch (const json::exception& e) {
    throw ParseError(std::string("checkpoint: ") + e.what());
  }
}

std::vector<MlpModel> load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open checkpoint '" + path.string() + "'");
  return read_checkpoint(in);
}

}  // namespace uqc
