#pragma once

#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvlest/beamsnet.hpp"
#include "dvlest/errors.hpp"
#include "dvlest/snmnn.hpp"
#include "dvlest/variant.hpp"

namespace dvlest {

using json = nlohmann::json;

// Versioned JSON checkpoints. Doubles survive a round trip bit-exactly
// (shortest-representation printing), so restore-and-continue matches an
// uninterrupted run's parameters.

inline constexpr int kCheckpointVersion = 1;

namespace detail {

inline json params_to_json(const std::vector<const Param*>& params) {
  json arr = json::array();
  for (const Param* p : params) {
    arr.push_back({{"name", p->name}, {"shape", p->shape}, {"values", p->w}});
  }
  return arr;
}

inline void params_from_json(const json& arr, const std::vector<Param*>& params,
                             const std::string& path) {
  if (arr.size() != params.size())
    throw DataError("checkpoint '" + path + "' has " +
                    std::to_string(arr.size()) + " parameter blocks, expected " +
                    std::to_string(params.size()));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const json& e = arr[i];
    if (e.at("name").get<std::string>() != params[i]->name)
      throw DataError("checkpoint '" + path + "': parameter '" +
                      e.at("name").get<std::string>() + "' where '" +
                      params[i]->name + "' was expected");
    std::vector<double> w = e.at("values").get<std::vector<double>>();
    if (w.size() != params[i]->numel())
      throw DataError("checkpoint '" + path + "': size mismatch for '" +
                      params[i]->name + "'");
    params[i]->w = std::move(w);
  }
}

inline json load_checkpoint_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open checkpoint '" + path + "'");
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("checkpoint '" + path + "' is not valid JSON: " + e.what());
  }
  if (doc.value("format", "") != "dvlest-checkpoint")
    throw DataError("'" + path + "' is not a dvlest checkpoint");
  if (doc.value("version", 0) != kCheckpointVersion)
    throw DataError("checkpoint '" + path + "' has unsupported version");
  return doc;
}

inline void write_json(const std::string& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  out << doc.dump(1) << "\n";
}

}  // namespace detail

struct CheckpointInfo {
  std::string model;
  double theta_deg = 0.0;
  std::size_t epochs_done = 0;
};

inline CheckpointInfo peek_checkpoint(const std::string& path) {
  const json doc = detail::load_checkpoint_json(path);
  return {doc.at("model").get<std::string>(), doc.at("theta_deg").get<double>(),
          doc.at("epochs_done").get<std::size_t>()};
}

// ---------------------------------------------------------------------------
// BeamsNet

inline void save_checkpoint(const std::string& path, BeamsNetTrainer& trainer,
                            double theta_deg,
                            const std::string& config_hash = "") {
  const BeamsNetTrainConfig& c = trainer.config();
  std::vector<const Param*> params;
  for (Param* p : trainer.model().params()) params.push_back(p);
  json doc{
      {"format", "dvlest-checkpoint"},
      {"version", kCheckpointVersion},
      {"model", variant_name(trainer.model().variant())},
      {"theta_deg", theta_deg},
      {"config_hash", config_hash},
      {"config",
       {{"lr", c.lr},
        {"batch_size", c.batch_size},
        {"epochs", c.epochs},
        {"decay_epoch", c.decay_epoch},
        {"decay_factor", c.decay_factor},
        {"seed", c.seed}}},
      {"epochs_done", trainer.epochs_done()},
      {"decay_applied", trainer.decay_applied()},
      {"params", detail::params_to_json(params)},
      {"adam",
       {{"t", trainer.adam().steps()},
        {"lr", trainer.adam().lr()},
        {"m", trainer.adam().m()},
        {"v", trainer.adam().v()}}},
  };
  detail::write_json(path, doc);
}

inline std::unique_ptr<BeamsNetTrainer> load_beamsnet_checkpoint(
    const std::string& path) {
  const json doc = detail::load_checkpoint_json(path);
  const ModelVariant variant =
      variant_from_name(doc.at("model").get<std::string>());
  if (!is_beamsnet(variant))
    throw DataError("checkpoint '" + path + "' is not a BeamsNet model");
  const json& jc = doc.at("config");
  BeamsNetTrainConfig cfg;
  cfg.lr = jc.at("lr").get<double>();
  cfg.batch_size = jc.at("batch_size").get<std::size_t>();
  cfg.epochs = jc.at("epochs").get<std::size_t>();
  cfg.decay_epoch = jc.at("decay_epoch").get<std::size_t>();
  cfg.decay_factor = jc.at("decay_factor").get<double>();
  cfg.seed = jc.at("seed").get<std::uint64_t>();
  auto trainer = std::make_unique<BeamsNetTrainer>(variant, cfg);
  detail::params_from_json(doc.at("params"), trainer->model().params(), path);
  const json& ja = doc.at("adam");
  trainer->adam().restore(
      ja.at("t").get<std::size_t>(), ja.at("lr").get<double>(),
      ja.at("m").get<std::vector<std::vector<double>>>(),
      ja.at("v").get<std::vector<std::vector<double>>>());
  trainer->restore_progress(doc.at("epochs_done").get<std::size_t>(),
                            doc.at("decay_applied").get<bool>());
  return trainer;
}

// ---------------------------------------------------------------------------
// SNMNN

inline void save_checkpoint(const std::string& path, SnmnnTrainer& trainer,
                            double theta_deg,
                            const std::string& config_hash = "") {
  const SnmnnConfig& c = trainer.config();
  std::vector<const Param*> params;
  for (Param* p : trainer.model().params()) params.push_back(p);
  json doc{
      {"format", "dvlest-checkpoint"},
      {"version", kCheckpointVersion},
      {"model", variant_name(trainer.model().variant())},
      {"theta_deg", theta_deg},
      {"config_hash", config_hash},
      {"config",
       {{"lr_weights", c.lr_weights},
        {"lr_alpha", c.lr_alpha},
        {"epochs", c.epochs},
        {"bptt_depth", c.bptt_depth},
        {"gamma", c.spectral.gamma},
        {"normalized_layers", c.spectral.layers},
        {"power_iterations", c.spectral.power_iterations},
        {"seed", c.seed}}},
      {"epochs_done", trainer.epochs_done()},
      {"params", detail::params_to_json(params)},
  };
  detail::write_json(path, doc);
}

inline std::unique_ptr<SnmnnTrainer> load_snmnn_checkpoint(
    const std::string& path) {
  const json doc = detail::load_checkpoint_json(path);
  const ModelVariant variant =
      variant_from_name(doc.at("model").get<std::string>());
  if (is_beamsnet(variant))
    throw DataError("checkpoint '" + path + "' is not an SNMNN model");
  const json& jc = doc.at("config");
  SnmnnConfig cfg;
  cfg.lr_weights = jc.at("lr_weights").get<double>();
  cfg.lr_alpha = jc.at("lr_alpha").get<double>();
  cfg.epochs = jc.at("epochs").get<std::size_t>();
  cfg.bptt_depth = jc.at("bptt_depth").get<std::size_t>();
  cfg.spectral.gamma = jc.at("gamma").get<double>();
  cfg.spectral.layers = jc.at("normalized_layers").get<std::size_t>();
  cfg.spectral.power_iterations = jc.at("power_iterations").get<std::size_t>();
  cfg.seed = jc.at("seed").get<std::uint64_t>();
  auto trainer = std::make_unique<SnmnnTrainer>(variant, cfg);
  detail::params_from_json(doc.at("params"), trainer->model().params(), path);
  trainer->restore_progress(doc.at("epochs_done").get<std::size_t>());
  return trainer;
}

}  // namespace dvlest
