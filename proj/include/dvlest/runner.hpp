#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "dvlest/beamsnet.hpp"
#include "dvlest/dataset.hpp"
#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"
#include "dvlest/ls_estimator.hpp"
#include "dvlest/metrics.hpp"
#include "dvlest/nn/checkpoint.hpp"
#include "dvlest/report.hpp"
#include "dvlest/snmnn.hpp"
#include "dvlest/variant.hpp"

namespace dvlest {

// Exit codes for the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kConfigExit = 2,
  kDataExit = 3,
  kDivergenceExit = 4,
};

/// Effective settings of one run. Every default equals the paper's stated
/// value (training hyperparameters per variant live in the per-variant
/// config structs and are overridable through `train_overrides`).
struct RunConfig {
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  double theta_deg = 30.0;

  // error model
  double bias_mps = 0.001;
  double noise_std_mps = 0.15;

  // simulate
  std::size_t n_missions = 13;
  double duration_s = 400.0;
  std::string profile_mix = "mixed";  // mixed | sinusoidal | piecewise
  double imu_accel_noise_std = 0.01;
  double imu_gyro_noise_std = 0.001;

  // dataset
  std::string mission_dir;                     // directory of .dvm files
  std::vector<std::string> test_ids{"m11", "m12"};

  // train
  std::string model = "beamsnet-v1";
  std::string resume;       // checkpoint path to continue from
  json train_overrides = json::object();

  // evaluate / compare
  std::vector<std::string> checkpoints;

  json to_json() const {
    return json{{"seed", seed},
                {"out", out_dir},
                {"geometry", {{"theta_deg", theta_deg}}},
                {"error_model",
                 {{"bias_mps", bias_mps}, {"noise_std_mps", noise_std_mps}}},
                {"simulate",
                 {{"missions", n_missions},
                  {"duration_s", duration_s},
                  {"profile_mix", profile_mix},
                  {"imu_accel_noise_std", imu_accel_noise_std},
                  {"imu_gyro_noise_std", imu_gyro_noise_std}}},
                {"dataset",
                 {{"mission_dir", mission_dir}, {"test_ids", test_ids}}},
                {"train",
                 {{"model", model},
                  {"resume", resume},
                  {"overrides", train_overrides}}},
                {"evaluate", {{"checkpoints", checkpoints}}}};
  }

  static RunConfig from_json(const json& j) {
    RunConfig c;
    try {
      c.seed = j.value("seed", c.seed);
      c.out_dir = j.value("out", c.out_dir);
      if (j.contains("geometry"))
        c.theta_deg = j["geometry"].value("theta_deg", c.theta_deg);
      if (j.contains("error_model")) {
        c.bias_mps = j["error_model"].value("bias_mps", c.bias_mps);
        c.noise_std_mps =
            j["error_model"].value("noise_std_mps", c.noise_std_mps);
      }
      if (j.contains("simulate")) {
        const json& s = j["simulate"];
        c.n_missions = s.value("missions", c.n_missions);
        c.duration_s = s.value("duration_s", c.duration_s);
        c.profile_mix = s.value("profile_mix", c.profile_mix);
        c.imu_accel_noise_std =
            s.value("imu_accel_noise_std", c.imu_accel_noise_std);
        c.imu_gyro_noise_std =
            s.value("imu_gyro_noise_std", c.imu_gyro_noise_std);
      }
      if (j.contains("dataset")) {
        const json& d = j["dataset"];
        c.mission_dir = d.value("mission_dir", c.mission_dir);
        if (d.contains("test_ids"))
          c.test_ids = d["test_ids"].get<std::vector<std::string>>();
      }
      if (j.contains("train")) {
        const json& t = j["train"];
        c.model = t.value("model", c.model);
        c.resume = t.value("resume", c.resume);
        if (t.contains("overrides")) c.train_overrides = t["overrides"];
      }
      if (j.contains("evaluate") && j["evaluate"].contains("checkpoints"))
        c.checkpoints =
            j["evaluate"]["checkpoints"].get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ConfigError(std::string("malformed run config: ") + e.what());
    }
    return c;
  }

  static RunConfig from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    json j;
    try {
      in >> j;
    } catch (const json::exception& e) {
      throw ConfigError("config file '" + path + "' is not valid JSON: " +
                        e.what());
    }
    return from_json(j);
  }
};

inline std::string config_hash(const RunConfig& cfg) {
  const std::string dump = cfg.to_json().dump();
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(
                    fnv1a64(dump.data(), dump.size())));
  return buf;
}

// ---------------------------------------------------------------------------
// Synthetic mission set

/// Deterministic profile draws for the standard 13-mission set. "mixed"
/// alternates sinusoidal (even index) and piecewise-constant (odd index)
/// missions. Periods and segment lengths are long relative to the 4 s
/// window so the motion is predictable at the DVL rate.
inline SyntheticTrajectoryConfig standard_mission_config(
    const RunConfig& run, std::size_t index) {
  SyntheticTrajectoryConfig cfg;
  char id[8];
  std::snprintf(id, sizeof(id), "m%02zu", index);
  cfg.id = id;
  cfg.duration_s = run.duration_s;
  cfg.geometry = BeamGeometry::janus(run.theta_deg);
  cfg.error = ErrorModelConfig::scalar(run.bias_mps, run.noise_std_mps,
                                       run.seed);
  cfg.imu_accel_noise_std = run.imu_accel_noise_std;
  cfg.imu_gyro_noise_std = run.imu_gyro_noise_std;
  cfg.seed = run.seed;

  bool sinusoidal = true;
  if (run.profile_mix == "mixed")
    sinusoidal = (index % 2 == 0);
  else if (run.profile_mix == "piecewise")
    sinusoidal = false;
  else if (run.profile_mix != "sinusoidal")
    throw ConfigError("profile_mix must be mixed|sinusoidal|piecewise, got '" +
                      run.profile_mix + "'");

  Rng rng(Rng::mix(run.seed, 0x9a0f0000ULL + index));
  for (int axis = 0; axis < 3; ++axis) {
    const double scale = (axis == 2) ? 0.35 : 1.0;  // gentler vertical motion
    if (sinusoidal) {
      const double amplitude = scale * (0.5 + 0.7 * rng.uniform());
      const double period = 90.0 + 90.0 * rng.uniform();
      const double phase = 2.0 * kPi * rng.uniform();
      const double offset = scale * 0.3 * rng.uniform_sym();
      cfg.profile[axis] = AxisProfile::sine(amplitude, period, phase, offset);
    } else {
      const double segment = 70.0 + 40.0 * rng.uniform();
      const std::size_t n_seg = static_cast<std::size_t>(
          std::ceil(run.duration_s / segment)) + 1;
      std::vector<double> levels(n_seg);
      for (double& lvl : levels) lvl = scale * 1.1 * rng.uniform_sym();
      cfg.profile[axis] = AxisProfile::piecewise(std::move(levels), segment);
    }
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Command implementations

namespace detail {

inline void write_manifest(const RunConfig& cfg, const std::string& command) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&tt));
  // created_utc is the single field that varies between reruns
  json doc{{"command", command},
           {"config", cfg.to_json()},
           {"config_hash", config_hash(cfg)},
           {"created_utc", stamp}};
  write_json((std::filesystem::path(cfg.out_dir) / "manifest.json").string(),
             doc);
}

inline std::vector<Mission> load_mission_dir(const std::string& dir) {
  if (!std::filesystem::is_directory(dir))
    throw DataError("mission directory '" + dir + "' does not exist");
  std::vector<std::string> paths;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".dvm") paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw DataError("mission directory '" + dir + "' has no .dvm files");
  std::vector<Mission> missions;
  missions.reserve(paths.size());
  for (const std::string& p : paths) missions.push_back(load_mission_container(p));
  return missions;
}

}  // namespace detail

inline void cmd_simulate(const RunConfig& cfg) {
  const std::filesystem::path out(cfg.out_dir);
  const std::filesystem::path missions = out / "missions";
  std::filesystem::create_directories(missions);
  const std::string hash = config_hash(cfg);
  for (std::size_t i = 0; i < cfg.n_missions; ++i) {
    const SyntheticTrajectoryConfig mc = standard_mission_config(cfg, i);
    const Mission m = synthesize_mission(mc);
    save_mission((missions / (m.id + ".dvm")).string(), m, hash, cfg.seed);
  }
  detail::write_manifest(cfg, "simulate");
}

struct TrainOutcome {
  std::string checkpoint_path;
  std::string log_path;
  std::vector<double> epoch_loss;
  std::vector<double> epoch_lr;  // empty for SNMNN
};

inline BeamsNetTrainConfig beamsnet_config_for_run(const RunConfig& cfg,
                                                   ModelVariant v) {
  BeamsNetTrainConfig c = BeamsNetTrainConfig::defaults(v);
  c.seed = cfg.seed;
  const json& o = cfg.train_overrides;
  c.lr = o.value("lr", c.lr);
  c.batch_size = o.value("batch_size", c.batch_size);
  c.epochs = o.value("epochs", c.epochs);
  c.decay_epoch = o.value("decay_epoch", c.decay_epoch);
  c.decay_factor = o.value("decay_factor", c.decay_factor);
  c.seed = o.value("seed", c.seed);
  return c;
}

inline SnmnnConfig snmnn_config_for_run(const RunConfig& cfg, ModelVariant v) {
  SnmnnConfig c = SnmnnConfig::defaults(v);
  c.seed = cfg.seed;
  const json& o = cfg.train_overrides;
  c.lr_weights = o.value("lr_weights", c.lr_weights);
  c.lr_alpha = o.value("lr_alpha", c.lr_alpha);
  c.epochs = o.value("epochs", c.epochs);
  c.bptt_depth = o.value("bptt_depth", c.bptt_depth);
  c.spectral.gamma = o.value("gamma", c.spectral.gamma);
  c.spectral.power_iterations =
      o.value("power_iterations", c.spectral.power_iterations);
  c.seed = o.value("seed", c.seed);
  return c;
}

inline TrainOutcome cmd_train(const RunConfig& cfg) {
  const ModelVariant variant = variant_from_name(cfg.model);
  const std::string mission_dir =
      cfg.mission_dir.empty()
          ? (std::filesystem::path(cfg.out_dir) / "missions").string()
          : cfg.mission_dir;
  const std::vector<Mission> missions = detail::load_mission_dir(mission_dir);
  const MissionSplit split = split_missions(missions, cfg.test_ids);
  if (split.train.empty()) throw DataError("no training missions after split");

  const std::filesystem::path out(cfg.out_dir);
  std::filesystem::create_directories(out);
  const std::string hash = config_hash(cfg);
  TrainOutcome outcome;
  outcome.checkpoint_path =
      (out / ("checkpoint_" + cfg.model + ".json")).string();
  outcome.log_path = (out / ("train_log_" + cfg.model + ".tsv")).string();

  std::ofstream log(outcome.log_path, std::ios::binary);
  if (!log) throw DataError("cannot write '" + outcome.log_path + "'");
  log << "# dvlest training log\tmodel=" << cfg.model
      << "\tconfig_hash=" << hash << "\n";

  if (is_beamsnet(variant)) {
    std::vector<WindowedSample> train_set;
    for (std::size_t idx : split.train) {
      std::vector<WindowedSample> w = make_windows(missions[idx], variant);
      train_set.insert(train_set.end(), std::make_move_iterator(w.begin()),
                       std::make_move_iterator(w.end()));
    }
    std::unique_ptr<BeamsNetTrainer> trainer;
    if (!cfg.resume.empty()) {
      trainer = load_beamsnet_checkpoint(cfg.resume);
      if (trainer->model().variant() != variant)
        throw ConfigError("resume checkpoint holds a different model");
      if (cfg.train_overrides.contains("epochs"))
        trainer->set_target_epochs(
            cfg.train_overrides["epochs"].get<std::size_t>());
    } else {
      trainer = std::make_unique<BeamsNetTrainer>(
          variant, beamsnet_config_for_run(cfg, variant));
    }
    log << "epoch\tmean_loss\tlr\n";
    const std::vector<EpochStats> stats = trainer->train(train_set);
    for (const EpochStats& s : stats) {
      log << s.epoch << '\t' << detail::fmt_g17(s.mean_loss) << '\t'
          << detail::fmt_g17(s.lr) << '\n';
      outcome.epoch_loss.push_back(s.mean_loss);
      outcome.epoch_lr.push_back(s.lr);
    }
    save_checkpoint(outcome.checkpoint_path, *trainer, cfg.theta_deg, hash);
  } else {
    std::vector<SnmnnSequence> train_set;
    for (std::size_t idx : split.train)
      train_set.push_back(make_snmnn_sequence(missions[idx], variant));
    std::unique_ptr<SnmnnTrainer> trainer;
    if (!cfg.resume.empty()) {
      trainer = load_snmnn_checkpoint(cfg.resume);
      if (trainer->model().variant() != variant)
        throw ConfigError("resume checkpoint holds a different model");
      if (cfg.train_overrides.contains("epochs"))
        trainer->set_target_epochs(
            cfg.train_overrides["epochs"].get<std::size_t>());
    } else {
      trainer = std::make_unique<SnmnnTrainer>(
          variant, snmnn_config_for_run(cfg, variant));
    }
    log << "epoch\tmean_loss\n";
    const std::vector<EpochStatsSnmnn> stats = trainer->train(train_set);
    for (const EpochStatsSnmnn& s : stats) {
      log << s.epoch << '\t' << detail::fmt_g17(s.mean_loss) << '\n';
      outcome.epoch_loss.push_back(s.mean_loss);
    }
    save_checkpoint(outcome.checkpoint_path, *trainer, cfg.theta_deg, hash);
  }
  detail::write_manifest(cfg, "train");
  return outcome;
}

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline std::size_t epoch_index(double t, double dvl_rate_hz = 1.0) {
  return static_cast<std::size_t>(std::llround(t * dvl_rate_hz));
}

}  // namespace detail

/// Estimates of one method on one mission, keyed by DVL epoch index.
using EpochEstimates = std::map<std::size_t, Vec3>;

inline EpochEstimates run_ls(const Mission& m, const LsEstimator& est) {
  EpochEstimates out;
  for (const DvlEpoch& e : m.dvl)
    out[detail::epoch_index(e.t)] = est.estimate(e.corrupted_beams);
  return out;
}

inline EpochEstimates run_beamsnet(const Mission& m, const BeamsNet& model) {
  EpochEstimates out;
  for (const WindowedSample& s : make_windows(m, model.variant()))
    out[detail::epoch_index(s.t)] = model.forward(s);
  return out;
}

inline EpochEstimates run_snmnn(const Mission& m, const Snmnn& model) {
  EpochEstimates out;
  const SnmnnSequence seq = make_snmnn_sequence(m, model.variant());
  const std::vector<Vec3> pred = model.predict(seq);
  for (std::size_t i = 0; i < pred.size(); ++i)
    out[detail::epoch_index(seq.steps[i].t)] = pred[i];
  return out;
}

struct LoadedModel {
  std::string name;
  std::unique_ptr<BeamsNetTrainer> beamsnet;
  std::unique_ptr<SnmnnTrainer> snmnn;
};

inline LoadedModel load_model_checkpoint(const std::string& path,
                                         double theta_deg) {
  const CheckpointInfo info = peek_checkpoint(path);
  if (std::abs(info.theta_deg - theta_deg) > 1e-9)
    throw ConfigError(
        "checkpoint '" + path + "' was trained with theta = " +
        std::to_string(info.theta_deg) + " deg but the run is configured for " +
        std::to_string(theta_deg) + " deg; refusing to mix geometries");
  LoadedModel m;
  m.name = info.model;
  if (is_beamsnet(variant_from_name(info.model)))
    m.beamsnet = load_beamsnet_checkpoint(path);
  else
    m.snmnn = load_snmnn_checkpoint(path);
  return m;
}

struct EvaluationOutcome {
  std::vector<EvaluationReport> reports;  // [0] is always the LS baseline
  std::string table_path;
};

/// Evaluate LS plus any loaded models on the test missions. All methods are
/// scored on the intersection of epochs they can all predict, so the
/// comparison rows are computed over identical samples.
inline EvaluationOutcome evaluate_methods(
    const std::vector<Mission>& missions, const MissionSplit& split,
    const RunConfig& cfg, const std::vector<LoadedModel>& models) {
  if (split.test.empty())
    throw ConfigError("evaluation requires a non-empty test set");
  const TransformMatrix h = build_transform(BeamGeometry::janus(cfg.theta_deg));
  const LsEstimator ls(h);

  // per-method, per-test-mission estimates
  struct MethodRun {
    std::string name;
    std::vector<EpochEstimates> per_mission;
  };
  std::vector<MethodRun> runs;
  runs.push_back({"ls", {}});
  for (const LoadedModel& m : models) runs.push_back({m.name, {}});

  for (std::size_t t = 0; t < split.test.size(); ++t) {
    const Mission& m = missions[split.test[t]];
    if (!m.corruption_applied)
      throw DataError("test mission '" + m.id + "' has no corruption applied");
    runs[0].per_mission.push_back(run_ls(m, ls));
    for (std::size_t k = 0; k < models.size(); ++k) {
      const LoadedModel& lm = models[k];
      runs[k + 1].per_mission.push_back(
          lm.beamsnet ? run_beamsnet(m, lm.beamsnet->model())
                      : run_snmnn(m, lm.snmnn->model()));
    }
  }

  EvaluationOutcome out;
  for (MethodRun& run : runs) {
    std::vector<double> ts;
    std::vector<Vec3> truth, est;
    double t_offset = 0.0;  // keep per-mission series distinguishable in time
    for (std::size_t t = 0; t < split.test.size(); ++t) {
      const Mission& m = missions[split.test[t]];
      for (const DvlEpoch& e : m.dvl) {
        const std::size_t k = detail::epoch_index(e.t);
        bool have_all = true;
        for (const MethodRun& other : runs)
          if (!other.per_mission[t].count(k)) { have_all = false; break; }
        if (!have_all || !run.per_mission[t].count(k)) continue;
        ts.push_back(e.t + t_offset);
        truth.push_back(e.truth_velocity);
        est.push_back(run.per_mission[t].at(k));
      }
      t_offset += m.duration_s + 1.0;
    }
    out.reports.push_back(evaluate_series(run.name, ts, truth, est));
  }
  return out;
}

inline EvaluationOutcome cmd_evaluate(const RunConfig& cfg) {
  const std::string mission_dir =
      cfg.mission_dir.empty()
          ? (std::filesystem::path(cfg.out_dir) / "missions").string()
          : cfg.mission_dir;
  const std::vector<Mission> missions = detail::load_mission_dir(mission_dir);
  const MissionSplit split = split_missions(missions, cfg.test_ids);

  std::vector<LoadedModel> models;
  for (const std::string& path : cfg.checkpoints)
    models.push_back(load_model_checkpoint(path, cfg.theta_deg));

  EvaluationOutcome out = evaluate_methods(missions, split, cfg, models);

  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  const std::string hash = config_hash(cfg);
  out.table_path = (dir / "comparison.tsv").string();
  write_comparison_table(out.table_path, out.reports, "ls", hash);
  for (const EvaluationReport& r : out.reports) {
    write_report((dir / ("report_" + r.method + ".txt")).string(), r, hash);
    write_error_norm_series(
        (dir / ("series_" + r.method + ".tsv")).string(), r, hash);
    write_kde_curve((dir / ("kde_" + r.method + ".tsv")).string(), r, hash);
  }
  detail::write_manifest(cfg, "evaluate");
  return out;
}

/// compare == evaluate over multiple checkpoints; kept as its own verb so
/// scripted runs read naturally.
inline EvaluationOutcome cmd_compare(const RunConfig& cfg) {
  if (cfg.checkpoints.empty())
    throw ConfigError("compare requires at least one checkpoint");
  return cmd_evaluate(cfg);
}

// ---------------------------------------------------------------------------
// Real-recording ingestion (schema-mapping file + paired CSV tables)

namespace detail {

inline double unit_scale(const std::string& unit, const std::string& what) {
  if (unit == "s" || unit == "m/s2" || unit == "rad/s" || unit == "m/s")
    return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "g") return 9.80665;
  if (unit == "deg/s") return kPi / 180.0;
  if (unit == "cm/s") return 0.01;
  if (unit == "knots") return 0.514444;
  throw ConfigError("unsupported unit '" + unit + "' for " + what);
}

}  // namespace detail

/// Schema-mapping file: names the time/beam/IMU/truth columns and their
/// units for the two delimited tables of a recording.
inline MissionSchema mission_schema_from_json(const json& j) {
  MissionSchema s;
  try {
    const std::string delim = j.value("delimiter", ",");
    s.delimiter = delim == "\\t" || delim == "tab" ? '\t' : delim.at(0);

    const json& imu = j.at("imu");
    s.imu_force.time = imu.at("time").get<std::string>();
    s.imu_force.columns =
        imu.at("specific_force").get<std::vector<std::string>>();
    s.imu_force.time_scale =
        detail::unit_scale(imu.value("time_unit", "s"), "imu time");
    s.imu_force.value_scale = detail::unit_scale(
        imu.value("specific_force_unit", "m/s2"), "specific force");
    s.imu_force.rate_hz = imu.value("rate_hz", 100.0);
    s.imu_rate = s.imu_force;
    s.imu_rate.columns = imu.at("angular_rate").get<std::vector<std::string>>();
    s.imu_rate.value_scale = detail::unit_scale(
        imu.value("angular_rate_unit", "rad/s"), "angular rate");

    const json& dvl = j.at("dvl");
    s.dvl_beams.time = dvl.at("time").get<std::string>();
    s.dvl_beams.columns = dvl.at("beams").get<std::vector<std::string>>();
    s.dvl_beams.time_scale =
        detail::unit_scale(dvl.value("time_unit", "s"), "dvl time");
    s.dvl_beams.value_scale =
        detail::unit_scale(dvl.value("velocity_unit", "m/s"), "beam velocity");
    s.dvl_beams.rate_hz = dvl.value("rate_hz", 1.0);
    s.dvl_truth = s.dvl_beams;
    s.dvl_truth.columns =
        dvl.at("truth_velocity").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed mission schema: ") + e.what());
  }
  if (s.imu_force.columns.size() != 3 || s.imu_rate.columns.size() != 3 ||
      s.dvl_beams.columns.size() != 4 || s.dvl_truth.columns.size() != 3)
    throw ConfigError("mission schema: wrong column counts");
  return s;
}

inline MissionSchema mission_schema_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open schema file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("schema file '" + path + "' is not valid JSON: " +
                      e.what());
  }
  return mission_schema_from_json(j);
}

/// Discover `<id>_imu.csv` / `<id>_dvl.csv` pairs next to `schema.json` in
/// a directory of real recordings. Beams load as the clean stream; apply
/// the error model before windowing.
inline std::vector<Mission> load_real_mission_dir(const std::string& dir) {
  const std::filesystem::path root(dir);
  if (!std::filesystem::is_directory(root))
    throw DataError("real-data directory '" + dir + "' does not exist");
  const MissionSchema schema =
      mission_schema_from_file((root / "schema.json").string());
  std::vector<std::string> ids;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    const std::string name = entry.path().filename().string();
    const std::string suffix = "_imu.csv";
    if (name.size() > suffix.size() &&
        name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0)
      ids.push_back(name.substr(0, name.size() - suffix.size()));
  }
  std::sort(ids.begin(), ids.end());
  if (ids.empty())
    throw DataError("no '<id>_imu.csv' recordings found in '" + dir + "'");
  std::vector<Mission> missions;
  for (const std::string& id : ids)
    missions.push_back(load_mission((root / (id + "_imu.csv")).string(),
                                    (root / (id + "_dvl.csv")).string(),
                                    schema, id));
  return missions;
}

}  // namespace dvlest
