// Command-line entry point: simulate missions, train the estimators,
// evaluate and compare them against the least-squares baseline.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dvlest/runner.hpp"

namespace {

struct FlagOverrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> model;
  std::optional<double> theta_deg;
  std::optional<double> bias;
  std::optional<double> noise_std;
  std::optional<std::string> mission_dir;
  std::optional<std::string> resume;
  std::vector<std::string> checkpoints;
};

dvlest::RunConfig effective_config(const FlagOverrides& f) {
  dvlest::RunConfig cfg = f.config_path.empty()
                              ? dvlest::RunConfig{}
                              : dvlest::RunConfig::from_file(f.config_path);
  if (f.seed) cfg.seed = *f.seed;
  if (f.out_dir) cfg.out_dir = *f.out_dir;
  if (f.model) cfg.model = *f.model;
  if (f.theta_deg) cfg.theta_deg = *f.theta_deg;
  if (f.bias) cfg.bias_mps = *f.bias;
  if (f.noise_std) cfg.noise_std_mps = *f.noise_std;
  if (f.mission_dir) cfg.mission_dir = *f.mission_dir;
  if (f.resume) cfg.resume = *f.resume;
  if (!f.checkpoints.empty()) cfg.checkpoints = f.checkpoints;
  return cfg;
}

void add_common_flags(CLI::App* cmd, FlagOverrides& f) {
  cmd->add_option("--config", f.config_path, "JSON run-config file");
  cmd->add_option("--seed", f.seed, "override the run seed");
  cmd->add_option("--out", f.out_dir, "output directory");
  cmd->add_option("--model", f.model,
                  "model variant (beamsnet-v1|beamsnet-v2|snmnn-v1|snmnn-v2)");
  cmd->add_option("--theta-deg", f.theta_deg, "beam pitch angle in degrees");
  cmd->add_option("--bias", f.bias, "beam bias in m/s");
  cmd->add_option("--noise-std", f.noise_std, "beam noise sigma in m/s");
  cmd->add_option("--missions", f.mission_dir, "mission (.dvm) directory");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"DVL velocity estimation: least-squares baseline and learned "
               "regressors"};
  app.require_subcommand(1);

  FlagOverrides flags;
  CLI::App* simulate =
      app.add_subcommand("simulate", "synthesize and corrupt mission files");
  CLI::App* train = app.add_subcommand("train", "train a model variant");
  CLI::App* evaluate =
      app.add_subcommand("evaluate", "score LS and checkpoints on the test split");
  CLI::App* compare =
      app.add_subcommand("compare", "evaluate over multiple checkpoints");
  for (CLI::App* cmd : {simulate, train, evaluate, compare})
    add_common_flags(cmd, flags);
  train->add_option("--resume", flags.resume, "checkpoint to continue from");
  for (CLI::App* cmd : {evaluate, compare})
    cmd->add_option("--checkpoint", flags.checkpoints,
                    "model checkpoint path (repeatable)");

  CLI11_PARSE(app, argc, argv);

  try {
    const dvlest::RunConfig cfg = effective_config(flags);
    if (simulate->parsed()) {
      dvlest::cmd_simulate(cfg);
      std::printf("wrote %zu missions to %s/missions (config %s)\n",
                  cfg.n_missions, cfg.out_dir.c_str(),
                  dvlest::config_hash(cfg).c_str());
    } else if (train->parsed()) {
      const dvlest::TrainOutcome out = dvlest::cmd_train(cfg);
      std::printf("trained %s for %zu epochs, final loss %.6g\n",
                  cfg.model.c_str(), out.epoch_loss.size(),
                  out.epoch_loss.empty() ? 0.0 : out.epoch_loss.back());
      std::printf("checkpoint: %s\n", out.checkpoint_path.c_str());
    } else {
      const dvlest::EvaluationOutcome out = compare->parsed()
                                                ? dvlest::cmd_compare(cfg)
                                                : dvlest::cmd_evaluate(cfg);
      std::printf("%-14s %10s %10s %8s %8s\n", "method", "rmse", "mae", "vaf",
                  "r2");
      for (const dvlest::EvaluationReport& r : out.reports)
        std::printf("%-14s %10.4f %10.4f %8.2f %8.4f\n", r.method.c_str(),
                    r.rmse, r.mae, r.vaf, r.r2);
      std::printf("table: %s\n", out.table_path.c_str());
    }
  } catch (const dvlest::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return dvlest::kConfigExit;
  } catch (const dvlest::DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return dvlest::kDataExit;
  } catch (const dvlest::DivergenceError& e) {
    std::fprintf(stderr, "divergence: %s\n", e.what());
    return dvlest::kDivergenceExit;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return dvlest::kFailure;
  }
  return dvlest::kOk;
}
