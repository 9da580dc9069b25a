#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

#include "dvlest/nn/checkpoint.hpp"
#include "test_support.hpp"

using namespace dvlest;

namespace {

std::string temp_path(const std::string& name) {
  const auto dir =
      std::filesystem::temp_directory_path() / "dvlest_checkpoint_test";
  std::filesystem::create_directories(dir);
  return (dir / name).string();
}

WindowedSample tiny_sample(Rng& rng, bool with_imu) {
  WindowedSample s;
  s.past_beams = Tensor({kPastEpochs, kBeams});
  for (double& v : s.past_beams.v) v = rng.uniform_sym();
  for (double& v : s.current_beams) v = rng.uniform_sym();
  for (double& v : s.target) v = rng.uniform_sym();
  if (with_imu) {
    s.imu_window = Tensor({kImuChannels, kImuWindowLen});
    for (double& v : s.imu_window.v) v = 0.1 * rng.uniform_sym();
  }
  return s;
}

}  // namespace

TEST_CASE("beamsnet checkpoint round trip is bit-exact") {
  Rng rng(1);
  std::vector<WindowedSample> set;
  for (int i = 0; i < 16; ++i) set.push_back(tiny_sample(rng, false));

  BeamsNetTrainConfig cfg =
      BeamsNetTrainConfig::defaults(ModelVariant::BeamsNetV2);
  cfg.epochs = 4;
  cfg.seed = 33;
  BeamsNetTrainer trainer(ModelVariant::BeamsNetV2, cfg);
  trainer.train(set);

  const std::string path = temp_path("bv2.json");
  save_checkpoint(path, trainer, 30.0, "deadbeef");
  auto restored = load_beamsnet_checkpoint(path);

  const auto a = trainer.model().params();
  const auto b = restored->model().params();
  REQUIRE(a.size() == b.size());
  for (std::size_t p = 0; p < a.size(); ++p) {
    REQUIRE(a[p]->name == b[p]->name);
    for (std::size_t i = 0; i < a[p]->numel(); ++i)
      REQUIRE(a[p]->w[i] == b[p]->w[i]);
  }
  REQUIRE(restored->adam().steps() == trainer.adam().steps());
  REQUIRE(restored->adam().lr() == trainer.adam().lr());
  for (std::size_t p = 0; p < a.size(); ++p)
    for (std::size_t i = 0; i < a[p]->numel(); ++i) {
      REQUIRE(restored->adam().m()[p][i] == trainer.adam().m()[p][i]);
      REQUIRE(restored->adam().v()[p][i] == trainer.adam().v()[p][i]);
    }
  REQUIRE(restored->epochs_done() == 4);

  const CheckpointInfo info = peek_checkpoint(path);
  CHECK(info.model == "beamsnet-v2");
  CHECK(info.theta_deg == 30.0);
}

TEST_CASE("resume continues the epoch counter") {
  Rng rng(2);
  std::vector<WindowedSample> set;
  for (int i = 0; i < 16; ++i) set.push_back(tiny_sample(rng, false));

  BeamsNetTrainConfig cfg =
      BeamsNetTrainConfig::defaults(ModelVariant::BeamsNetV2);
  cfg.epochs = 6;
  cfg.seed = 5;

  // uninterrupted run
  BeamsNetTrainer full(ModelVariant::BeamsNetV2, cfg);
  const auto full_log = full.train(set);

  // interrupted at epoch 3, checkpointed, resumed to the same target
  BeamsNetTrainConfig half = cfg;
  half.epochs = 3;
  BeamsNetTrainer first(ModelVariant::BeamsNetV2, half);
  first.train(set);
  const std::string path = temp_path("resume.json");
  save_checkpoint(path, first, 30.0);

  auto resumed = load_beamsnet_checkpoint(path);
  REQUIRE(resumed->epochs_done() == 3);
  resumed->set_target_epochs(6);
  const auto log2 = resumed->train(set);
  REQUIRE(log2.size() == 3);
  CHECK(log2.front().epoch == 3);  // the counter continued
  CHECK(log2.back().epoch == 5);

  // per-epoch shuffles are derived from (seed, epoch) and the checkpoint is
  // bit-exact, so the resumed run reproduces the uninterrupted one
  const auto pa = full.model().params();
  const auto pb = resumed->model().params();
  for (std::size_t p = 0; p < pa.size(); ++p)
    for (std::size_t i = 0; i < pa[p]->numel(); ++i)
      REQUIRE(pa[p]->w[i] == pb[p]->w[i]);
  for (std::size_t i = 0; i < full_log.size(); ++i)
    if (i >= 3) REQUIRE(full_log[i].mean_loss == log2[i - 3].mean_loss);
}

TEST_CASE("snmnn checkpoint round trip preserves alphas and gamma") {
  SnmnnConfig cfg = SnmnnConfig::defaults(ModelVariant::SnmnnV1);
  cfg.epochs = 1;
  cfg.spectral.gamma = 2.5;
  cfg.bptt_depth = 3;
  SnmnnTrainer trainer(ModelVariant::SnmnnV1, cfg);

  Rng rng(3);
  SnmnnSequence seq;
  seq.mission_id = "s";
  for (int i = 0; i < 20; ++i) {
    SnmnnSample s;
    s.t = i;
    s.input = testsupport::random_vector(10, rng);
    s.target = {rng.uniform_sym(), rng.uniform_sym(), rng.uniform_sym()};
    seq.steps.push_back(std::move(s));
  }
  trainer.train({seq});

  const std::string path = temp_path("snmnn.json");
  save_checkpoint(path, trainer, 25.0, "feed");
  auto restored = load_snmnn_checkpoint(path);

  REQUIRE(restored->config().spectral.gamma == 2.5);
  REQUIRE(restored->config().bptt_depth == 3);
  REQUIRE(restored->epochs_done() == 1);
  const auto a = trainer.model().params();
  const auto b = restored->model().params();
  for (std::size_t p = 0; p < a.size(); ++p)
    for (std::size_t i = 0; i < a[p]->numel(); ++i)
      REQUIRE(a[p]->w[i] == b[p]->w[i]);

  // restored model predicts identically
  const auto pa = trainer.model().predict(seq);
  const auto pb = restored->model().predict(seq);
  for (std::size_t i = 0; i < pa.size(); ++i)
    for (int c = 0; c < 3; ++c) REQUIRE(pa[i][c] == pb[i][c]);
}

TEST_CASE("wrong-family checkpoints are rejected") {
  SnmnnConfig cfg = SnmnnConfig::defaults(ModelVariant::SnmnnV2);
  cfg.epochs = 0;
  SnmnnTrainer trainer(ModelVariant::SnmnnV2, cfg);
  const std::string path = temp_path("family.json");
  save_checkpoint(path, trainer, 30.0);
  CHECK_THROWS_AS(load_beamsnet_checkpoint(path), DataError);
}
