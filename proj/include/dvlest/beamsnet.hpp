#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"
#include "dvlest/nn/adam.hpp"
#include "dvlest/nn/layers.hpp"
#include "dvlest/nn/tensor.hpp"
#include "dvlest/random.hpp"
#include "dvlest/variant.hpp"

namespace dvlest {

// Shape constants shared with the window builder. The 400-sample IMU window
// is what makes the fully connected input work out: (400-100)/20+1 = 16
// conv positions x 9 channels = 144, plus 12 DVL features = 156.
inline constexpr std::size_t kImuChannels = 6;
inline constexpr std::size_t kImuWindowLen = 400;
inline constexpr std::size_t kPastEpochs = 3;
inline constexpr std::size_t kBeams = 4;
inline constexpr double kLeakySlope = 0.1;

/// One training/evaluation sample. `imu_window` is 6 x 400 for BeamsNetV1,
/// 6 x 1 (the epoch-averaged IMU second) for SNMNN V1, and empty for the
/// DVL-only variants. `past_beams` is 3 past epochs (rows, oldest first)
/// over the 4 beam positions, empty when the variant needs none.
struct WindowedSample {
  double t = 0.0;
  Tensor imu_window;
  Tensor past_beams;
  Vec4 current_beams{0, 0, 0, 0};
  Vec3 target{0, 0, 0};
};

namespace detail {

/// Per-beam arithmetic mean of the 3 past epochs.
inline Vec4 past_beam_mean(const Tensor& past) {
  Vec4 m{0, 0, 0, 0};
  for (std::size_t e = 0; e < kPastEpochs; ++e)
    for (std::size_t j = 0; j < kBeams; ++j) m[j] += past.at(e, j) / 3.0;
  return m;
}

}  // namespace detail

/// The single point where the architecture's residual connection is wired:
/// the raw flattened past-beam features are added onto the (equally sized)
/// DVL convolution branch output before the branch merge. Isolated here so
/// the wiring can be revised in one place.
inline void residual_merge(std::vector<double>& conv_features,
                           const Tensor& raw_past) {
  detail::require(conv_features.size() == raw_past.numel(),
                  "residual_merge: feature sizes differ");
  for (std::size_t i = 0; i < conv_features.size(); ++i)
    conv_features[i] += raw_past.v[i];
}

/// BeamsNet spatial-feature regressors.
///
/// V1 consumes a 4 s IMU window plus the 3 past + current DVL epochs;
/// V2 is the DVL-only variant. Layer dimensions are fixed per variant:
///
///   V1: imu conv 6->9 (k=100, s=20), dvl conv 3->6 (k=3, s=1),
///       fc 156->16, 16->4, 12->3
///   V2: dvl conv 3->6 (k=2, s=2), fc 12->16, 16->4, 12->3
///
/// Hidden fully connected layers use LeakyReLU (slope 0.1); the output
/// layer is linear.
class BeamsNet {
public:
  struct Cache {
    Tensor imu_pre;             // conv pre-activation, 9x16 (V1 only)
    std::vector<double> imu_feat;  // 144 flattened post-activation
    Tensor dvl_pre;             // 6x2
    std::vector<double> dvl_feat;  // 12, after residual merge
    std::vector<double> fc1_in;
    std::vector<double> fc1_pre, h1;
    std::vector<double> fc2_pre, h2;
    std::vector<double> fc3_in;  // h2 ++ mean(past) ++ current, 12
  };

  struct InputGrads {
    Tensor d_imu;
    Tensor d_past;
    Vec4 d_current{0, 0, 0, 0};
  };

  BeamsNet(ModelVariant variant, std::uint64_t seed)
      : variant_(variant) {
    detail::require(is_beamsnet(variant), "BeamsNet: not a BeamsNet variant");
    Rng rng(seed);
    if (variant == ModelVariant::BeamsNetV1) {
      imu_conv = Conv1dLayer("imu_conv", kImuChannels, 9, 100, 20);
      dvl_conv = Conv1dLayer("dvl_conv", kPastEpochs, 6, 3, 1);
      fc1 = DenseLayer("fc1", 156, 16);
    } else {
      dvl_conv = Conv1dLayer("dvl_conv", kPastEpochs, 6, 2, 2);
      fc1 = DenseLayer("fc1", 12, 16);
    }
    fc2 = DenseLayer("fc2", 16, 4);
    fc3 = DenseLayer("fc3", 12, 3);
    if (variant == ModelVariant::BeamsNetV1) imu_conv.init(rng);
    dvl_conv.init(rng);
    fc1.init(rng);
    fc2.init(rng);
    fc3.init(rng);
  }

  ModelVariant variant() const { return variant_; }

  std::vector<Param*> params() {
    std::vector<Param*> ps;
    if (variant_ == ModelVariant::BeamsNetV1)
      for (Param* p : imu_conv.params()) ps.push_back(p);
    for (Param* p : dvl_conv.params()) ps.push_back(p);
    for (Param* p : fc1.params()) ps.push_back(p);
    for (Param* p : fc2.params()) ps.push_back(p);
    for (Param* p : fc3.params()) ps.push_back(p);
    return ps;
  }

  Vec3 forward(const WindowedSample& s, Cache& c) const {
    detail::require(s.past_beams.shape ==
                        std::vector<std::size_t>({kPastEpochs, kBeams}),
                    "BeamsNet: past_beams must be 3x4, got " +
                        s.past_beams.shape_str());
    if (variant_ == ModelVariant::BeamsNetV1) {
      detail::require(
          s.imu_window.shape ==
              std::vector<std::size_t>({kImuChannels, kImuWindowLen}),
          "BeamsNetV1: imu_window must be 6x400, got " +
              s.imu_window.shape_str());
      c.imu_pre = imu_conv.forward(s.imu_window);
      c.imu_feat = c.imu_pre.v;
      apply_activation(Activation::LeakyRelu, c.imu_feat, kLeakySlope);
    } else {
      c.imu_feat.clear();
    }

    c.dvl_pre = dvl_conv.forward(s.past_beams);
    c.dvl_feat = c.dvl_pre.v;
    apply_activation(Activation::LeakyRelu, c.dvl_feat, kLeakySlope);
    residual_merge(c.dvl_feat, s.past_beams);

    c.fc1_in = c.imu_feat;
    c.fc1_in.insert(c.fc1_in.end(), c.dvl_feat.begin(), c.dvl_feat.end());

    c.fc1_pre = fc1.forward(c.fc1_in);
    c.h1 = c.fc1_pre;
    apply_activation(Activation::LeakyRelu, c.h1, kLeakySlope);

    c.fc2_pre = fc2.forward(c.h1);
    c.h2 = c.fc2_pre;
    apply_activation(Activation::LeakyRelu, c.h2, kLeakySlope);

    const Vec4 mean = detail::past_beam_mean(s.past_beams);
    c.fc3_in = c.h2;
    c.fc3_in.insert(c.fc3_in.end(), mean.begin(), mean.end());
    c.fc3_in.insert(c.fc3_in.end(), s.current_beams.begin(),
                    s.current_beams.end());

    const std::vector<double> out = fc3.forward(c.fc3_in);
    return {out[0], out[1], out[2]};
  }

  Vec3 forward(const WindowedSample& s) const {
    Cache c;
    return forward(s, c);
  }

  /// Accumulates parameter gradients for one sample. `dout` is the loss
  /// gradient w.r.t. the 3-vector output. Pass `ig` to also obtain input
  /// gradients (used by the gradient checks).
  void backward(const WindowedSample& s, const Cache& c, const Vec3& dout,
                InputGrads* ig = nullptr) {
    detail::require(!c.fc3_in.empty(),
                    "BeamsNet::backward called without a cached forward");
    const std::vector<double> dz =
        fc3.backward(c.fc3_in, {dout[0], dout[1], dout[2]});

    std::vector<double> dh2(dz.begin(), dz.begin() + 4);
    // dz[4..7] is the past-beam mean path, dz[8..11] the current beams.
    Tensor dpast({kPastEpochs, kBeams});
    for (std::size_t e = 0; e < kPastEpochs; ++e)
      for (std::size_t j = 0; j < kBeams; ++j)
        dpast.at(e, j) = dz[4 + j] / 3.0;
    Vec4 dcurrent{dz[8], dz[9], dz[10], dz[11]};

    for (std::size_t i = 0; i < dh2.size(); ++i)
      dh2[i] *= activate_grad(Activation::LeakyRelu, c.fc2_pre[i], c.h2[i],
                              kLeakySlope);
    std::vector<double> dh1 = fc2.backward(c.h1, dh2);
    for (std::size_t i = 0; i < dh1.size(); ++i)
      dh1[i] *= activate_grad(Activation::LeakyRelu, c.fc1_pre[i], c.h1[i],
                              kLeakySlope);
    const std::vector<double> dx = fc1.backward(c.fc1_in, dh1);

    const std::size_t imu_n = c.imu_feat.size();
    if (variant_ == ModelVariant::BeamsNetV1) {
      Tensor d_imu_pre = c.imu_pre;  // reuse shape
      for (std::size_t i = 0; i < imu_n; ++i)
        d_imu_pre.v[i] = dx[i] * activate_grad(Activation::LeakyRelu,
                                               c.imu_pre.v[i], c.imu_feat[i],
                                               kLeakySlope);
      Tensor d_imu = imu_conv.backward(s.imu_window, d_imu_pre, ig != nullptr);
      if (ig) ig->d_imu = std::move(d_imu);
    } else if (ig) {
      ig->d_imu = Tensor();  // no IMU path: gradient identically zero
    }

    Tensor d_dvl_pre = c.dvl_pre;
    for (std::size_t i = 0; i < d_dvl_pre.numel(); ++i) {
      const double d = dx[imu_n + i];
      // residual path: the raw past-beam features feed the merge directly
      dpast.v[i] += d;
      d_dvl_pre.v[i] = d * activate_grad(Activation::LeakyRelu, c.dvl_pre.v[i],
                                         0.0, kLeakySlope);
    }
    Tensor d_past_conv =
        dvl_conv.backward(s.past_beams, d_dvl_pre, ig != nullptr);
    if (ig) {
      for (std::size_t i = 0; i < dpast.numel(); ++i)
        dpast.v[i] += d_past_conv.v[i];
      ig->d_past = std::move(dpast);
      ig->d_current = dcurrent;
    }
  }

  Conv1dLayer imu_conv;  // V1 only; empty for V2
  Conv1dLayer dvl_conv;
  DenseLayer fc1, fc2, fc3;

private:
  ModelVariant variant_;
};

struct BeamsNetTrainConfig {
  double lr = 0.01;
  std::size_t batch_size = 256;
  std::size_t epochs = 250;
  std::size_t decay_epoch = 210;  // 0-based epoch index at which lr drops
  double decay_factor = 0.1;
  std::uint64_t seed = 1;

  static BeamsNetTrainConfig defaults(ModelVariant v) {
    BeamsNetTrainConfig c;
    if (v == ModelVariant::BeamsNetV2) {
      c.epochs = 300;
      c.decay_epoch = 255;
    }
    return c;
  }
};

struct EpochStats {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double lr = 0.0;
};

/// Owns a model plus its optimizer state so interrupted runs can resume
/// with the epoch counter intact.
class BeamsNetTrainer {
public:
  BeamsNetTrainer(ModelVariant variant, const BeamsNetTrainConfig& cfg)
      : cfg_(cfg),
        model_(variant, cfg.seed),
        adam_(AdamConfig{cfg.lr}, model_.params()),
        decay_{cfg.decay_epoch, cfg.decay_factor, false} {}

  /// Runs epochs [epochs_done, cfg.epochs). Mini-batches of cfg.batch_size
  /// with a per-epoch reshuffle derived from (seed, epoch), so a resumed
  /// run sees the same permutations as an uninterrupted one.
  std::vector<EpochStats> train(const std::vector<WindowedSample>& samples) {
    detail::require(!samples.empty(), "train_beamsnet: empty training set");
    std::vector<EpochStats> log;
    std::vector<std::size_t> order(samples.size());
    const std::vector<Param*> params = model_.params();
    Cache_t cache;
    for (std::size_t epoch = epochs_done_; epoch < cfg_.epochs; ++epoch) {
      decay_.maybe_apply(adam_, epoch);
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng shuffle_rng(Rng::mix(cfg_.seed, 0xe90c0000ULL + epoch));
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);

      double epoch_loss = 0.0;
      for (std::size_t start = 0; start < order.size();
           start += cfg_.batch_size) {
        const std::size_t end =
            std::min(order.size(), start + cfg_.batch_size);
        const double inv_n = 1.0 / static_cast<double>(end - start);
        zero_grads(params);
        for (std::size_t k = start; k < end; ++k) {
          const WindowedSample& s = samples[order[k]];
          const Vec3 out = model_.forward(s, cache);
          const MseResult mse =
              mse_loss({out[0], out[1], out[2]},
                       {s.target[0], s.target[1], s.target[2]});
          epoch_loss += mse.loss;
          const Vec3 dout{mse.grad[0] * inv_n, mse.grad[1] * inv_n,
                          mse.grad[2] * inv_n};
          model_.backward(s, cache, dout);
        }
        adam_.step(params);
      }
      epoch_loss /= static_cast<double>(samples.size());
      if (!std::isfinite(epoch_loss))
        throw DivergenceError("beamsnet training diverged", epoch);
      log.push_back({epoch, epoch_loss, adam_.lr()});
      epochs_done_ = epoch + 1;
    }
    return log;
  }

  BeamsNet& model() { return model_; }
  const BeamsNet& model() const { return model_; }
  Adam& adam() { return adam_; }
  const Adam& adam() const { return adam_; }
  const BeamsNetTrainConfig& config() const { return cfg_; }
  std::size_t epochs_done() const { return epochs_done_; }
  void restore_progress(std::size_t epochs_done, bool decay_applied) {
    epochs_done_ = epochs_done;
    decay_.applied = decay_applied;
  }
  bool decay_applied() const { return decay_.applied; }
  /// Raise the training target when resuming beyond the checkpoint's plan.
  void set_target_epochs(std::size_t epochs) { cfg_.epochs = epochs; }

private:
  using Cache_t = BeamsNet::Cache;
  BeamsNetTrainConfig cfg_;
  BeamsNet model_;
  Adam adam_;
  LrDecay decay_;
  std::size_t epochs_done_ = 0;
};

}  // namespace dvlest
