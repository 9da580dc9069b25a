#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <deque>
#include <functional>
#include <string>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"
#include "dvlest/nn/layers.hpp"
#include "dvlest/nn/spectral.hpp"
#include "dvlest/random.hpp"
#include "dvlest/variant.hpp"

namespace dvlest {

/// One time step of an SNMNN evaluation stream.
struct SnmnnSample {
  double t = 0.0;
  std::vector<double> input;  // 10 (V1) or 16 (V2) values
  Vec3 target{0, 0, 0};
};

/// A time-ordered mission sequence. Memory is reset at the start of each
/// sequence and carried across its steps.
struct SnmnnSequence {
  std::string mission_id;
  std::vector<SnmnnSample> steps;
};

struct SnmnnConfig {
  double lr_weights = 0.006;  // W_NN and W_MN
  double lr_alpha = 0.092;    // memory coefficients
  std::size_t epochs = 50;    // 50 for V1, 60 for V2
  std::size_t bptt_depth = 1; // truncation depth T of the memory recurrence
  SpectralNormConfig spectral{1.0, 2, 30};
  std::uint64_t seed = 1;

  static SnmnnConfig defaults(ModelVariant v) {
    SnmnnConfig c;
    if (v == ModelVariant::SnmnnV2) c.epochs = 60;
    return c;
  }
};

/// Spectrally normalized memory neuron network.
///
/// Three layers (input, one tanh hidden, linear output). Every network
/// neuron is paired with one memory neuron holding an exponentially
/// smoothed copy of its past output:
///
///   m_j(t) = alpha_j * z_j(t-1) + (1 - alpha_j) * m_j(t-1)
///
/// and each layer's pre-activation reads the previous layer's current
/// outputs through W_NN and its memory values through W_MN:
///
///   a(t) = W_NN * z_prev_layer(t) + W_MN * m_prev_layer(t)
///
/// Output-layer memories are updated by the same recurrence (one memory
/// neuron per network neuron across all three layers) but feed nothing
/// downstream, so their coefficients keep zero gradient.
///
/// V1 takes 10 inputs (6 epoch-averaged IMU channels + 4 current beams)
/// into 50 hidden neurons; V2 takes 16 inputs (beams of epochs t-3..t,
/// oldest first) into 60 hidden neurons. Both output the 3-vector body
/// velocity.
class Snmnn {
public:
  struct State {
    std::vector<double> m_in, m_hid, m_out;      // memory values
    std::vector<double> z_in, z_hid, z_out;      // previous step's outputs

    void reset() {
      auto zero = [](std::vector<double>& v) {
        std::fill(v.begin(), v.end(), 0.0);
      };
      zero(m_in); zero(m_hid); zero(m_out);
      zero(z_in); zero(z_hid); zero(z_out);
    }
  };

  Snmnn(ModelVariant variant, std::uint64_t seed) : variant_(variant) {
    detail::require(!is_beamsnet(variant), "Snmnn: not an SNMNN variant");
    in_ = (variant == ModelVariant::SnmnnV1) ? 10 : 16;
    hidden_ = (variant == ModelVariant::SnmnnV1) ? 50 : 60;
    W1 = Param("W_nn.in_hid", {hidden_, in_});
    F1 = Param("W_mn.in_hid", {hidden_, in_});
    W2 = Param("W_nn.hid_out", {kOut, hidden_});
    F2 = Param("W_mn.hid_out", {kOut, hidden_});
    alpha_in = Param("alpha.in", {in_});
    alpha_hid = Param("alpha.hid", {hidden_});
    alpha_out = Param("alpha.out", {kOut});
    Rng rng(seed);
    W1.init_uniform(rng, in_);
    F1.init_uniform(rng, in_);
    W2.init_uniform(rng, hidden_);
    F2.init_uniform(rng, hidden_);
    // 0.5: maximally uncommitted memory mixing
    std::fill(alpha_in.w.begin(), alpha_in.w.end(), 0.5);
    std::fill(alpha_hid.w.begin(), alpha_hid.w.end(), 0.5);
    std::fill(alpha_out.w.begin(), alpha_out.w.end(), 0.5);
  }

  ModelVariant variant() const { return variant_; }
  std::size_t input_dim() const { return in_; }
  std::size_t hidden_dim() const { return hidden_; }

  std::vector<Param*> weight_params() { return {&W1, &F1, &W2, &F2}; }
  std::vector<Param*> alpha_params() {
    return {&alpha_in, &alpha_hid, &alpha_out};
  }
  std::vector<Param*> params() {
    return {&W1, &F1, &W2, &F2, &alpha_in, &alpha_hid, &alpha_out};
  }

  State make_state() const {
    State s;
    s.m_in.assign(in_, 0.0);
    s.m_hid.assign(hidden_, 0.0);
    s.m_out.assign(kOut, 0.0);
    s.z_in.assign(in_, 0.0);
    s.z_hid.assign(hidden_, 0.0);
    s.z_out.assign(kOut, 0.0);
    return s;
  }

  /// Everything backward needs about one step: the memory values used by
  /// the step plus the pre-update quantities that produced them.
  struct StepCache {
    std::vector<double> x;
    std::vector<double> m_in, m_hid, m_out;           // post-update (used)
    std::vector<double> z_in_prev, z_hid_prev, z_out_prev;
    std::vector<double> m_in_prev, m_hid_prev, m_out_prev;
    std::vector<double> z1;  // hidden activations
    Vec3 y{0, 0, 0};
  };

  /// Advances the stream by one epoch: memory update, then forward.
  Vec3 step(const std::vector<double>& x, State& st,
            StepCache* cache = nullptr) const {
    detail::require(x.size() == in_, "snmnn step: expected input of length " +
                                         std::to_string(in_) + ", got " +
                                         std::to_string(x.size()));
    if (cache) {
      cache->x = x;
      cache->z_in_prev = st.z_in;
      cache->z_hid_prev = st.z_hid;
      cache->z_out_prev = st.z_out;
      cache->m_in_prev = st.m_in;
      cache->m_hid_prev = st.m_hid;
      cache->m_out_prev = st.m_out;
    }
    update_memory(alpha_in.w, st.z_in, st.m_in);
    update_memory(alpha_hid.w, st.z_hid, st.m_hid);
    update_memory(alpha_out.w, st.z_out, st.m_out);

    std::vector<double> z1(hidden_);
    for (std::size_t h = 0; h < hidden_; ++h) {
      double a = 0.0;
      const double* w = &W1.w[h * in_];
      const double* f = &F1.w[h * in_];
      for (std::size_t i = 0; i < in_; ++i) a += w[i] * x[i] + f[i] * st.m_in[i];
      z1[h] = std::tanh(a);
    }
    Vec3 y{0, 0, 0};
    for (std::size_t o = 0; o < kOut; ++o) {
      double a = 0.0;
      const double* w = &W2.w[o * hidden_];
      const double* f = &F2.w[o * hidden_];
      for (std::size_t h = 0; h < hidden_; ++h)
        a += w[h] * z1[h] + f[h] * st.m_hid[h];
      y[o] = a;
    }

    if (cache) {
      cache->m_in = st.m_in;
      cache->m_hid = st.m_hid;
      cache->m_out = st.m_out;
      cache->z1 = z1;
      cache->y = y;
    }
    st.z_in = x;
    st.z_hid = std::move(z1);
    st.z_out = {y[0], y[1], y[2]};
    return y;
  }

  /// Output for input x at the given state without advancing the stream.
  Vec3 probe(const std::vector<double>& x, const State& st) const {
    State copy = st;
    return step(x, copy);
  }

  /// Stateful prediction over a whole mission; memory starts from zero.
  std::vector<Vec3> predict(const SnmnnSequence& seq) const {
    State st = make_state();
    std::vector<Vec3> out;
    out.reserve(seq.steps.size());
    for (const SnmnnSample& s : seq.steps) out.push_back(step(s.input, st));
    return out;
  }

  /// Truncated backpropagation over the cached window (most recent step
  /// last). The loss gradient `dy_last` applies to the final step; memory
  /// entering the window is treated as constant. Each window step includes
  /// its own memory update, which is where the alpha gradients come from.
  /// Accumulates into the Param gradient buffers.
  void backward_window(const std::deque<StepCache>& window,
                       const Vec3& dy_last) {
    detail::require(!window.empty(),
                    "snmnn backward called without cached forward steps");
    std::vector<double> dm_in_next(in_, 0.0), dm_hid_next(hidden_, 0.0),
        dm_out_next(kOut, 0.0);
    std::vector<double> dz1_from_future(hidden_, 0.0);
    std::vector<double> dy_from_future(kOut, 0.0);
    std::vector<double> dah(hidden_), dy(kOut);

    for (std::size_t idx = window.size(); idx-- > 0;) {
      const StepCache& c = window[idx];
      const bool last = (idx + 1 == window.size());
      for (std::size_t o = 0; o < kOut; ++o)
        dy[o] = (last ? dy_last[o] : 0.0) + dy_from_future[o];

      // output layer: y = W2 z1 + F2 m_hid
      std::vector<double> dz1(hidden_, 0.0);
      for (std::size_t o = 0; o < kOut; ++o) {
        const double d = dy[o];
        double* w2g = &W2.g[o * hidden_];
        double* f2g = &F2.g[o * hidden_];
        const double* w2 = &W2.w[o * hidden_];
        for (std::size_t h = 0; h < hidden_; ++h) {
          w2g[h] += d * c.z1[h];
          f2g[h] += d * c.m_hid[h];
          dz1[h] += d * w2[h];
        }
      }
      for (std::size_t h = 0; h < hidden_; ++h) dz1[h] += dz1_from_future[h];

      // total gradient w.r.t. the memory values used this step
      std::vector<double> dm_hid(hidden_, 0.0);
      for (std::size_t o = 0; o < kOut; ++o) {
        const double d = dy[o];
        const double* f2 = &F2.w[o * hidden_];
        for (std::size_t h = 0; h < hidden_; ++h) dm_hid[h] += d * f2[h];
      }
      for (std::size_t h = 0; h < hidden_; ++h)
        dm_hid[h] += (1.0 - alpha_hid.w[h]) * dm_hid_next[h];

      // hidden layer: z1 = tanh(W1 x + F1 m_in)
      for (std::size_t h = 0; h < hidden_; ++h)
        dah[h] = dz1[h] * (1.0 - c.z1[h] * c.z1[h]);
      std::vector<double> dm_in(in_, 0.0);
      for (std::size_t h = 0; h < hidden_; ++h) {
        const double d = dah[h];
        double* w1g = &W1.g[h * in_];
        double* f1g = &F1.g[h * in_];
        const double* f1 = &F1.w[h * in_];
        for (std::size_t i = 0; i < in_; ++i) {
          w1g[i] += d * c.x[i];
          f1g[i] += d * c.m_in[i];
          dm_in[i] += d * f1[i];
        }
      }
      for (std::size_t i = 0; i < in_; ++i)
        dm_in[i] += (1.0 - alpha_in.w[i]) * dm_in_next[i];

      std::vector<double> dm_out(kOut, 0.0);
      for (std::size_t o = 0; o < kOut; ++o)
        dm_out[o] = (1.0 - alpha_out.w[o]) * dm_out_next[o];

      // this step's memory update: m = alpha z_prev + (1 - alpha) m_prev
      for (std::size_t i = 0; i < in_; ++i)
        alpha_in.g[i] += dm_in[i] * (c.z_in_prev[i] - c.m_in_prev[i]);
      for (std::size_t h = 0; h < hidden_; ++h)
        alpha_hid.g[h] += dm_hid[h] * (c.z_hid_prev[h] - c.m_hid_prev[h]);
      for (std::size_t o = 0; o < kOut; ++o)
        alpha_out.g[o] += dm_out[o] * (c.z_out_prev[o] - c.m_out_prev[o]);

      // hand off to the previous window step: its outputs are this step's
      // z_prev, its memories are (1 - alpha)-damped
      for (std::size_t h = 0; h < hidden_; ++h) {
        dz1_from_future[h] = alpha_hid.w[h] * dm_hid[h];
        dm_hid_next[h] = dm_hid[h];
      }
      for (std::size_t o = 0; o < kOut; ++o) {
        dy_from_future[o] = alpha_out.w[o] * dm_out[o];
        dm_out_next[o] = dm_out[o];
      }
      for (std::size_t i = 0; i < in_; ++i) dm_in_next[i] = dm_in[i];
      // d x_{s-1} via alpha_in * dm_in would go here; inputs are data.
    }
  }

  /// Rescale all four weight matrices to spectral norm gamma^(1/L).
  void project_weights(const SpectralNormConfig& cfg) {
    normalize_weights(W1.w, hidden_, in_, cfg, &pi_w1_);
    normalize_weights(F1.w, hidden_, in_, cfg, &pi_f1_);
    normalize_weights(W2.w, kOut, hidden_, cfg, &pi_w2_);
    normalize_weights(F2.w, kOut, hidden_, cfg, &pi_f2_);
  }

  void clamp_alpha() {
    auto clamp = [](Param& p) {
      for (double& a : p.w) a = std::clamp(a, 1e-4, 1.0 - 1e-4);
    };
    clamp(alpha_in);
    clamp(alpha_hid);
    clamp(alpha_out);
  }

  static constexpr std::size_t kOut = 3;

  Param W1, F1;  // input -> hidden network / memory weights
  Param W2, F2;  // hidden -> output network / memory weights
  Param alpha_in, alpha_hid, alpha_out;

private:
  static void update_memory(const std::vector<double>& alpha,
                            const std::vector<double>& z_prev,
                            std::vector<double>& m) {
    for (std::size_t j = 0; j < m.size(); ++j)
      m[j] = alpha[j] * z_prev[j] + (1.0 - alpha[j]) * m[j];
  }

  ModelVariant variant_;
  std::size_t in_ = 0, hidden_ = 0;
  detail::PowerIterState pi_w1_, pi_f1_, pi_w2_, pi_f2_;
};

struct EpochStatsSnmnn {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
};

/// Online training: one SGD update per time step from the truncated-window
/// gradient of that step's loss, followed by the spectral projection. Two
/// learning rates: one for the weight matrices, one for the memory
/// coefficients (clamped to [1e-4, 1 - 1e-4] after each update).
class SnmnnTrainer {
public:
  SnmnnTrainer(ModelVariant variant, const SnmnnConfig& cfg)
      : cfg_(cfg), model_(variant, cfg.seed) {
    // Start on the constraint surface so the spectral contract holds from
    // the very first step.
    model_.project_weights(cfg_.spectral);
  }

  std::vector<EpochStatsSnmnn> train(const std::vector<SnmnnSequence>& seqs) {
    detail::require(!seqs.empty(), "snmnn_train: empty training set");
    for (const SnmnnSequence& q : seqs) {
      for (std::size_t i = 1; i < q.steps.size(); ++i)
        if (!(q.steps[i].t > q.steps[i - 1].t))
          throw DataError("snmnn_train: sequence '" + q.mission_id +
                          "' is not time-ordered");
    }
    std::vector<EpochStatsSnmnn> log;
    std::vector<std::size_t> order(seqs.size());
    const std::vector<Param*> all = model_.params();
    for (std::size_t epoch = epochs_done_; epoch < cfg_.epochs; ++epoch) {
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      Rng shuffle_rng(Rng::mix(cfg_.seed, 0x53aa0000ULL + epoch));
      for (std::size_t i = order.size(); i > 1; --i)
        std::swap(order[i - 1], order[shuffle_rng.below(i)]);

      double loss_sum = 0.0;
      std::size_t n_steps = 0;
      for (std::size_t qi : order) {
        const SnmnnSequence& seq = seqs[qi];
        Snmnn::State st = model_.make_state();
        std::deque<Snmnn::StepCache> window;
        for (const SnmnnSample& s : seq.steps) {
          Snmnn::StepCache cache;
          const Vec3 y = model_.step(s.input, st, &cache);
          window.push_back(std::move(cache));
          if (window.size() > cfg_.bptt_depth) window.pop_front();

          const MseResult mse = mse_loss(
              {y[0], y[1], y[2]}, {s.target[0], s.target[1], s.target[2]});
          loss_sum += mse.loss;
          ++n_steps;

          zero_grads(all);
          model_.backward_window(window,
                                 {mse.grad[0], mse.grad[1], mse.grad[2]});
          for (Param* p : model_.weight_params())
            for (std::size_t i = 0; i < p->numel(); ++i)
              p->w[i] -= cfg_.lr_weights * p->g[i];
          for (Param* p : model_.alpha_params())
            for (std::size_t i = 0; i < p->numel(); ++i)
              p->w[i] -= cfg_.lr_alpha * p->g[i];
          model_.clamp_alpha();
          model_.project_weights(cfg_.spectral);
          if (step_observer_) step_observer_(model_);
        }
      }
      const double mean_loss = loss_sum / static_cast<double>(n_steps);
      if (!std::isfinite(mean_loss))
        throw DivergenceError("snmnn training diverged", epoch);
      log.push_back({epoch, mean_loss});
      epochs_done_ = epoch + 1;
    }
    return log;
  }

  Snmnn& model() { return model_; }
  const Snmnn& model() const { return model_; }
  const SnmnnConfig& config() const { return cfg_; }
  std::size_t epochs_done() const { return epochs_done_; }
  void restore_progress(std::size_t epochs_done) { epochs_done_ = epochs_done; }
  void set_target_epochs(std::size_t epochs) { cfg_.epochs = epochs; }

  /// Called after every parameter update + projection; used by the test
  /// suite to verify the per-step spectral contract.
  void set_step_observer(std::function<void(const Snmnn&)> obs) {
    step_observer_ = std::move(obs);
  }

private:
  SnmnnConfig cfg_;
  Snmnn model_;
  std::size_t epochs_done_ = 0;
  std::function<void(const Snmnn&)> step_observer_;
};

}  // namespace dvlest
