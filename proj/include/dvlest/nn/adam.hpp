#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/nn/layers.hpp"

namespace dvlest {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

/// Standard Adam with bias correction. Moment buffers are laid out to match
/// the parameter list handed to the constructor; the same list (same order)
/// must be used for every step.
class Adam {
public:
  Adam(AdamConfig cfg, const std::vector<Param*>& params) : cfg_(cfg) {
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Param* p : params) {
      m_.emplace_back(p->numel(), 0.0);
      v_.emplace_back(p->numel(), 0.0);
    }
  }

  void step(const std::vector<Param*>& params) {
    detail::require(params.size() == m_.size(),
                    "adam: parameter list does not match optimizer state");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(t_));
    for (std::size_t p = 0; p < params.size(); ++p) {
      Param& par = *params[p];
      std::vector<double>& m = m_[p];
      std::vector<double>& v = v_[p];
      for (std::size_t i = 0; i < par.numel(); ++i) {
        const double g = par.g[i];
        m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g;
        v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g * g;
        const double mhat = m[i] / bc1;
        const double vhat = v[i] / bc2;
        par.w[i] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.epsilon);
      }
    }
  }

  double lr() const { return cfg_.lr; }
  void set_lr(double lr) { cfg_.lr = lr; }
  std::size_t steps() const { return t_; }

  // Checkpoint access.
  const std::vector<std::vector<double>>& m() const { return m_; }
  const std::vector<std::vector<double>>& v() const { return v_; }
  void restore(std::size_t t, double lr, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v) {
    t_ = t;
    cfg_.lr = lr;
    m_ = std::move(m);
    v_ = std::move(v);
  }

private:
  AdamConfig cfg_;
  std::size_t t_ = 0;
  std::vector<std::vector<double>> m_, v_;
};

/// Single-threshold learning-rate schedule: multiply lr by `factor` exactly
/// once when the 0-based epoch index reaches `epoch`. "Decay of 0.1 after
/// 210 epochs" therefore fires at epoch index 210, the 211th epoch.
struct LrDecay {
  std::size_t epoch = 0;
  double factor = 1.0;
  bool applied = false;

  void maybe_apply(Adam& adam, std::size_t current_epoch) {
    if (!applied && factor > 0.0 && current_epoch >= epoch) {
      adam.set_lr(adam.lr() * factor);
      applied = true;
    }
  }
};

}  // namespace dvlest
