#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/nn/tensor.hpp"
#include "dvlest/random.hpp"

namespace dvlest {

/// One learnable parameter block: values plus the gradient accumulator the
/// training loops and the optimizer share.
struct Param {
  std::string name;
  std::vector<std::size_t> shape;
  std::vector<double> w;
  std::vector<double> g;

  Param() = default;
  Param(std::string n, std::vector<std::size_t> s)
      : name(std::move(n)), shape(std::move(s)) {
    w.assign(Tensor::numel_of(shape), 0.0);
    g.assign(w.size(), 0.0);
  }

  std::size_t numel() const { return w.size(); }
  void zero_grad() { std::fill(g.begin(), g.end(), 0.0); }

  /// Uniform in +-sqrt(1/fan_in); keeps early activations order-1.
  void init_uniform(Rng& rng, std::size_t fan_in) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    for (double& x : w) x = bound * rng.uniform_sym();
  }
};

inline void zero_grads(const std::vector<Param*>& params) {
  for (Param* p : params) p->zero_grad();
}

// ---------------------------------------------------------------------------
// Activations

enum class Activation { LeakyRelu, Tanh, Linear };

inline double activate(Activation a, double x, double slope = 0.1) {
  switch (a) {
    case Activation::LeakyRelu: return x >= 0.0 ? x : slope * x;
    case Activation::Tanh: return std::tanh(x);
    case Activation::Linear: return x;
  }
  return x;
}

/// Derivative expressed through the pre-activation x (leaky) or the cached
/// output y (tanh), whichever is cheaper; both are passed in.
inline double activate_grad(Activation a, double x, double y,
                            double slope = 0.1) {
  switch (a) {
    case Activation::LeakyRelu: return x >= 0.0 ? 1.0 : slope;
    case Activation::Tanh: return 1.0 - y * y;
    case Activation::Linear: return 1.0;
  }
  return 1.0;
}

inline void apply_activation(Activation a, std::vector<double>& x,
                             double slope = 0.1) {
  for (double& e : x) e = activate(a, e, slope);
}

// ---------------------------------------------------------------------------
// Dense layer: y = W x + b, W is out x in row-major.

struct DenseLayer {
  std::size_t in = 0, out = 0;
  Param W, b;

  DenseLayer() = default;
  DenseLayer(std::string name, std::size_t in_dim, std::size_t out_dim)
      : in(in_dim),
        out(out_dim),
        W(name + ".W", {out_dim, in_dim}),
        b(name + ".b", {out_dim}) {}

  void init(Rng& rng) {
    W.init_uniform(rng, in);
    b.init_uniform(rng, in);
  }

  std::vector<double> forward(const std::vector<double>& x) const {
    detail::require(x.size() == in, "dense forward: expected input of length " +
                                        std::to_string(in) + ", got " +
                                        std::to_string(x.size()));
    std::vector<double> y(out);
    for (std::size_t o = 0; o < out; ++o) {
      double s = b.w[o];
      const double* wr = &W.w[o * in];
      for (std::size_t i = 0; i < in; ++i) s += wr[i] * x[i];
      y[o] = s;
    }
    return y;
  }

  /// Accumulates into W.g / b.g; returns gradient w.r.t. the input.
  std::vector<double> backward(const std::vector<double>& x,
                               const std::vector<double>& dy) {
    detail::require(x.size() == in && dy.size() == out,
                    "dense backward: shape mismatch");
    std::vector<double> dx(in, 0.0);
    for (std::size_t o = 0; o < out; ++o) {
      const double d = dy[o];
      b.g[o] += d;
      double* wg = &W.g[o * in];
      const double* wr = &W.w[o * in];
      for (std::size_t i = 0; i < in; ++i) {
        wg[i] += d * x[i];
        dx[i] += d * wr[i];
      }
    }
    return dx;
  }

  std::vector<Param*> params() { return {&W, &b}; }
};

// ---------------------------------------------------------------------------
// 1-d convolution, cross-correlation convention, no padding:
//   out[o][j] = bias[o] + sum_{c,k} K[o][c][k] * in[c][j*stride + k]

struct Conv1dLayer {
  std::size_t in_ch = 0, out_ch = 0, kernel = 0, stride = 1;
  Param K, b;

  Conv1dLayer() = default;
  Conv1dLayer(std::string name, std::size_t in_channels,
              std::size_t out_channels, std::size_t kernel_size,
              std::size_t stride_len)
      : in_ch(in_channels),
        out_ch(out_channels),
        kernel(kernel_size),
        stride(stride_len),
        K(name + ".K", {out_channels, in_channels, kernel_size}),
        b(name + ".b", {out_channels}) {
    detail::require(kernel >= 1 && stride >= 1,
                    "conv1d: kernel and stride must be >= 1");
  }

  void init(Rng& rng) {
    const std::size_t fan_in = in_ch * kernel;
    K.init_uniform(rng, fan_in);
    b.init_uniform(rng, fan_in);
  }

  std::size_t out_len(std::size_t len) const {
    detail::require(len >= kernel, "conv1d: input length " +
                                       std::to_string(len) +
                                       " shorter than kernel " +
                                       std::to_string(kernel));
    return (len - kernel) / stride + 1;
  }

  /// x is in_ch x len row-major; result is out_ch x out_len(len).
  Tensor forward(const Tensor& x) const {
    detail::require(x.shape.size() == 2 && x.dim(0) == in_ch,
                    "conv1d forward: expected " + std::to_string(in_ch) +
                        " channels, got tensor " + x.shape_str());
    const std::size_t len = x.dim(1);
    const std::size_t olen = out_len(len);
    Tensor y({out_ch, olen});
    for (std::size_t o = 0; o < out_ch; ++o) {
      for (std::size_t j = 0; j < olen; ++j) {
        double s = b.w[o];
        const std::size_t base = j * stride;
        for (std::size_t c = 0; c < in_ch; ++c) {
          const double* kp = &K.w[(o * in_ch + c) * kernel];
          const double* xp = &x.v[c * len + base];
          for (std::size_t k = 0; k < kernel; ++k) s += kp[k] * xp[k];
        }
        y.at(o, j) = s;
      }
    }
    return y;
  }

  /// `want_dx = false` skips the input-gradient pass; parameter gradients
  /// are always accumulated.
  Tensor backward(const Tensor& x, const Tensor& dy, bool want_dx = true) {
    const std::size_t len = x.dim(1);
    const std::size_t olen = out_len(len);
    detail::require(dy.shape.size() == 2 && dy.dim(0) == out_ch &&
                        dy.dim(1) == olen,
                    "conv1d backward: upstream gradient shape mismatch");
    Tensor dx;
    if (want_dx) dx = Tensor({in_ch, len});
    for (std::size_t o = 0; o < out_ch; ++o) {
      for (std::size_t j = 0; j < olen; ++j) {
        const double d = dy.at(o, j);
        b.g[o] += d;
        const std::size_t base = j * stride;
        for (std::size_t c = 0; c < in_ch; ++c) {
          double* kg = &K.g[(o * in_ch + c) * kernel];
          const double* xp = &x.v[c * len + base];
          if (want_dx) {
            const double* kp = &K.w[(o * in_ch + c) * kernel];
            double* dxp = &dx.v[c * len + base];
            for (std::size_t k = 0; k < kernel; ++k) {
              kg[k] += d * xp[k];
              dxp[k] += d * kp[k];
            }
          } else {
            for (std::size_t k = 0; k < kernel; ++k) kg[k] += d * xp[k];
          }
        }
      }
    }
    return dx;
  }

  std::vector<Param*> params() { return {&K, &b}; }
};

// ---------------------------------------------------------------------------
// Mean squared error over all elements.

struct MseResult {
  double loss = 0.0;
  std::vector<double> grad;  // d loss / d pred = 2 (pred - target) / N
};

inline MseResult mse_loss(const std::vector<double>& pred,
                          const std::vector<double>& target) {
  detail::require(pred.size() == target.size() && !pred.empty(),
                  "mse_loss: shape mismatch or empty input");
  MseResult r;
  r.grad.resize(pred.size());
  const double n = static_cast<double>(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    r.loss += d * d / n;
    r.grad[i] = 2.0 * d / n;
  }
  return r;
}

}  // namespace dvlest
