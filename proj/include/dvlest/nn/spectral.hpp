#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/random.hpp"

namespace dvlest {

/// Lipschitz budget for spectrally normalized weight stacks: every
/// normalized matrix is rescaled to spectral norm gamma^(1/layers), so the
/// product over the stack composes to gamma.
struct SpectralNormConfig {
  double gamma = 1.0;
  std::size_t layers = 1;
  std::size_t power_iterations = 30;
};

namespace detail {

/// One power-iteration state per normalized matrix. Warm-starting from the
/// previous step's right singular vector makes per-update projections cheap
/// once training is underway.
struct PowerIterState {
  std::vector<double> u;  // right singular vector estimate, length = cols
};

}  // namespace detail

/// Largest singular value of a rows x cols row-major matrix by power
/// iteration on W'W. Stops early once the estimate is stationary to 1e-14
/// relative, runs at most `max_iters` sweeps. A zero matrix has norm 0.
inline double spectral_norm(const double* w, std::size_t rows,
                            std::size_t cols, std::size_t max_iters = 30,
                            detail::PowerIterState* warm = nullptr) {
  std::vector<double> local;
  std::vector<double>& u = warm ? warm->u : local;
  if (u.size() != cols) {
    // Deterministic cold start; seeded off the dimensions so repeated runs
    // are identical.
    Rng rng(0x5eed0000u + rows * 1315423911u + cols);
    u.resize(cols);
    for (double& x : u) x = rng.uniform_sym();
  }
  std::vector<double> wu(rows);
  double sigma = 0.0;
  double prev = -1.0;
  for (std::size_t it = 0; it < max_iters; ++it) {
    // wu = W u
    for (std::size_t r = 0; r < rows; ++r) {
      double s = 0.0;
      const double* row = w + r * cols;
      for (std::size_t c = 0; c < cols; ++c) s += row[c] * u[c];
      wu[r] = s;
    }
    // u = W' wu
    for (std::size_t c = 0; c < cols; ++c) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += w[r * cols + c] * wu[r];
      u[c] = s;
    }
    double nu = 0.0;
    for (double x : u) nu += x * x;
    nu = std::sqrt(nu);
    if (nu == 0.0) return 0.0;  // zero matrix or u in the null space
    for (double& x : u) x /= nu;
    double nwu = 0.0;
    for (double x : wu) nwu += x * x;
    sigma = std::sqrt(nwu);
    if (prev >= 0.0 && std::abs(sigma - prev) <= 1e-14 * sigma) break;
    prev = sigma;
  }
  return sigma;
}

inline double spectral_norm(const std::vector<double>& w, std::size_t rows,
                            std::size_t cols, std::size_t max_iters = 30,
                            detail::PowerIterState* warm = nullptr) {
  detail::require(w.size() == rows * cols, "spectral_norm: size mismatch");
  return spectral_norm(w.data(), rows, cols, max_iters, warm);
}

/// Projection-style spectral weight normalization:
///   W <- (W / rho(W)) * gamma^(1/layers)
/// applied in place after each optimizer step. Zero matrices are left
/// unchanged. Cold starts (no warm vector yet) get a generous iteration
/// budget so the very first projection already lands within tolerance.
inline void normalize_weights(std::vector<double>& w, std::size_t rows,
                              std::size_t cols, const SpectralNormConfig& cfg,
                              detail::PowerIterState* warm = nullptr) {
  detail::require(cfg.gamma > 0.0 && cfg.layers >= 1,
                  "normalize_weights: gamma must be > 0 and layers >= 1");
  const bool cold = !warm || warm->u.size() != cols;
  const std::size_t iters =
      cold ? std::max<std::size_t>(cfg.power_iterations, 512)
           : cfg.power_iterations;
  const double rho = spectral_norm(w.data(), rows, cols, iters, warm);
  if (rho == 0.0) return;
  const double target =
      std::pow(cfg.gamma, 1.0 / static_cast<double>(cfg.layers));
  const double scale = target / rho;
  for (double& x : w) x *= scale;
}

}  // namespace dvlest
