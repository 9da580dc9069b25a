#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"

namespace dvlest {

namespace detail {

inline void check_pair(const std::vector<double>& y,
                       const std::vector<double>& yhat) {
  require(y.size() == yhat.size(), "metric inputs differ in length");
  require(!y.empty(), "metric inputs are empty");
}

inline double mean(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

inline double variance(const std::vector<double>& x) {
  const double mu = mean(x);
  double s = 0.0;
  for (double v : x) s += (v - mu) * (v - mu);
  return s / static_cast<double>(x.size());
}

/// Linear-interpolated quantile, q in [0, 1].
inline double quantile(std::vector<double> x, double q) {
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] * (1.0 - frac) + x[hi] * frac;
}

}  // namespace detail

/// Velocity components pooled across axes and epochs into one scalar.
inline double rmse(const std::vector<double>& y,
                   const std::vector<double>& yhat) {
  detail::check_pair(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y[i] - yhat[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

inline double mae(const std::vector<double>& y,
                  const std::vector<double>& yhat) {
  detail::check_pair(y, yhat);
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::abs(y[i] - yhat[i]);
  return s / static_cast<double>(y.size());
}

inline double r_squared(const std::vector<double>& y,
                        const std::vector<double>& yhat) {
  detail::check_pair(y, yhat);
  const double mu = detail::mean(y);
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mu) * (y[i] - mu);
  }
  if (ss_tot <= 0.0)
    throw DataError("r_squared is undefined for a constant reference signal");
  return 1.0 - ss_res / ss_tot;
}

/// 100 * (1 - var(y - yhat) / var(y)); insensitive to constant offsets in
/// the estimate, unlike R².
inline double vaf(const std::vector<double>& y,
                  const std::vector<double>& yhat) {
  detail::check_pair(y, yhat);
  std::vector<double> err(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) err[i] = y[i] - yhat[i];
  const double var_y = detail::variance(y);
  if (var_y <= 0.0)
    throw DataError("vaf is undefined for a constant reference signal");
  return 100.0 * (1.0 - detail::variance(err) / var_y);
}

struct ErrorNormPoint {
  double t = 0.0;
  double norm = 0.0;  // m/s
};

inline std::vector<ErrorNormPoint> error_norm_series(
    const std::vector<double>& t, const std::vector<Vec3>& truth,
    const std::vector<Vec3>& estimate) {
  detail::require(t.size() == truth.size() && truth.size() == estimate.size(),
                  "error_norm_series: sequences are misaligned");
  std::vector<ErrorNormPoint> out(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dx = estimate[i][0] - truth[i][0];
    const double dy = estimate[i][1] - truth[i][1];
    const double dz = estimate[i][2] - truth[i][2];
    out[i] = {t[i], std::sqrt(dx * dx + dy * dy + dz * dz)};
  }
  return out;
}

// ---------------------------------------------------------------------------
// Kernel density estimation

/// Silverman's rule of thumb: 0.9 min(sigma, IQR/1.34) n^(-1/5). Falls back
/// to 1e-3 when the samples are (numerically) all identical.
inline double silverman_bandwidth(const std::vector<double>& samples) {
  detail::require(samples.size() >= 2, "bandwidth needs at least 2 samples");
  const double sigma = std::sqrt(detail::variance(samples));
  const double iqr =
      detail::quantile(samples, 0.75) - detail::quantile(samples, 0.25);
  double spread = sigma;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  const double h =
      0.9 * spread *
      std::pow(static_cast<double>(samples.size()), -0.2);
  return h > 0.0 ? h : 1e-3;
}

struct KdeCurve {
  std::vector<double> x;
  std::vector<double> density;
  double bandwidth = 0.0;

  double trapezoid_integral() const {
    double s = 0.0;
    for (std::size_t i = 1; i < x.size(); ++i)
      s += 0.5 * (density[i] + density[i - 1]) * (x[i] - x[i - 1]);
    return s;
  }
};

/// Gaussian-kernel KDE on a uniform grid spanning 5 bandwidths beyond the
/// sample range on both sides. `bandwidth <= 0` selects Silverman's rule.
inline KdeCurve kde_density(const std::vector<double>& samples,
                            std::size_t grid_points = 512,
                            double bandwidth = 0.0) {
  detail::require(samples.size() >= 2, "kde_density needs at least 2 samples");
  detail::require(grid_points >= 2, "kde_density needs at least 2 grid points");
  KdeCurve curve;
  curve.bandwidth = bandwidth > 0.0 ? bandwidth : silverman_bandwidth(samples);
  const auto [mn_it, mx_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *mn_it - 5.0 * curve.bandwidth;
  const double hi = *mx_it + 5.0 * curve.bandwidth;
  const double step = (hi - lo) / static_cast<double>(grid_points - 1);
  const double inv_h = 1.0 / curve.bandwidth;
  const double norm = inv_h / (std::sqrt(2.0 * kPi) *
                               static_cast<double>(samples.size()));
  curve.x.resize(grid_points);
  curve.density.resize(grid_points);
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double x = lo + step * static_cast<double>(i);
    double d = 0.0;
    for (double s : samples) {
      const double u = (x - s) * inv_h;
      d += std::exp(-0.5 * u * u);
    }
    curve.x[i] = x;
    curve.density[i] = d * norm;
  }
  return curve;
}

}  // namespace dvlest
