#pragma once

#include <array>
#include <cmath>
#include <string>

#include "dvlest/errors.hpp"
#include "dvlest/random.hpp"

namespace dvlest {

using Vec3 = std::array<double, 3>;
using Vec4 = std::array<double, 4>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double deg2rad(double d) { return d * kPi / 180.0; }

/// Janus '×' beam arrangement: one shared pitch angle, yaws at
/// 45°, 135°, 225°, 315°. Angles are kept in degrees at the API boundary
/// and converted to radians exactly once inside the trig evaluations.
struct BeamGeometry {
  double pitch_deg = 30.0;                       // manufacturer pitch, 0 < theta < 90
  std::array<double, 4> yaw_deg{45.0, 135.0, 225.0, 315.0};

  static BeamGeometry janus(double pitch_deg = 30.0) {
    BeamGeometry g;
    g.pitch_deg = pitch_deg;
    for (int i = 0; i < 4; ++i) g.yaw_deg[i] = i * 90.0 + 45.0;
    return g;
  }
};

/// 4x3 matrix of beam direction cosines; row i maps body velocity onto
/// beam i's axis.
struct TransformMatrix {
  std::array<Vec3, 4> rows;
};

struct BodyVelocity {
  Vec3 v{0.0, 0.0, 0.0};
};

/// One DVL epoch: a timestamp and the four beam-axis velocities.
struct BeamMeasurement {
  double t = 0.0;
  Vec4 beams{0.0, 0.0, 0.0, 0.0};
};

/// Additive beam error model: constant in-run bias plus white Gaussian
/// noise per beam.
struct ErrorModelConfig {
  Vec4 bias{0.0, 0.0, 0.0, 0.0};  // m/s per beam
  double noise_std = 0.0;         // m/s, >= 0
  std::uint64_t seed = 0;

  /// The usual configuration: one scalar bias replicated on all beams.
  static ErrorModelConfig scalar(double bias, double noise_std,
                                 std::uint64_t seed = 0) {
    ErrorModelConfig c;
    c.bias = {bias, bias, bias, bias};
    c.noise_std = noise_std;
    c.seed = seed;
    return c;
  }
};

/// Direction cosine vector of beam i (1-based): [cos(psi) sin(theta),
/// sin(psi) sin(theta), cos(theta)].
inline Vec3 beam_direction(int i, const BeamGeometry& g) {
  detail::require(i >= 1 && i <= 4, "beam index must be in 1..4, got " +
                                        std::to_string(i));
  const double theta = deg2rad(g.pitch_deg);
  const double psi = deg2rad(g.yaw_deg[i - 1]);
  return {std::cos(psi) * std::sin(theta), std::sin(psi) * std::sin(theta),
          std::cos(theta)};
}

inline TransformMatrix build_transform(const BeamGeometry& g) {
  TransformMatrix h;
  for (int i = 1; i <= 4; ++i) h.rows[i - 1] = beam_direction(i, g);
  return h;
}

/// Noise-free forward model: beams = H * v.
inline BeamMeasurement project_velocity(const BodyVelocity& v,
                                        const TransformMatrix& h,
                                        double t = 0.0) {
  BeamMeasurement m;
  m.t = t;
  for (int i = 0; i < 4; ++i) {
    m.beams[i] =
        h.rows[i][0] * v.v[0] + h.rows[i][1] * v.v[1] + h.rows[i][2] * v.v[2];
  }
  return m;
}

/// clean + bias + n, n ~ N(0, noise_std^2) independently per beam. The
/// caller owns the random stream, so corruption is deterministic given
/// (seed, call order) and threads can corrupt in parallel with one Rng each.
inline BeamMeasurement corrupt_measurement(const BeamMeasurement& clean,
                                           const ErrorModelConfig& cfg,
                                           Rng& rng) {
  detail::require(cfg.noise_std >= 0.0, "noise_std must be >= 0");
  BeamMeasurement out = clean;
  for (int i = 0; i < 4; ++i) {
    out.beams[i] += cfg.bias[i];
    if (cfg.noise_std > 0.0) out.beams[i] += rng.normal(0.0, cfg.noise_std);
  }
  return out;
}

}  // namespace dvlest
