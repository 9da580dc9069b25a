#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dvlest/errors.hpp"
#include "dvlest/geometry.hpp"

namespace dvlest {

namespace detail {

using Mat3 = std::array<std::array<double, 3>, 3>;

/// Eigenvalues of a symmetric 3x3 matrix, descending. Analytic method
/// (Smith 1961): reduce to the trigonometric solution of the
/// characteristic cubic.
inline std::array<double, 3> sym3_eigenvalues(const Mat3& a) {
  const double p1 = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
  const double q = (a[0][0] + a[1][1] + a[2][2]) / 3.0;
  if (p1 == 0.0) {
    std::array<double, 3> eig{a[0][0], a[1][1], a[2][2]};
    std::sort(eig.begin(), eig.end(), std::greater<double>());
    return eig;
  }
  const double p2 = (a[0][0] - q) * (a[0][0] - q) + (a[1][1] - q) * (a[1][1] - q) +
                    (a[2][2] - q) * (a[2][2] - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  Mat3 b{};  // (1/p) * (a - q I)
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) b[i][j] = (a[i][j] - (i == j ? q : 0.0)) / p;
  const double detb =
      b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
      b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
      b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
  const double r = std::clamp(detb / 2.0, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e0 = q + 2.0 * p * std::cos(phi);
  const double e2 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  const double e1 = 3.0 * q - e0 - e2;
  return {e0, e1, e2};
}

inline Mat3 invert_sym3(const Mat3& m) {
  const double det =
      m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
      m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
      m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Mat3 inv;
  inv[0][0] = (m[1][1] * m[2][2] - m[1][2] * m[2][1]) / det;
  inv[0][1] = (m[0][2] * m[2][1] - m[0][1] * m[2][2]) / det;
  inv[0][2] = (m[0][1] * m[1][2] - m[0][2] * m[1][1]) / det;
  inv[1][0] = inv[0][1];
  inv[1][1] = (m[0][0] * m[2][2] - m[0][2] * m[2][0]) / det;
  inv[1][2] = (m[0][2] * m[1][0] - m[0][0] * m[1][2]) / det;
  inv[2][0] = inv[0][2];
  inv[2][1] = inv[1][2];
  inv[2][2] = (m[0][0] * m[1][1] - m[0][1] * m[1][0]) / det;
  return inv;
}

}  // namespace detail

/// Least-squares body-velocity estimator: v = (H'H)^-1 H' beams.
///
/// The pseudoinverse is computed once per geometry; per-epoch estimation is
/// a single 3x4 product, cheap enough for batch replay of long missions.
/// Construction rejects geometries whose normal matrix has condition
/// number above 1e8 (theta at or near 0° / 90°).
class LsEstimator {
public:
  using PseudoInverse = std::array<Vec4, 3>;  // 3x4

  explicit LsEstimator(const TransformMatrix& h) : h_(h) {
    detail::Mat3 hth{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        double s = 0.0;
        for (int r = 0; r < 4; ++r) s += h.rows[r][i] * h.rows[r][j];
        hth[i][j] = s;
      }
    const auto eig = detail::sym3_eigenvalues(hth);
    if (!(eig[2] > 0.0) || eig[0] / eig[2] > kConditionLimit) {
      throw SingularGeometryError(
          "transformation matrix is rank-deficient or near-singular "
          "(condition number of H'H exceeds 1e8)");
    }
    const auto inv = detail::invert_sym3(hth);
    for (int i = 0; i < 3; ++i)
      for (int r = 0; r < 4; ++r) {
        double s = 0.0;
        for (int j = 0; j < 3; ++j) s += inv[i][j] * h.rows[r][j];
        h_dagger_[i][r] = s;
      }
  }

  Vec3 estimate(const Vec4& beams) const {
    Vec3 v;
    for (int i = 0; i < 3; ++i) {
      v[i] = h_dagger_[i][0] * beams[0] + h_dagger_[i][1] * beams[1] +
             h_dagger_[i][2] * beams[2] + h_dagger_[i][3] * beams[3];
    }
    return v;
  }

  BodyVelocity estimate(const BeamMeasurement& m) const {
    return BodyVelocity{estimate(m.beams)};
  }

  const PseudoInverse& pseudoinverse() const { return h_dagger_; }
  const TransformMatrix& transform() const { return h_; }

  static constexpr double kConditionLimit = 1e8;

private:
  TransformMatrix h_;
  PseudoInverse h_dagger_;
};

}  // namespace dvlest
