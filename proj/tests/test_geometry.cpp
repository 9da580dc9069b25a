#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dvlest/geometry.hpp"

using namespace dvlest;

TEST_CASE("beam directions match the Janus trigonometry") {
  const BeamGeometry g20 = BeamGeometry::janus(20.0);
  const Vec3 b1 = beam_direction(1, g20);
  CHECK(b1[0] == Catch::Approx(0.24185).margin(1e-5));
  CHECK(b1[1] == Catch::Approx(0.24185).margin(1e-5));
  CHECK(b1[2] == Catch::Approx(0.93969).margin(1e-5));

  // beam 3 sits at psi = 225 deg: both horizontal components negative
  for (double theta : {5.0, 20.0, 45.0, 70.0}) {
    const Vec3 b3 = beam_direction(3, BeamGeometry::janus(theta));
    CHECK(b3[0] < 0.0);
    CHECK(b3[1] < 0.0);
  }

  // degenerate pitch collapses every beam onto the z axis
  const Vec3 flat = beam_direction(2, BeamGeometry::janus(0.0));
  CHECK(flat[0] == Catch::Approx(0.0).margin(1e-15));
  CHECK(flat[1] == Catch::Approx(0.0).margin(1e-15));
  CHECK(flat[2] == Catch::Approx(1.0).margin(1e-15));

  CHECK_THROWS_AS(beam_direction(0, g20), ContractViolation);
  CHECK_THROWS_AS(beam_direction(5, g20), ContractViolation);
}

TEST_CASE("beam directions are unit vectors for all valid pitches") {
  for (double theta = 1.0; theta < 90.0; theta += 1.5) {
    const BeamGeometry g = BeamGeometry::janus(theta);
    for (int i = 1; i <= 4; ++i) {
      const Vec3 b = beam_direction(i, g);
      const double n = std::sqrt(b[0] * b[0] + b[1] * b[1] + b[2] * b[2]);
      REQUIRE(std::abs(n - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("transform matrix has the closed-form normal equations") {
  const TransformMatrix h = build_transform(BeamGeometry::janus(30.0));
  double hth[3][3] = {};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int r = 0; r < 4; ++r) hth[i][j] += h.rows[r][i] * h.rows[r][j];
  // H'H = diag(2 sin^2, 2 sin^2, 4 cos^2) = diag(0.5, 0.5, 3.0) at 30 deg
  CHECK(hth[0][0] == Catch::Approx(0.5).margin(1e-12));
  CHECK(hth[1][1] == Catch::Approx(0.5).margin(1e-12));
  CHECK(hth[2][2] == Catch::Approx(3.0).margin(1e-12));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) CHECK(std::abs(hth[i][j]) < 1e-12);

  // shared third column at 20 deg
  const TransformMatrix h20 = build_transform(BeamGeometry::janus(20.0));
  for (int r = 0; r < 4; ++r)
    CHECK(h20.rows[r][2] == Catch::Approx(0.93969).margin(1e-5));

  // degenerate geometry still builds; rejection happens downstream
  const TransformMatrix h0 = build_transform(BeamGeometry::janus(0.0));
  for (int r = 0; r < 4; ++r) CHECK(h0.rows[r][2] == 1.0);
}

TEST_CASE("opposing beams cancel in the horizontal columns") {
  for (double theta : {10.0, 30.0, 55.0, 80.0}) {
    const TransformMatrix h = build_transform(BeamGeometry::janus(theta));
    double sx = 0.0, sy = 0.0;
    for (int r = 0; r < 4; ++r) {
      sx += h.rows[r][0];
      sy += h.rows[r][1];
    }
    CHECK(std::abs(sx) < 1e-12);
    CHECK(std::abs(sy) < 1e-12);
  }
}

TEST_CASE("velocity projection") {
  const TransformMatrix h = build_transform(BeamGeometry::janus(20.0));

  const BeamMeasurement zero = project_velocity(BodyVelocity{{0, 0, 0}}, h);
  for (double b : zero.beams) CHECK(b == 0.0);

  const BeamMeasurement down = project_velocity(BodyVelocity{{0, 0, 1}}, h);
  for (double b : down.beams) CHECK(b == Catch::Approx(0.93969).margin(1e-5));

  const BeamMeasurement fwd = project_velocity(BodyVelocity{{1, 0, 0}}, h);
  CHECK(fwd.beams[0] == Catch::Approx(0.24185).margin(1e-5));
  CHECK(fwd.beams[1] == Catch::Approx(-0.24185).margin(1e-5));
  CHECK(fwd.beams[2] == Catch::Approx(-0.24185).margin(1e-5));
  CHECK(fwd.beams[3] == Catch::Approx(0.24185).margin(1e-5));
}

TEST_CASE("corruption: bias only") {
  const ErrorModelConfig cfg = ErrorModelConfig::scalar(0.001, 0.0, 7);
  Rng rng(cfg.seed);
  BeamMeasurement clean;
  clean.beams = {0.1, -0.2, 0.3, 0.0};
  const BeamMeasurement bad = corrupt_measurement(clean, cfg, rng);
  for (int i = 0; i < 4; ++i)
    CHECK(bad.beams[i] == Catch::Approx(clean.beams[i] + 0.001).margin(0.0));

  // zero-error config is the identity
  const ErrorModelConfig none;
  Rng rng2(0);
  const BeamMeasurement same = corrupt_measurement(clean, none, rng2);
  for (int i = 0; i < 4; ++i) CHECK(same.beams[i] == clean.beams[i]);
}

TEST_CASE("corruption noise hits the configured sigma") {
  const ErrorModelConfig cfg = ErrorModelConfig::scalar(0.0, 0.15, 99);
  Rng rng(cfg.seed);
  BeamMeasurement clean;
  double sum[4] = {}, sq[4] = {};
  const int n = 250000;  // 10^6 draws across the four beams
  for (int k = 0; k < n; ++k) {
    const BeamMeasurement bad = corrupt_measurement(clean, cfg, rng);
    for (int i = 0; i < 4; ++i) {
      sum[i] += bad.beams[i];
      sq[i] += bad.beams[i] * bad.beams[i];
    }
  }
  for (int i = 0; i < 4; ++i) {
    const double mean = sum[i] / n;
    const double std_dev = std::sqrt(sq[i] / n - mean * mean);
    CHECK(std_dev > 0.1495);
    CHECK(std_dev < 0.1505);
  }
}

TEST_CASE("corruption is additive and deterministic per seed") {
  const ErrorModelConfig cfg = ErrorModelConfig::scalar(0.02, 0.3, 1234);
  BeamMeasurement a, b;
  a.beams = {1.0, 2.0, -1.0, 0.5};
  b.beams = {0.1, 0.2, 0.3, 0.4};

  Rng ra(cfg.seed), rb(cfg.seed);
  const BeamMeasurement ca = corrupt_measurement(a, cfg, ra);
  const BeamMeasurement cb = corrupt_measurement(b, cfg, rb);
  for (int i = 0; i < 4; ++i)
    CHECK(ca.beams[i] - cb.beams[i] ==
          Catch::Approx(a.beams[i] - b.beams[i]).margin(1e-15));

  // bit-identical streams for identical seeds and call order
  Rng r1(555), r2(555);
  for (int k = 0; k < 50; ++k) {
    const BeamMeasurement m1 = corrupt_measurement(a, cfg, r1);
    const BeamMeasurement m2 = corrupt_measurement(a, cfg, r2);
    for (int i = 0; i < 4; ++i) REQUIRE(m1.beams[i] == m2.beams[i]);
  }
}
