#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dvlest/ls_estimator.hpp"
#include "test_support.hpp"

using namespace dvlest;

TEST_CASE("pseudoinverse identities") {
  const TransformMatrix h = build_transform(BeamGeometry::janus(30.0));
  const LsEstimator est(h);

  // third row is 1/(4 cos theta) on every beam
  for (int r = 0; r < 4; ++r)
    CHECK(est.pseudoinverse()[2][r] == Catch::Approx(0.28868).margin(1e-5));

  // H_dagger * H = I3
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int r = 0; r < 4; ++r)
        s += est.pseudoinverse()[i][r] * h.rows[r][j];
      CHECK(s == Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-10));
    }
}

TEST_CASE("singular geometry is rejected") {
  CHECK_THROWS_AS(LsEstimator(build_transform(BeamGeometry::janus(0.0))),
                  SingularGeometryError);
  CHECK_THROWS_AS(LsEstimator(build_transform(BeamGeometry::janus(90.0))),
                  SingularGeometryError);
  CHECK_NOTHROW(LsEstimator(build_transform(BeamGeometry::janus(0.5))));
}

TEST_CASE("noise-free round trip recovers the velocity") {
  Rng rng(2024);
  for (int trial = 0; trial < 200; ++trial) {
    const double theta = 5.0 + 80.0 * rng.uniform();
    const TransformMatrix h = build_transform(BeamGeometry::janus(theta));
    const LsEstimator est(h);
    const BodyVelocity v{{2.0 * rng.uniform_sym(), 2.0 * rng.uniform_sym(),
                          2.0 * rng.uniform_sym()}};
    const Vec3 vhat = est.estimate(project_velocity(v, h).beams);
    for (int a = 0; a < 3; ++a)
      REQUIRE(std::abs(vhat[a] - v.v[a]) < 1e-10);
  }
}

TEST_CASE("constant beam bias maps to a pure z error of c / cos(theta)") {
  const double theta = 20.0;
  const TransformMatrix h = build_transform(BeamGeometry::janus(theta));
  const LsEstimator est(h);
  const double c = 0.001;
  const Vec3 err = est.estimate(Vec4{c, c, c, c});
  CHECK(std::abs(err[0]) < 1e-12);
  CHECK(std::abs(err[1]) < 1e-12);
  CHECK(err[2] == Catch::Approx(c / std::cos(deg2rad(theta))).margin(1e-12));
  CHECK(err[2] == Catch::Approx(0.0010642).margin(1e-7));
}

TEST_CASE("equal-and-opposite corruption on beams 1 and 3") {
  const TransformMatrix h = build_transform(BeamGeometry::janus(25.0));
  const LsEstimator est(h);
  const double e = 0.05;
  const Vec3 err = est.estimate(Vec4{e, 0.0, -e, 0.0});
  const Vec3 oracle = testsupport::ls_oracle(h, Vec4{e, 0.0, -e, 0.0});
  CHECK(std::abs(err[0]) > 1e-3);
  CHECK(std::abs(err[1]) > 1e-3);
  CHECK(std::abs(err[2]) < 1e-12);
  for (int a = 0; a < 3; ++a)
    CHECK(err[a] == Catch::Approx(oracle[a]).margin(1e-9));
}

TEST_CASE("estimates agree with the dense solver over random cases") {
  Rng rng(77);
  for (int trial = 0; trial < 1000; ++trial) {
    const double theta = 5.0 + 80.0 * rng.uniform();
    const TransformMatrix h = build_transform(BeamGeometry::janus(theta));
    const LsEstimator est(h);
    Vec4 beams;
    for (double& b : beams) b = 3.0 * rng.uniform_sym() + rng.normal(0.0, 0.2);
    const Vec3 mine = est.estimate(beams);
    const Vec3 oracle = testsupport::ls_oracle(h, beams);
    for (int a = 0; a < 3; ++a)
      REQUIRE(std::abs(mine[a] - oracle[a]) < 1e-9);
  }
}

TEST_CASE("unbiased noise propagates with covariance sigma^2 (H'H)^-1") {
  const double theta = 30.0;
  const double sigma = 0.15;
  const TransformMatrix h = build_transform(BeamGeometry::janus(theta));
  const LsEstimator est(h);
  Rng rng(31337);
  const int n = 100000;
  double mean[3] = {}, cov[3][3] = {};
  std::vector<Vec3> errs(n);
  for (int k = 0; k < n; ++k) {
    Vec4 beams{};
    for (double& b : beams) b = rng.normal(0.0, sigma);
    errs[k] = est.estimate(beams);
    for (int a = 0; a < 3; ++a) mean[a] += errs[k][a] / n;
  }
  for (int k = 0; k < n; ++k)
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        cov[a][b] += (errs[k][a] - mean[a]) * (errs[k][b] - mean[b]) / n;

  const double s2 = sigma * sigma;
  const double st = std::sin(deg2rad(theta)), ct = std::cos(deg2rad(theta));
  const double expect[3] = {s2 / (2 * st * st), s2 / (2 * st * st),
                            s2 / (4 * ct * ct)};
  for (int a = 0; a < 3; ++a)
    CHECK(std::abs(cov[a][a] - expect[a]) < 0.1 * expect[a]);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      if (a != b)
        CHECK(std::abs(cov[a][b]) < 0.1 * std::sqrt(expect[a] * expect[b]));
}

TEST_CASE("nonzero beam bias leaves a nonzero mean error") {
  const TransformMatrix h = build_transform(BeamGeometry::janus(30.0));
  const LsEstimator est(h);
  const ErrorModelConfig cfg = ErrorModelConfig::scalar(0.001, 0.15, 5);
  Rng rng(cfg.seed);
  double mean_z = 0.0;
  const int n = 200000;
  BeamMeasurement clean;
  for (int k = 0; k < n; ++k) {
    const BeamMeasurement bad = corrupt_measurement(clean, cfg, rng);
    mean_z += est.estimate(bad.beams)[2] / n;
  }
  // the bias survives averaging: this is the gap the networks exploit
  CHECK(mean_z > 0.0005);
}
