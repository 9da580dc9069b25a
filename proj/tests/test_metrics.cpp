#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "dvlest/metrics.hpp"
#include "dvlest/random.hpp"

using namespace dvlest;

TEST_CASE("rmse") {
  CHECK(rmse({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(rmse({0, 0}, {3, 4}) == Catch::Approx(std::sqrt(12.5)).margin(1e-12));
  // constant error e on every component gives |e|
  CHECK(rmse({1, 2, 3, 4}, {1.5, 2.5, 3.5, 4.5}) ==
        Catch::Approx(0.5).margin(1e-12));
  CHECK_THROWS_AS(rmse({}, {}), ContractViolation);
}

TEST_CASE("mae") {
  CHECK(mae({1, 2}, {1, 2}) == 0.0);
  CHECK(mae({0, 0}, {3, 4}) == Catch::Approx(3.5).margin(1e-12));
}

TEST_CASE("r squared") {
  const std::vector<double> y{1, 2, 3, 4, 5};
  CHECK(r_squared(y, y) == Catch::Approx(1.0).margin(1e-12));
  CHECK(r_squared(y, {3, 3, 3, 3, 3}) == Catch::Approx(0.0).margin(1e-12));
  CHECK(r_squared(y, {5, 4, 3, 2, 1}) < 0.0);  // worse than the mean
  CHECK_THROWS_AS(r_squared({2, 2, 2}, {1, 2, 3}), DataError);
}

TEST_CASE("vaf") {
  const std::vector<double> y{1, 2, 3, 4, 5};
  CHECK(vaf(y, y) == Catch::Approx(100.0).margin(1e-12));
  // constant offsets are invisible to VAF but not to R^2
  std::vector<double> shifted = y;
  for (double& v : shifted) v += 0.7;
  CHECK(vaf(y, shifted) == Catch::Approx(100.0).margin(1e-9));
  CHECK(r_squared(y, shifted) < 1.0 - 1e-6);
  CHECK_THROWS_AS(vaf({1, 1}, {1, 2}), DataError);
}

TEST_CASE("hand-computed five-element fixtures to 1e-12") {
  const std::vector<double> y{0.3, -1.2, 2.5, 0.0, 1.1};
  const std::vector<double> yhat{0.1, -1.0, 2.0, 0.4, 1.6};
  // errors: 0.2, -0.2, 0.5, -0.4, -0.5 -> squares 0.04 0.04 0.25 0.16 0.25
  CHECK(rmse(y, yhat) == Catch::Approx(std::sqrt(0.74 / 5.0)).margin(1e-12));
  CHECK(mae(y, yhat) == Catch::Approx(1.8 / 5.0).margin(1e-12));
  const double mu = (0.3 - 1.2 + 2.5 + 0.0 + 1.1) / 5.0;
  double ss_tot = 0.0;
  for (double v : y) ss_tot += (v - mu) * (v - mu);
  CHECK(r_squared(y, yhat) == Catch::Approx(1.0 - 0.74 / ss_tot).margin(1e-12));
  // var of errors around their mean (-0.08): 0.0784+0.0144+0.3364+0.1024+0.1764
  const double var_err = (0.0784 + 0.0144 + 0.3364 + 0.1024 + 0.1764) / 5.0;
  CHECK(vaf(y, yhat) ==
        Catch::Approx(100.0 * (1.0 - var_err / (ss_tot / 5.0))).margin(1e-9));
}

TEST_CASE("mae never exceeds rmse") {
  Rng rng(100);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.below(40);
    std::vector<double> y(n), yhat(n);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] = 5.0 * rng.uniform_sym();
      yhat[i] = 5.0 * rng.uniform_sym();
    }
    REQUIRE(mae(y, yhat) <= rmse(y, yhat) + 1e-15);
  }
}

TEST_CASE("rmse and mae depend only on the error") {
  Rng rng(7);
  std::vector<double> y(20), yhat(20), zero(20, 0.0), diff(20);
  for (std::size_t i = 0; i < 20; ++i) {
    y[i] = rng.uniform_sym();
    yhat[i] = rng.uniform_sym();
    diff[i] = yhat[i] - y[i];
  }
  CHECK(rmse(y, yhat) == Catch::Approx(rmse(zero, diff)).margin(1e-15));
  CHECK(mae(y, yhat) == Catch::Approx(mae(zero, diff)).margin(1e-15));
}

TEST_CASE("error norm series") {
  const std::vector<double> t{0, 1, 2};
  const std::vector<Vec3> truth{{0, 0, 0}, {1, 1, 1}, {0, 0, 0}};
  const std::vector<Vec3> est{{0, 0, 0}, {1, 1, 1.5}, {3, 4, 0}};
  const auto series = error_norm_series(t, truth, est);
  CHECK(series[0].norm == 0.0);
  CHECK(series[1].norm == Catch::Approx(0.5));
  CHECK(series[2].norm == Catch::Approx(5.0));
  CHECK_THROWS_AS(error_norm_series({0}, truth, est), ContractViolation);
}

TEST_CASE("kde integrates to one") {
  Rng rng(55);
  std::vector<double> samples(400);
  for (double& s : samples) s = rng.normal(0.2, 0.7);
  const KdeCurve curve = kde_density(samples);
  CHECK(curve.trapezoid_integral() == Catch::Approx(1.0).margin(0.01));
  CHECK(curve.bandwidth > 0.0);
}

TEST_CASE("kde of a single repeated value is the kernel itself") {
  const std::vector<double> samples(50, 1.5);
  const double h = 0.25;
  const KdeCurve curve = kde_density(samples, 801, h);
  // peak at the sample location with the Gaussian peak height 1/(h sqrt(2pi))
  double peak = 0.0, peak_x = 0.0;
  for (std::size_t i = 0; i < curve.x.size(); ++i)
    if (curve.density[i] > peak) {
      peak = curve.density[i];
      peak_x = curve.x[i];
    }
  CHECK(peak_x == Catch::Approx(1.5).margin(0.01));
  CHECK(peak == Catch::Approx(1.0 / (h * std::sqrt(2 * kPi))).epsilon(1e-3));
  CHECK(curve.trapezoid_integral() == Catch::Approx(1.0).margin(0.01));
}

TEST_CASE("kde of symmetric samples is symmetric") {
  const std::vector<double> samples{-0.8, 0.8};
  const KdeCurve curve = kde_density(samples, 501, 0.3);
  const std::size_t n = curve.x.size();
  for (std::size_t i = 0; i < n; ++i)
    REQUIRE(std::abs(curve.density[i] - curve.density[n - 1 - i]) < 1e-12);
}

TEST_CASE("kde input validation") {
  CHECK_THROWS_AS(kde_density({1.0}), ContractViolation);
  // silverman falls back gracefully for identical samples
  CHECK(silverman_bandwidth({2.0, 2.0, 2.0}) > 0.0);
}
