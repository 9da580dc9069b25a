#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <deque>

#include "dvlest/snmnn.hpp"
#include "test_support.hpp"

using namespace dvlest;

namespace {

void set_alpha(Snmnn& net, double a) {
  for (Param* p : net.alpha_params())
    std::fill(p->w.begin(), p->w.end(), a);
}

std::vector<double> random_input(const Snmnn& net, Rng& rng) {
  return testsupport::random_vector(net.input_dim(), rng);
}

SnmnnSequence random_sequence(const Snmnn& net, Rng& rng, std::size_t n) {
  SnmnnSequence seq;
  seq.mission_id = "t";
  for (std::size_t i = 0; i < n; ++i) {
    SnmnnSample s;
    s.t = static_cast<double>(i);
    s.input = random_input(net, rng);
    s.target = {rng.uniform_sym(), rng.uniform_sym(), rng.uniform_sym()};
    seq.steps.push_back(std::move(s));
  }
  return seq;
}

}  // namespace

TEST_CASE("alpha = 0 degenerates to a feed-forward map") {
  Snmnn net(ModelVariant::SnmnnV1, 3);
  set_alpha(net, 0.0);
  Rng rng(1);
  Snmnn::State st = net.make_state();
  const std::vector<double> x = random_input(net, rng);
  Vec3 last{};
  for (int k = 0; k < 5; ++k) {
    last = net.step(random_input(net, rng), st);
    for (double m : st.m_in) REQUIRE(m == 0.0);
    for (double m : st.m_hid) REQUIRE(m == 0.0);
  }
  // with dead memory the map is stateless: fresh state gives the same output
  Snmnn::State fresh = net.make_state();
  const Vec3 y1 = net.step(x, st);
  const Vec3 y2 = net.step(x, fresh);
  for (int i = 0; i < 3; ++i) REQUIRE(y1[i] == y2[i]);
}

TEST_CASE("alpha = 1 makes memory a one-step delay") {
  Snmnn net(ModelVariant::SnmnnV2, 4);
  set_alpha(net, 1.0);
  Rng rng(2);
  Snmnn::State st = net.make_state();
  const std::vector<double> x1 = random_input(net, rng);
  const std::vector<double> x2 = random_input(net, rng);
  net.step(x1, st);
  for (double m : st.m_in) REQUIRE(m == 0.0);  // no previous input yet
  net.step(x2, st);
  for (std::size_t i = 0; i < x1.size(); ++i) REQUIRE(st.m_in[i] == x1[i]);
}

TEST_CASE("constant input: memory converges at rate (1 - alpha)") {
  Snmnn net(ModelVariant::SnmnnV1, 5);
  const double a = 0.3;
  set_alpha(net, a);
  Snmnn::State st = net.make_state();
  const std::vector<double> x(net.input_dim(), 0.8);
  std::vector<double> err;
  for (int k = 0; k < 12; ++k) {
    net.step(x, st);
    err.push_back(std::abs(st.m_in[0] - 0.8));
  }
  for (std::size_t k = 3; k < err.size(); ++k) {
    REQUIRE(err[k] < err[k - 1]);
    REQUIRE(err[k] / err[k - 1] == Catch::Approx(1.0 - a).margin(1e-9));
  }
}

TEST_CASE("replaying a sequence gives identical outputs") {
  Snmnn net(ModelVariant::SnmnnV2, 6);
  Rng rng(3);
  const SnmnnSequence seq = random_sequence(net, rng, 25);
  const std::vector<Vec3> a = net.predict(seq);
  const std::vector<Vec3> b = net.predict(seq);
  REQUIRE(a.size() == seq.steps.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (int c = 0; c < 3; ++c) REQUIRE(a[i][c] == b[i][c]);
}

TEST_CASE("long constant warm-up converges the memory state") {
  Snmnn net(ModelVariant::SnmnnV1, 7);
  Rng rng(4);
  const SnmnnSequence tail = random_sequence(net, rng, 10);
  const std::vector<double> warm_input(net.input_dim(), 0.25);

  auto run_with_warmup = [&](std::size_t warm_n) {
    Snmnn::State st = net.make_state();
    for (std::size_t k = 0; k < warm_n; ++k) net.step(warm_input, st);
    Vec3 last{};
    for (const SnmnnSample& s : tail.steps) last = net.step(s.input, st);
    return last;
  };
  const Vec3 w40 = run_with_warmup(40);
  const Vec3 w80 = run_with_warmup(80);
  for (int c = 0; c < 3; ++c)
    CHECK(std::abs(w40[c] - w80[c]) < 1e-6);
}

TEST_CASE("hidden-layer memory stays inside the tanh envelope") {
  Snmnn net(ModelVariant::SnmnnV2, 8);
  Rng rng(5);
  Snmnn::State st = net.make_state();
  for (int k = 0; k < 500; ++k) {
    net.step(random_input(net, rng), st);
    for (double m : st.m_hid) REQUIRE(std::abs(m) <= 1.0);
  }
}

TEST_CASE("unrolled gradients match finite differences, including alpha") {
  for (std::size_t depth : {std::size_t{1}, std::size_t{4}}) {
    for (ModelVariant variant :
         {ModelVariant::SnmnnV1, ModelVariant::SnmnnV2}) {
      Snmnn net(variant, 900 + depth);
      Rng rng(6 + depth);
      // move alphas off the symmetric default so their gradients are generic
      for (Param* p : net.alpha_params())
        for (double& a : p->w) a = 0.2 + 0.6 * rng.uniform();

      // warm history (constants for the truncated window)
      Snmnn::State st = net.make_state();
      for (int k = 0; k < 6; ++k) net.step(random_input(net, rng), st);
      const Snmnn::State frozen = st;

      std::vector<std::vector<double>> window_inputs;
      for (std::size_t k = 0; k < depth; ++k)
        window_inputs.push_back(random_input(net, rng));
      const Vec3 target{rng.uniform_sym(), rng.uniform_sym(),
                        rng.uniform_sym()};

      auto loss = [&] {
        Snmnn::State s = frozen;
        Vec3 y{};
        for (const auto& x : window_inputs) y = net.step(x, s);
        return mse_loss({y[0], y[1], y[2]},
                        {target[0], target[1], target[2]})
            .loss;
      };

      Snmnn::State s = frozen;
      std::deque<Snmnn::StepCache> window;
      Vec3 y{};
      for (const auto& x : window_inputs) {
        Snmnn::StepCache cache;
        y = net.step(x, s, &cache);
        window.push_back(std::move(cache));
      }
      const MseResult m =
          mse_loss({y[0], y[1], y[2]}, {target[0], target[1], target[2]});
      zero_grads(net.params());
      net.backward_window(window, {m.grad[0], m.grad[1], m.grad[2]});
      REQUIRE(testsupport::max_grad_error(net.params(), loss) < 1e-6);
    }
  }
}

TEST_CASE("default configs carry the per-variant epoch counts") {
  CHECK(SnmnnConfig::defaults(ModelVariant::SnmnnV1).epochs == 50);
  CHECK(SnmnnConfig::defaults(ModelVariant::SnmnnV2).epochs == 60);
  CHECK(SnmnnConfig::defaults(ModelVariant::SnmnnV1).lr_weights == 0.006);
  CHECK(SnmnnConfig::defaults(ModelVariant::SnmnnV1).lr_alpha == 0.092);
}

TEST_CASE("every training step lands on the spectral constraint surface") {
  SnmnnConfig cfg = SnmnnConfig::defaults(ModelVariant::SnmnnV1);
  cfg.epochs = 2;
  cfg.spectral.gamma = 2.0;
  SnmnnTrainer trainer(ModelVariant::SnmnnV1, cfg);
  Rng rng(9);
  const SnmnnSequence seq = random_sequence(trainer.model(), rng, 30);

  const double target = std::sqrt(cfg.spectral.gamma);
  std::size_t checked = 0;
  trainer.set_step_observer([&](const Snmnn& net) {
    const double rho = spectral_norm(net.W1.w, net.hidden_dim(),
                                     net.input_dim(), 256);
    REQUIRE(std::abs(rho - target) < 1e-3);
    ++checked;
  });
  trainer.train({seq});
  CHECK(checked == 2 * seq.steps.size());
}

TEST_CASE("unordered sequences are rejected") {
  SnmnnConfig cfg = SnmnnConfig::defaults(ModelVariant::SnmnnV1);
  cfg.epochs = 1;
  SnmnnTrainer trainer(ModelVariant::SnmnnV1, cfg);
  Rng rng(10);
  SnmnnSequence seq = random_sequence(trainer.model(), rng, 5);
  std::swap(seq.steps[1].t, seq.steps[3].t);
  CHECK_THROWS_AS(trainer.train({seq}), DataError);
}

TEST_CASE("gamma = 1 network is empirically 1-Lipschitz") {
  SnmnnConfig cfg = SnmnnConfig::defaults(ModelVariant::SnmnnV2);
  cfg.epochs = 2;
  cfg.spectral.gamma = 1.0;
  SnmnnTrainer trainer(ModelVariant::SnmnnV2, cfg);
  Rng rng(11);
  trainer.train({random_sequence(trainer.model(), rng, 40)});

  const Snmnn& net = trainer.model();
  Snmnn::State st = net.make_state();
  for (int k = 0; k < 20; ++k) st = [&] {  // drive to a generic state
    net.step(random_input(net, rng), st);
    return st;
  }();
  for (int probe = 0; probe < 200; ++probe) {
    const std::vector<double> x = random_input(net, rng);
    std::vector<double> xp = x;
    double dn = 0.0;
    for (double& v : xp) {
      const double d = 1e-3 * rng.uniform_sym();
      v += d;
      dn += d * d;
    }
    dn = std::sqrt(dn);
    const Vec3 y0 = net.probe(x, st);
    const Vec3 y1 = net.probe(xp, st);
    const double dy = std::sqrt((y1[0] - y0[0]) * (y1[0] - y0[0]) +
                                (y1[1] - y0[1]) * (y1[1] - y0[1]) +
                                (y1[2] - y0[2]) * (y1[2] - y0[2]));
    REQUIRE(dy / dn <= 1.05);
  }
}
