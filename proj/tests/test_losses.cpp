#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/divergence.hpp"
#include "ganlab/losses.hpp"

using namespace ganlab;

namespace {

// Discriminator with constant output p: zero weights, bias at logit(p).
Mlp constant_disc(double p, std::size_t dim = 2) {
  const double logit = std::log(p / (1.0 - p));
  return Mlp({MlpLayer{Tensor::zeros({dim, 1}), Tensor::row({logit}),
                       ActivationSpec::sigmoid()}});
}

Tensor toy_batch(std::initializer_list<double> xs) {
  std::vector<double> data;
  for (double x : xs) {
    data.push_back(x);
    data.push_back(0.0);
  }
  return Tensor({data.size() / 2, 2}, data);
}

GridDensity random_density(Rng& rng, const GridSpec& spec) {
  std::vector<double> m(spec.num_cells());
  for (double& v : m) v = rng.uniform(0.01, 1.0);
  return GridDensity(spec, std::move(m));
}

}  // namespace

TEST_CASE("constant-half discriminator loses log 4") {
  Mlp d = constant_disc(0.5);
  const double loss =
      disc_loss_value(d, toy_batch({0.0, 0.3}), toy_batch({0.7, 1.0}));
  CHECK(loss == doctest::Approx(std::log(4.0)).epsilon(1e-12));
}

TEST_CASE("saturated discriminator reaches (floored) zero loss") {
  // D(x, y) = sigmoid(500 - 1000 y): exactly 1 on the real side (y = 0) and
  // exactly 0 on the fake side (y = 1) in double precision; the probability
  // floor turns both logs into -log(1 - 1e-12).
  Mlp d({MlpLayer{Tensor::matrix(2, 1, {0.0, -1000.0}), Tensor::row({500.0}),
                  ActivationSpec::sigmoid()}});
  Tensor real({1, 2}, {0.3, 0.0});
  Tensor fake({1, 2}, {0.3, 1.0});
  const double loss = disc_loss_value(d, real, fake);
  const double expected = 2.0 * (-std::log(1.0 - 1e-12));
  CHECK(loss == doctest::Approx(expected).epsilon(1e-6));
  CHECK(loss < 1e-10);
}

TEST_CASE("optimal discriminator on grids realizes 2 jsd - 2 log 2") {
  Rng rng(17);
  const GridSpec spec = GridSpec::uniform(0.0, 1.0, 32, 1);
  for (int trial = 0; trial < 25; ++trial) {
    Rng r = rng.substream(trial);
    GridDensity pr = random_density(r, spec);
    GridDensity pg = random_density(r, spec);
    const double loss = disc_loss_on_grids(pr, pg);
    const double expected = 2.0 * std::log(2.0) -
                            2.0 * jsd_grid(pr, pg).finite();
    CHECK(loss == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("malformed batches are rejected") {
  Mlp d = constant_disc(0.5);
  GradTape tape;
  // Fake batch with the wrong width cannot feed the discriminator.
  CHECK_THROWS_AS((void)disc_loss(tape, d, Tensor({1, 2}, {0, 0}),
                                  Tensor({2, 1}, {0, 0})),
                  std::invalid_argument);
  // A non-sigmoid head is not a probability.
  Mlp raw({MlpLayer{Tensor::zeros({2, 1}), Tensor::zeros({1, 1}),
                    ActivationSpec::identity()}});
  GradTape tape2;
  CHECK_THROWS_AS((void)disc_loss(tape2, raw, Tensor({1, 2}, {0, 0}),
                                  Tensor({1, 2}, {0, 0})),
                  std::invalid_argument);
}

TEST_CASE("generator losses at the constant-half discriminator") {
  Mlp d = constant_disc(0.5);
  Tensor fake = toy_batch({0.1, 0.9});
  CHECK(gen_loss_value(d, fake, GenLossKind::original) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-12));
  CHECK(gen_loss_value(d, fake, GenLossKind::neg_log_d) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("noisy objective perturbs samples but keeps gradients flowing") {
  // Non-constant discriminator so the loss depends on where samples land.
  Mlp d({MlpLayer{Tensor::matrix(2, 1, {1.0, 2.0}), Tensor::row({0.1}),
                  ActivationSpec::sigmoid()}});
  Mlp g({MlpLayer{Tensor::matrix(1, 2, {1.0, 0.0}), Tensor::row({0.0, 0.5}),
                  ActivationSpec::identity()}});
  Tensor z({6, 1}, {0.0, 0.2, 0.4, 0.6, 0.8, 1.0});
  auto noise = NoiseSpec::gaussian_iso(2, 0.09);
  Rng rng(19);

  GradTape tape;
  MlpParamsHandle gh = g.watch_params(tape);
  Tensor fake = g.apply(tape, gh, z);
  Tensor noisy = gen_loss(tape, d, fake, GenLossKind::noisy_original, &noise,
                          &rng);
  const double plain = gen_loss_value(d, g.eval(z), GenLossKind::original);
  CHECK(noisy.item() != plain);  // fresh perturbations moved the samples

  GradientMap grads = tape.backward(noisy);
  double norm = 0.0;
  for (const Tensor& p : gh.params)
    for (double v : grads.at(p)) norm += v * v;
  CHECK(norm > 0.0);  // gradient reaches the generator through the noise
}

TEST_CASE("kind/noise mismatch errors") {
  Mlp d = constant_disc(0.5);
  Tensor fake = toy_batch({0.1});
  auto noise = NoiseSpec::gaussian_iso(2, 0.01);
  Rng rng(1);
  GradTape t1;
  CHECK_THROWS_AS(
      (void)gen_loss(t1, d, fake, GenLossKind::noisy_original, nullptr,
                     nullptr),
      std::invalid_argument);
  GradTape t2;
  CHECK_THROWS_AS(
      (void)gen_loss(t2, d, fake, GenLossKind::original, &noise, &rng),
      std::invalid_argument);
  GradTape t3;
  CHECK_NOTHROW(
      (void)gen_loss(t3, d, fake, GenLossKind::noisy_original, &noise, &rng));
}

TEST_CASE("generator objectives at D = 1/2: log(1-D) and log D gradients "
          "have ratio -1") {
  // D(x, y) = sigmoid(3 y) is exactly 1/2 on the fake support y = 0 while
  // grad_x D = (0, 3/4) there, so the objective gradients are nonzero.
  Mlp d({MlpLayer{Tensor::matrix(2, 1, {0.0, 3.0}), Tensor::row({0.0}),
                  ActivationSpec::sigmoid()}});
  Mlp g({MlpLayer{Tensor::matrix(1, 2, {1.0, 0.0}), Tensor::row({0.0, 0.0}),
                  ActivationSpec::identity()}});
  Tensor z({4, 1}, {0.1, 0.4, 0.6, 0.9});

  auto grad_of = [&](auto make_loss) {
    GradTape tape;
    MlpParamsHandle gh = g.watch_params(tape);
    Tensor fake = g.apply(tape, gh, z);
    Tensor loss = make_loss(tape, fake);
    GradientMap grads = tape.backward(loss);
    std::vector<double> flat;
    for (const Tensor& p : gh.params) {
      const auto& gp = grads.at(p);
      flat.insert(flat.end(), gp.begin(), gp.end());
    }
    return flat;
  };

  auto g_original = grad_of([&](GradTape& t, const Tensor& fake) {
    return gen_loss(t, d, fake, GenLossKind::original);
  });
  auto g_neg_log = grad_of([&](GradTape& t, const Tensor& fake) {
    return gen_loss(t, d, fake, GenLossKind::neg_log_d);
  });
  auto g_log_d = grad_of([&](GradTape& t, const Tensor& fake) {
    // E[log D]: the ascent form of the alternative objective.
    Tensor out = d.apply(t, fake);
    return mean_all(t, ganlab::log(t, clamp(t, out, kProbFloor,
                                            1.0 - kProbFloor)));
  });

  double norm = 0.0;
  for (double v : g_original) norm += v * v;
  CHECK(norm > 1e-6);  // the point is non-degenerate
  for (std::size_t i = 0; i < g_original.size(); ++i) {
    // grad log(1-D) = -grad log D at D = 1/2 ...
    CHECK(g_original[i] == doctest::Approx(-g_log_d[i]).epsilon(1e-12));
    // ... which makes the two minimization losses share their gradient.
    CHECK(g_original[i] == doctest::Approx(g_neg_log[i]).epsilon(1e-12));
  }
}
