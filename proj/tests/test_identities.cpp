#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/identities.hpp"

using namespace ganlab;

namespace {

GridSpec identity_grid() { return GridSpec::uniform(-12.0, 12.0, 4800, 1); }

Mlp offset_generator(double offset) {
  return Mlp({MlpLayer{Tensor::matrix(1, 2, {1.0, 0.0}),
                       Tensor::row({0.0, offset}),
                       ActivationSpec::identity()}});
}

}  // namespace

TEST_CASE("update identity on the gaussian translation family") {
  GridSpec grid = identity_grid();
  for (double theta0 : {0.5, 1.0, 2.0}) {
    LogDIdentityResult r = logd_identity_check(theta0, grid);
    CHECK(r.relative_error < 1e-2);
    // KL(N(theta,1) || N(0,1)) = theta^2/2, so its gradient is theta.
    CHECK(r.kl_gradient == doctest::Approx(theta0).epsilon(1e-3));
  }
}

TEST_CASE("matched distributions sit at the stationary symmetric point") {
  LogDIdentityResult r = logd_identity_check(0.0, identity_grid());
  CHECK(std::abs(r.update) < 1e-8);
  CHECK(std::abs(r.rhs) < 1e-8);
}

TEST_CASE("update at theta0 = 1 pushes the mean toward zero") {
  LogDIdentityResult r = logd_identity_check(1.0, identity_grid());
  CHECK(r.kl_gradient > 0.0);
  CHECK(r.update > 0.0);  // applied as theta <- theta - lr * update
}

TEST_CASE("narrow grid is rejected for its leak") {
  GridSpec grid = GridSpec::uniform(-1.0, 1.0, 100, 1);
  CHECK_THROWS_WITH_AS((void)logd_identity_check(1.0, grid),
                       doctest::Contains("cover"), std::invalid_argument);
}

TEST_CASE("noisy decomposition: totals match the recorded-graph oracle") {
  const auto real = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  const auto prior = ManifoldDistribution::box_uniform({{0.0, 1.0}});
  const auto noise = NoiseSpec::gaussian_iso(2, 0.09);
  Mlp gen = offset_generator(0.5);

  Tensor z({40, 1}, [] {
    std::vector<double> v(40);
    for (int i = 0; i < 40; ++i) v[i] = (i + 0.5) / 40.0;
    return v;
  }());
  Rng rng(61);
  auto dec = noisy_gradient_decomposition(real, gen, prior, noise, z, 40000,
                                          rng);
  CHECK(dec.relative_error < 5e-2);
  for (std::size_t i = 0; i < 40; ++i) {
    CHECK(dec.attraction_weight[i] > 0.0);
    CHECK(dec.repulsion_weight[i] > 0.0);
    // b - a and the smoothed-density gap share their sign by construction.
    const double b_minus_a =
        dec.repulsion_weight[i] - dec.attraction_weight[i];
    CHECK((b_minus_a > 0.0) == (dec.density_gap[i] > 0.0));
    // Fake points sit on the thin offset support: fakes dominate there.
    CHECK(dec.density_gap[i] < 0.0);
    CHECK(b_minus_a < 0.0);
  }
  // total = attraction - repulsion, by construction exactly.
  for (std::size_t p = 0; p < dec.total.size(); ++p)
    CHECK(dec.total[p] ==
          doctest::Approx(dec.attraction[p] - dec.repulsion[p])
              .epsilon(1e-12));
}

TEST_CASE("noisy decomposition: weight ordering follows the density ratio") {
  const auto real = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  const auto prior = ManifoldDistribution::box_uniform({{0.0, 1.0}});
  const auto noise = NoiseSpec::gaussian_iso(2, 0.0225);  // sigma = 0.15

  // Generator spreads the prior over [0, 4] on the data line: where it
  // overlaps the dense data segment the data density wins (b > a), far away
  // the fake density wins (b < a).
  Mlp gen({MlpLayer{Tensor::matrix(1, 2, {4.0, 0.0}), Tensor::row({0.0, 0.0}),
                    ActivationSpec::identity()}});
  Tensor z({2, 1}, {0.125, 0.75});  // images x = 0.5 and x = 3.0
  Rng rng(62);
  auto dec = noisy_gradient_decomposition(real, gen, prior, noise, z, 60000,
                                          rng);
  CHECK(dec.density_gap[0] > 0.0);
  CHECK(dec.repulsion_weight[0] > dec.attraction_weight[0]);
  CHECK(dec.density_gap[1] < 0.0);
  CHECK(dec.repulsion_weight[1] < dec.attraction_weight[1]);
}

TEST_CASE("noisy decomposition input validation") {
  const auto real = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  const auto prior = ManifoldDistribution::box_uniform({{0.0, 1.0}});
  Mlp gen = offset_generator(0.5);
  Tensor z({2, 1}, {0.25, 0.75});
  Rng rng(63);
  auto full = NoiseSpec::gaussian_full(2, {0.01, 0.0, 0.0, 0.01});
  CHECK_THROWS_AS((void)noisy_gradient_decomposition(real, gen, prior, full,
                                                     z, 100, rng),
                  std::invalid_argument);
  auto iso = NoiseSpec::gaussian_iso(2, 0.09);
  CHECK_THROWS_AS((void)noisy_gradient_decomposition(real, gen, prior, iso, z,
                                                     0, rng),
                  std::invalid_argument);
  // Tiny sigma far from the supports underflows and asks for larger noise.
  Mlp far = offset_generator(50.0);
  auto tiny = NoiseSpec::gaussian_iso(2, 1e-4);
  CHECK_THROWS_WITH_AS((void)noisy_gradient_decomposition(real, far, prior,
                                                          tiny, z, 100, rng),
                       doctest::Contains("sigma"), std::runtime_error);
}

TEST_CASE("noisy jsd gradient identity on the offset-segments family") {
  GridSpec grid = GridSpec::uniform(-2.5, 4.5, 2800, 1);
  Rng rng(64);
  for (double sigma : {0.1, 0.3}) {
    Rng r = rng.substream(static_cast<std::uint64_t>(sigma * 100));
    NoisyJsdGradResult res = noisy_jsd_gradient_check(1.0, sigma, grid,
                                                      200000, r);
    CHECK(res.relative_error < 5e-2);
    CHECK(res.lhs > 0.0);
    CHECK(res.rhs > 0.0);
  }
}

TEST_CASE("matched offset leaves no jsd gradient") {
  GridSpec grid = GridSpec::uniform(-2.5, 4.5, 2800, 1);
  Rng rng(65);
  NoisyJsdGradResult res = noisy_jsd_gradient_check(0.0, 0.3, grid, 200000,
                                                    rng);
  CHECK(std::abs(res.lhs) < 0.02);
  CHECK(std::abs(res.rhs) < 0.02);
}
