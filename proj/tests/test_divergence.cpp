#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/divergence.hpp"
#include "ganlab/transport.hpp"

using namespace ganlab;

namespace {

GridDensity two_cells(double p0, double p1) {
  return GridDensity(GridSpec::uniform(0.0, 1.0, 2, 1), {p0, p1});
}

GridDensity random_grid(Rng& rng, const GridSpec& spec, bool allow_zero) {
  std::vector<double> m(spec.num_cells());
  for (double& v : m) {
    v = rng.uniform();
    if (allow_zero && rng.uniform() < 0.2) v = 0.0;
  }
  // Keep at least one positive cell.
  m[0] += 1e-3;
  return GridDensity(spec, std::move(m));
}

}  // namespace

TEST_CASE("kl: zero at equality, hand value, infinity marker on support gaps") {
  auto p = two_cells(0.5, 0.5);
  CHECK(kl_grid(p, p).finite() == 0.0);

  auto q = two_cells(0.25, 0.75);
  const double expected = 0.5 * std::log(2.0) + 0.5 * std::log(2.0 / 3.0);
  CHECK(kl_grid(p, q).finite() == doctest::Approx(expected).epsilon(1e-15));

  auto a = two_cells(1.0, 0.0);
  auto b = two_cells(0.0, 1.0);
  CHECK(kl_grid(a, b).is_infinite());
  CHECK(kl_grid(b, a).is_infinite());
  CHECK_THROWS_AS((void)kl_grid(a, b).finite(), std::logic_error);

  // Grid mismatch.
  GridDensity other(GridSpec::uniform(0.0, 1.0, 3, 1), {0.3, 0.3, 0.4});
  CHECK_THROWS_AS((void)kl_grid(p, other), std::invalid_argument);
}

TEST_CASE("kl is asymmetric") {
  auto p = two_cells(0.9, 0.1);
  auto q = two_cells(0.5, 0.5);
  CHECK(kl_grid(p, q).finite() != doctest::Approx(kl_grid(q, p).finite()));
}

TEST_CASE("jsd: equality, disjointness saturation, hand value") {
  auto p = two_cells(0.5, 0.5);
  CHECK(jsd_grid(p, p).finite() == 0.0);

  auto a = two_cells(1.0, 0.0);
  auto b = two_cells(0.0, 1.0);
  // Exactly log 2, not approximately.
  CHECK(jsd_grid(a, b).finite() == kLogTwo);

  auto q = two_cells(0.5, 0.5);
  // p = (1, 0), q = (1/2, 1/2), mixture m = (3/4, 1/4).
  const double expected = 0.5 * (1.0 * std::log(1.0 / 0.75)) +
                          0.5 * (0.5 * std::log(0.5 / 0.75) +
                                 0.5 * std::log(0.5 / 0.25));
  CHECK(jsd_grid(a, q).finite() == doctest::Approx(expected).epsilon(1e-15));
}

TEST_CASE("tv: equality, disjointness, hand value") {
  auto p = two_cells(0.5, 0.5);
  CHECK(tv_grid(p, p).finite() == 0.0);
  CHECK(tv_grid(two_cells(1.0, 0.0), two_cells(0.0, 1.0)).finite() == 1.0);
  CHECK(tv_grid(p, two_cells(0.25, 0.75)).finite() ==
        doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("jsd range, symmetry and gibbs over random grids") {
  Rng rng(31);
  const GridSpec spec = GridSpec::uniform(0.0, 1.0, 24, 1);
  for (int trial = 0; trial < 120; ++trial) {
    Rng r = rng.substream(trial);
    auto p = random_grid(r, spec, true);
    auto q = random_grid(r, spec, true);
    auto jpq = jsd_grid(p, q);
    auto jqp = jsd_grid(q, p);
    CHECK(jpq.finite() >= 0.0);
    CHECK(jpq.finite() <= kLogTwo);
    CHECK(jpq.finite() == doctest::Approx(jqp.finite()).epsilon(1e-12));
    auto kl = kl_grid(p, q);
    if (!kl.is_infinite()) CHECK(kl.finite() >= 0.0);
  }
}

TEST_CASE("pinsker chain against the mixture holds on random grids") {
  Rng rng(32);
  const GridSpec spec = GridSpec::uniform(0.0, 1.0, 24, 1);
  for (int trial = 0; trial < 120; ++trial) {
    Rng r = rng.substream(trial);
    auto p = random_grid(r, spec, false);
    auto q = random_grid(r, spec, false);
    std::vector<double> mix(spec.num_cells());
    for (std::size_t i = 0; i < mix.size(); ++i)
      mix[i] = 0.5 * (p.mass()[i] + q.mass()[i]);
    GridDensity m(spec, std::move(mix));
    const double tv = tv_grid(p, m).finite();
    const double kl = kl_grid(p, m).finite();
    CHECK(tv <= std::sqrt(0.5 * kl) + 1e-12);
  }
}

TEST_CASE("transport distance bounded by diameter times total variation") {
  Rng rng(33);
  const GridSpec spec = GridSpec::uniform(-1.0, 1.0, 6, 2);
  // Max distance between cell centers bounds the ground cost.
  double diameter = 0.0;
  for (std::size_t i = 0; i < spec.num_cells(); ++i)
    for (std::size_t j = 0; j < spec.num_cells(); ++j) {
      const auto a = spec.cell_center(i);
      const auto b = spec.cell_center(j);
      diameter = std::max(diameter,
                          std::hypot(a[0] - b[0], a[1] - b[1]));
    }
  for (int trial = 0; trial < 100; ++trial) {
    Rng r = rng.substream(trial);
    auto p = random_grid(r, spec, true);
    auto q = random_grid(r, spec, true);
    const double w = wasserstein_exact(EmpiricalMeasure::from_grid(p),
                                       EmpiricalMeasure::from_grid(q))
                         .distance.finite();
    CHECK(w <= diameter * tv_grid(p, q).finite() + 1e-9);
  }
}

TEST_CASE("optimal discriminator values") {
  CHECK(optimal_discriminator_value(0.0, 0.0) == 0.5);
  CHECK(optimal_discriminator_value(0.3, 0.0) == 1.0);
  CHECK(optimal_discriminator_value(0.0, 0.7) == 0.0);
  CHECK(optimal_discriminator_value(2.0, 2.0) == 0.5);

  // Equal gaussians shifted by one: midpoint symmetry.
  auto density = [](double x, double mu) {
    return std::exp(-(x - mu) * (x - mu) / 2.0) / std::sqrt(2 * 3.14159265);
  };
  CHECK(optimal_discriminator_value(density(0.5, 0.0), density(0.5, 1.0)) ==
        doctest::Approx(0.5).epsilon(1e-12));

  auto p = two_cells(0.5, 0.5);
  auto q = two_cells(0.25, 0.75);
  auto field = optimal_discriminator(p, q);
  CHECK(field[0] == doctest::Approx(0.5 / 0.75));
  CHECK(field[1] == doctest::Approx(0.5 / 1.25));
}

TEST_CASE("noise transport bound closed forms and limits") {
  CHECK(noise_transport_bound(NoiseSpec::gaussian_iso(2, 0.01)) ==
        doctest::Approx(std::sqrt(0.02)).epsilon(1e-15));
  CHECK(noise_transport_bound(NoiseSpec::gaussian_iso(2, 1e-14)) <
        1e-6);
  const double clipped = noise_transport_bound(
      NoiseSpec::clipped_gaussian(2, 0.01, 0.4));
  CHECK(clipped <= std::sqrt(0.02));
  CHECK(clipped > 0.9 * std::sqrt(0.02));
}

TEST_CASE("combined bound arithmetic and ceiling guard") {
  CHECK(wasserstein_jsd_bound(0.0, 6.0, 0.0) == 0.0);
  CHECK(wasserstein_jsd_bound(0.01, 6.0, kLogTwo) ==
        doctest::Approx(0.2 + 12.0 * std::sqrt(kLogTwo)).epsilon(1e-12));
  CHECK_THROWS_WITH_AS((void)wasserstein_jsd_bound(0.01, 6.0, 0.8),
                       doctest::Contains("ceiling"), std::invalid_argument);
}
