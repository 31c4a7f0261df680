#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ganlab/distributions.hpp"
#include "ganlab/linalg.hpp"
#include "oracles.hpp"

using namespace ganlab;

TEST_CASE("single-atom point cloud always returns its atom") {
  auto d = ManifoldDistribution::point_cloud({{1.0, 1.0}}, {1.0});
  Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    Point p = d.sample(rng);
    CHECK(p[0] == 1.0);
    CHECK(p[1] == 1.0);
  }
}

TEST_CASE("segment samples average to the midpoint") {
  auto d = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  Rng rng(4);
  const std::size_t n = 100000;
  auto block = d.sample_block(n, rng);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += block[2 * i];
    my += block[2 * i + 1];
  }
  mx /= n;
  my /= n;
  // Uniform on [0,1]: sd = 1/sqrt(12); allow 3 sigma of the mean estimate.
  CHECK(std::abs(mx - 0.5) < 3.0 / std::sqrt(12.0 * n));
  CHECK(my == 0.0);
}

TEST_CASE("circle samples have unit mean radius") {
  auto d = ManifoldDistribution::circle({0.0, 0.0}, 1.0);
  Rng rng(5);
  const std::size_t n = 100000;
  auto block = d.sample_block(n, rng);
  double mr = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    mr += std::sqrt(block[2 * i] * block[2 * i] +
                    block[2 * i + 1] * block[2 * i + 1]);
  mr /= n;
  CHECK(mr == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("pushforward samples apply the generator to the prior") {
  Mlp g({MlpLayer{Tensor::matrix(1, 2, {1.0, 0.0}), Tensor::row({0.0, 0.25}),
                  ActivationSpec::identity()}});
  auto prior = ManifoldDistribution::box_uniform({{0.0, 1.0}});
  auto d = ManifoldDistribution::pushforward(g, prior);
  CHECK(d.ambient_dim() == 2);
  Rng rng(6);
  auto block = d.sample_block(1000, rng);
  for (std::size_t i = 0; i < 1000; ++i) {
    CHECK(block[2 * i] >= 0.0);
    CHECK(block[2 * i] <= 1.0);
    CHECK(block[2 * i + 1] == 0.25);
  }
}

TEST_CASE("invariant violations are rejected at construction") {
  CHECK_THROWS_AS(ManifoldDistribution::circle({0.0, 0.0}, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(ManifoldDistribution::point_cloud({{0.0}}, {0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(ManifoldDistribution::point_cloud({{0.0}, {1.0}},
                                                    {1.5, -0.5}),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::gaussian_iso(2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::clipped_gaussian(2, 0.01, -1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(NoiseSpec::gaussian_full(2, {1.0, 0.9, 0.2, 1.0}),
                  std::invalid_argument);  // asymmetric
}

TEST_CASE("singular kinds expose no density, continuous kinds do") {
  auto seg = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  CHECK_FALSE(seg.has_density());
  CHECK_FALSE(seg.density_at({0.5, 0.0}).has_value());

  auto box = ManifoldDistribution::box_uniform({{0.0, 2.0}, {0.0, 1.0}});
  CHECK(box.density_at({1.0, 0.5}).value() == doctest::Approx(0.5));
  CHECK(box.density_at({3.0, 0.5}).value() == 0.0);

  auto gauss = ManifoldDistribution::gaussian_iso({0.0}, 1.0);
  CHECK(gauss.density_at({0.0}).value() ==
        doctest::Approx(1.0 / std::sqrt(2.0 * 3.14159265358979)));
}

TEST_CASE("convolved density: point mass reduces to the noise density") {
  auto d = ManifoldDistribution::point_cloud({{0.0, 0.0}}, {1.0});
  auto noise = NoiseSpec::gaussian_iso(2, 0.25);
  Rng rng(7);
  const Point x{0.3, -0.4};
  const double got = convolved_density(d, noise, x, 10, rng);
  CHECK(got == doctest::Approx(noise.density({0.3, -0.4})).epsilon(1e-14));
}

TEST_CASE("convolved density: two atoms give the balanced mixture") {
  auto d = ManifoldDistribution::point_cloud({{1.0, 0.0}, {-1.0, 0.0}},
                                             {0.5, 0.5});
  auto noise = NoiseSpec::gaussian_iso(2, 1.0);
  Rng rng(8);
  const double got = convolved_density(d, noise, {0.0, 0.0}, 10, rng);
  const double expected = 0.5 * noise.density({1.0, 0.0}) +
                          0.5 * noise.density({-1.0, 0.0});
  CHECK(got == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("convolved density of a segment matches the quadrature oracle") {
  auto d = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  auto noise = NoiseSpec::gaussian_iso(2, 0.01);
  Rng rng(9);
  const Point x{0.5, 0.0};
  const double mc = convolved_density(d, noise, x, 1000000, rng);
  const double quad = oracles::segment_convolution_quadrature(
      {0.0, 0.0}, {1.0, 0.0}, 0.01, {0.5, 0.0});
  CHECK(std::abs(mc - quad) / quad < 1e-2);
}

TEST_CASE("convolved density rejects a zero-sample budget") {
  auto d = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  auto noise = NoiseSpec::gaussian_iso(2, 0.01);
  Rng rng(10);
  CHECK_THROWS_AS(convolved_density(d, noise, {0.0, 0.0}, 0, rng),
                  std::invalid_argument);
}

TEST_CASE("monte carlo convolution variance halves when samples double") {
  auto d = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  auto noise = NoiseSpec::gaussian_iso(2, 0.04);
  const Point x{0.4, 0.1};
  Rng root(11);
  auto variance_at = [&](std::size_t mc, std::uint64_t stream) {
    double mean = 0.0, m2 = 0.0;
    const int reps = 30;
    Rng rng = root.substream(stream);
    for (int r = 0; r < reps; ++r) {
      const double v = convolved_density(d, noise, x, mc, rng);
      const double delta = v - mean;
      mean += delta / (r + 1);
      m2 += delta * (v - mean);
    }
    return m2 / (reps - 1);
  };
  const double v1 = variance_at(2000, 1);
  const double v2 = variance_at(4000, 2);
  // Ratio concentrates near 2; allow slack for 30-rep variance estimates.
  CHECK(v1 / v2 > 1.3);
  CHECK(v1 / v2 < 3.2);
}

TEST_CASE("clipped noise truncates hard and renormalizes") {
  auto noise = NoiseSpec::clipped_gaussian(2, 0.01, 0.4);
  Rng rng(12);
  for (int i = 0; i < 1000; ++i) {
    Point e = noise.sample(rng);
    CHECK(std::sqrt(e[0] * e[0] + e[1] * e[1]) <= 0.4);
  }
  CHECK(noise.density({0.5, 0.0}) == 0.0);
  // Renormalized above the plain gaussian inside the ball.
  auto plain = NoiseSpec::gaussian_iso(2, 0.01);
  CHECK(noise.density({0.1, 0.0}) > plain.density({0.1, 0.0}));
}

TEST_CASE("noise rms norm: closed forms and the frozen clipped constant") {
  CHECK(NoiseSpec::gaussian_iso(2, 0.01).rms_norm() ==
        doctest::Approx(std::sqrt(0.02)).epsilon(1e-15));
  CHECK(NoiseSpec::gaussian_iso(3, 1e-12).rms_norm() ==
        doctest::Approx(0.0).epsilon(1e-5));
  CHECK(NoiseSpec::gaussian_full(2, {0.04, 0.01, 0.01, 0.09}).rms_norm() ==
        doctest::Approx(std::sqrt(0.13)).epsilon(1e-15));

  const double sigma2 = 0.01;
  auto clipped = NoiseSpec::clipped_gaussian(2, sigma2, 4.0 * std::sqrt(sigma2));
  CHECK(clipped.rms_norm() < std::sqrt(2.0 * sigma2));
  // Frozen constant agrees with a fresh Monte Carlo second moment.
  Rng rng(13);
  double acc = 0.0;
  const int n = 400000;
  for (int i = 0; i < n; ++i) {
    Point e = clipped.sample(rng);
    acc += e[0] * e[0] + e[1] * e[1];
  }
  CHECK(clipped.rms_norm() ==
        doctest::Approx(std::sqrt(acc / n)).epsilon(5e-3));
}

TEST_CASE("support gap closed forms") {
  auto seg_a = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  auto seg_b = ManifoldDistribution::segment({0.0, 0.5}, {1.0, 0.5});
  CHECK(support_gap(seg_a, seg_b) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(support_gap(seg_a, seg_a) == 0.0);

  auto pt = ManifoldDistribution::point_cloud({{2.0, 0.0}}, {1.0});
  CHECK(support_gap(seg_a, pt) == doctest::Approx(1.0).epsilon(1e-12));

  auto pair = ManifoldDistribution::parallel_segments(0.5);
  CHECK(support_gap(pair, pt) == doctest::Approx(1.0).epsilon(1e-12));

  auto c1 = ManifoldDistribution::circle({0.0, 0.0}, 1.0);
  auto c2 = ManifoldDistribution::circle({3.0, 0.0}, 1.0);
  CHECK(support_gap(c1, c2) == doctest::Approx(1.0).epsilon(1e-12));
  auto c3 = ManifoldDistribution::circle({0.0, 0.0}, 0.25);
  CHECK(support_gap(c1, c3) == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(support_gap(c1, seg_a) == 0.0);  // segment endpoint on the ring

  auto push = ManifoldDistribution::pushforward(
      Mlp({MlpLayer{Tensor::matrix(1, 2, {1.0, 0.0}), Tensor::row({0.0, 0.0}),
                    ActivationSpec::identity()}}),
      ManifoldDistribution::box_uniform({{0.0, 1.0}}));
  CHECK_THROWS_WITH_AS((void)support_gap(seg_a, push),
                       doctest::Contains("unsupported"),
                       std::invalid_argument);
}

TEST_CASE("gaussian+gaussian convolution is the exact widened gaussian") {
  auto d = ManifoldDistribution::gaussian_iso({0.5}, 0.3);
  auto noise = NoiseSpec::gaussian_iso(1, 0.2);
  Rng rng(14);
  const double got = convolved_density(d, noise, {1.0}, 10, rng);
  const double var = 0.5;       // 0.3 + 0.2
  const double gap = 0.5;       // 1.0 - mean
  const double expected = std::exp(-gap * gap / (2 * var)) /
                          std::sqrt(2 * 3.14159265358979323846 * var);
  CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}
