#include "ganlab/identities.hpp"

#include <cmath>
#include <stdexcept>

#include "ganlab/divergence.hpp"

namespace ganlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

RasterOptions strict_raster() {
  RasterOptions opts;
  opts.min_coverage = 0.999;  // grid leak above 1e-3 is an error
  return opts;
}

}  // namespace

LogDIdentityResult logd_identity_check(double theta0, const GridSpec& grid,
                                       double fd_step) {
  if (grid.dims() != 1)
    throw std::invalid_argument("logd_identity_check: grid must be 1-d");
  if (!(fd_step > 0.0))
    throw std::invalid_argument("logd_identity_check: bad fd step");

  Rng unused(0);  // exact rasterization paths draw nothing
  const RasterOptions opts = strict_raster();
  auto family = [&](double theta) {
    return rasterize(ManifoldDistribution::gaussian_iso({theta}, 1.0), nullptr,
                     grid, opts, unused);
  };
  GridDensity pr = family(0.0);
  GridDensity pg0 = family(theta0);

  // Update side: D* frozen at theta0. The pushforward of the prior through
  // g_theta at theta0 is exactly pg0, so the expectation over z becomes a
  // mass-weighted sum of -(log D*)' at the cell centers.
  const std::size_t cells = grid.num_cells();
  const double dx = grid.cell_widths()[0];
  std::vector<double> log_dstar(cells);
  for (std::size_t i = 0; i < cells; ++i) {
    const double p = pr.mass()[i], q = pg0.mass()[i];
    log_dstar[i] = std::log(p) - std::log(p + q);
  }
  double update = 0.0;
  for (std::size_t i = 1; i + 1 < cells; ++i) {
    const double slope = (log_dstar[i + 1] - log_dstar[i - 1]) / (2.0 * dx);
    update += pg0.mass()[i] * (-slope);
  }

  auto objective = [&](double theta) {
    GridDensity pg = family(theta);
    return kl_grid(pg, pr).finite() - 2.0 * jsd_grid(pg, pr).finite();
  };
  const double rhs =
      (objective(theta0 + fd_step) - objective(theta0 - fd_step)) /
      (2.0 * fd_step);
  auto kl_only = [&](double theta) {
    return kl_grid(family(theta), pr).finite();
  };
  const double kl_gradient =
      (kl_only(theta0 + fd_step) - kl_only(theta0 - fd_step)) / (2.0 * fd_step);

  LogDIdentityResult out;
  out.update = update;
  out.rhs = rhs;
  out.kl_gradient = kl_gradient;
  out.relative_error = std::abs(update - rhs) / (std::abs(rhs) + 1e-9);
  return out;
}

NoisyGradientDecomposition noisy_gradient_decomposition(
    const ManifoldDistribution& real, const Mlp& generator,
    const ManifoldDistribution& prior, const NoiseSpec& noise,
    const Tensor& z_batch, std::size_t quadrature_samples, Rng& rng) {
  if (!std::holds_alternative<GaussianIsoNoise>(noise.family()))
    throw std::invalid_argument(
        "noisy_gradient_decomposition: needs isotropic gaussian noise");
  if (z_batch.shape.size() != 2 || z_batch.rows() == 0)
    throw std::invalid_argument("noisy_gradient_decomposition: bad z batch");
  if (quadrature_samples == 0)
    throw std::invalid_argument(
        "noisy_gradient_decomposition: quadrature_samples must be >= 1");

  const std::size_t d = real.ambient_dim();
  const std::size_t zd = z_batch.cols();
  const std::size_t nz = z_batch.rows();
  const double sigma2 = noise.iso_sigma2();
  const double kernel_norm = 1.0 / std::pow(kTwoPi * sigma2,
                                            static_cast<double>(d) / 2.0);

  ManifoldDistribution fake =
      ManifoldDistribution::pushforward(generator, prior);

  // Independent sample sets: one pair estimates the densities entering the
  // weights and integrals, another pair feeds the recorded-graph oracle.
  Rng rng_real = rng.substream(11);
  Rng rng_fake = rng.substream(12);
  Rng rng_real_oracle = rng.substream(13);
  Rng rng_fake_oracle = rng.substream(14);
  std::vector<double> ys_real = real.sample_block(quadrature_samples, rng_real);
  std::vector<double> ys_fake = fake.sample_block(quadrature_samples, rng_fake);
  std::vector<double> ys_real2 =
      real.sample_block(quadrature_samples, rng_real_oracle);
  std::vector<double> ys_fake2 =
      fake.sample_block(quadrature_samples, rng_fake_oracle);

  const std::size_t n_params = generator.parameter_count();
  NoisyGradientDecomposition out;
  out.attraction.assign(n_params, 0.0);
  out.repulsion.assign(n_params, 0.0);
  out.total.assign(n_params, 0.0);
  out.autodiff_gradient.assign(n_params, 0.0);

  auto kernel_stats = [&](const std::vector<double>& ys, const Point& x,
                          double& density, std::vector<double>& weighted_diff) {
    // density = mean_i P_eps(x - y_i); weighted_diff = mean_i P_eps (x - y_i).
    density = 0.0;
    weighted_diff.assign(d, 0.0);
    const std::size_t n = ys.size() / d;
    for (std::size_t i = 0; i < n; ++i) {
      double q = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        const double diff = x[j] - ys[i * d + j];
        q += diff * diff;
      }
      const double e = kernel_norm * std::exp(-q / (2.0 * sigma2));
      density += e;
      for (std::size_t j = 0; j < d; ++j)
        weighted_diff[j] += e * (x[j] - ys[i * d + j]);
    }
    const double inv = 1.0 / static_cast<double>(n);
    density *= inv;
    for (double& v : weighted_diff) v *= inv;
  };

  for (std::size_t iz = 0; iz < nz; ++iz) {
    Tensor zi({1, zd},
              std::vector<double>(z_batch.data.begin() + iz * zd,
                                  z_batch.data.begin() + (iz + 1) * zd));
    const Tensor gv_t = generator.eval(zi);
    Point gv = gv_t.data;

    double p_real, p_fake;
    std::vector<double> wd_real, wd_fake;
    kernel_stats(ys_real, gv, p_real, wd_real);
    kernel_stats(ys_fake, gv, p_fake, wd_fake);
    if (p_real < 1e-300 || p_fake < 1e-300)
      throw std::runtime_error(
          "noisy_gradient_decomposition: smoothed density underflow at a "
          "probe point; increase the noise scale sigma");

    const double a = (1.0 / (2.0 * sigma2)) / (p_fake + p_real);
    const double b = a * p_real / p_fake;
    out.attraction_weight.push_back(a);
    out.repulsion_weight.push_back(b);
    out.density_gap.push_back(p_real - p_fake);

    // grad_theta |g - y|^2 = 2 J^T (g - y); the Monte Carlo integral
    // collapses onto the kernel-weighted mean displacement.
    Tensor jac = jacobian(generator, zi, JacobianWrt::parameters);
    for (std::size_t p = 0; p < n_params; ++p) {
      double attract = 0.0, repel = 0.0;
      for (std::size_t j = 0; j < d; ++j) {
        attract += jac.data[j * n_params + p] * wd_real[j];
        repel += jac.data[j * n_params + p] * wd_fake[j];
      }
      out.attraction[p] += 2.0 * a * attract;
      out.repulsion[p] += 2.0 * b * repel;
    }

    // Oracle: record log(1 - D*) through the generator with kernel-density
    // estimates from the independent sample pair.
    GradTape tape;
    MlpParamsHandle gh = generator.watch_params(tape);
    Tensor gout = generator.apply(tape, gh, zi);
    const double mc_scale =
        kernel_norm / static_cast<double>(quadrature_samples);
    Tensor dens_fake =
        gaussian_kernel_sum(tape, gout, ys_fake2, d, sigma2, mc_scale);
    Tensor dens_real =
        gaussian_kernel_sum(tape, gout, ys_real2, d, sigma2, mc_scale);
    Tensor log1md = sub(tape, ganlab::log(tape, dens_fake),
                        ganlab::log(tape, add(tape, dens_fake, dens_real)));
    GradientMap grads = tape.backward(log1md);
    std::size_t off = 0;
    for (const Tensor& p : gh.params)
      for (double v : grads.at(p)) out.autodiff_gradient[off++] += v;
  }

  const double inv_nz = 1.0 / static_cast<double>(nz);
  double diff2 = 0.0, ref2 = 0.0;
  for (std::size_t p = 0; p < n_params; ++p) {
    out.attraction[p] *= inv_nz;
    out.repulsion[p] *= inv_nz;
    out.total[p] = out.attraction[p] - out.repulsion[p];
    out.autodiff_gradient[p] *= inv_nz;
    const double diff = out.total[p] - out.autodiff_gradient[p];
    diff2 += diff * diff;
    ref2 += out.autodiff_gradient[p] * out.autodiff_gradient[p];
  }
  out.relative_error = std::sqrt(diff2) / (std::sqrt(ref2) + 1e-12);
  return out;
}

NoisyJsdGradResult noisy_jsd_gradient_check(double offset_theta, double sigma,
                                            const GridSpec& grid,
                                            std::size_t mc_samples, Rng& rng,
                                            double fd_step) {
  if (grid.dims() != 1)
    throw std::invalid_argument("noisy_jsd_gradient_check: grid must be 1-d");
  if (!(sigma > 0.0) || !(fd_step > 0.0))
    throw std::invalid_argument("noisy_jsd_gradient_check: bad sigma/step");

  const NoiseSpec noise = NoiseSpec::gaussian_iso(1, sigma * sigma);
  RasterOptions opts = strict_raster();
  opts.mc_samples = mc_samples;

  // Common random numbers: each density family reuses its own stream, so the
  // finite difference sees a smooth function of theta.
  const Rng rng_real = rng.substream(21);
  const Rng rng_fake = rng.substream(22);

  auto raster_real = [&]() {
    Rng r = rng_real;
    return rasterize(ManifoldDistribution::segment({0.0}, {1.0}), &noise, grid,
                     opts, r);
  };
  auto raster_fake = [&](double theta) {
    Rng r = rng_fake;
    return rasterize(
        ManifoldDistribution::segment({theta}, {1.0 + theta}), &noise, grid,
        opts, r);
  };

  GridDensity pr = raster_real();
  GridDensity pg0 = raster_fake(offset_theta);

  // Expected log(1 - D*) gradient through noisy generator samples: the law of
  // g_theta(z) + eps' is exactly the smoothed fake density, so the z and eps'
  // expectation is a mass-weighted sum of d/dx log(1 - D*).
  const std::size_t cells = grid.num_cells();
  const double dx = grid.cell_widths()[0];
  std::vector<double> log1md(cells, 0.0);
  std::vector<bool> valid(cells, false);
  for (std::size_t i = 0; i < cells; ++i) {
    const double p = pr.mass()[i], q = pg0.mass()[i];
    if (q > 0.0) {
      log1md[i] = std::log(q) - std::log(p + q);
      valid[i] = true;
    }
  }
  double lhs = 0.0;
  for (std::size_t i = 1; i + 1 < cells; ++i) {
    if (!valid[i - 1] || !valid[i + 1]) continue;
    const double slope = (log1md[i + 1] - log1md[i - 1]) / (2.0 * dx);
    lhs += pg0.mass()[i] * slope;
  }

  auto jsd_at = [&](double theta) {
    return jsd_grid(pr, raster_fake(theta)).finite();
  };
  const double rhs = 2.0 *
                     (jsd_at(offset_theta + fd_step) -
                      jsd_at(offset_theta - fd_step)) /
                     (2.0 * fd_step);

  NoisyJsdGradResult out;
  out.lhs = lhs;
  out.rhs = rhs;
  out.relative_error = std::abs(lhs - rhs) / (std::abs(rhs) + 1e-9);
  return out;
}

}  // namespace ganlab
