#include "ganlab/training.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ganlab {

void GanConfig::validate() const {
  if (batch < 2) throw std::invalid_argument("config: batch must be >= 2");
  if (d_steps_per_g_step < 1)
    throw std::invalid_argument("config: d_steps_per_g_step must be >= 1");
  if (gen_loss == GenLossKind::noisy_original && !noise.has_value())
    throw std::invalid_argument(
        "config: noisy_original generator loss requires a noise spec");
  if (noise.has_value() && noise->dim() != real.ambient_dim())
    throw std::invalid_argument("config: noise dimension mismatch");
}

std::optional<double> distance_to_support(const ManifoldDistribution& dist,
                                          const Point& x) {
  if (const auto* s = std::get_if<SegmentDist>(&dist.kind()))
    return point_segment_distance(x, s->a, s->b);
  if (const auto* c = std::get_if<CircleDist>(&dist.kind())) {
    double r2 = 0.0;
    for (std::size_t i = 0; i < 2; ++i)
      r2 += (x[i] - c->center[i]) * (x[i] - c->center[i]);
    return std::abs(std::sqrt(r2) - c->radius);
  }
  if (const auto* p = std::get_if<ParallelSegmentsDist>(&dist.kind())) {
    const double d1 = point_segment_distance(x, {0.0, 0.0}, {1.0, 0.0});
    const double d2 =
        point_segment_distance(x, {0.0, p->offset}, {1.0, p->offset});
    return std::min(d1, d2);
  }
  if (const auto* pc = std::get_if<PointCloudDist>(&dist.kind())) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& a : pc->atoms) {
      double s = 0.0;
      for (std::size_t i = 0; i < a.size(); ++i)
        s += (x[i] - a[i]) * (x[i] - a[i]);
      best = std::min(best, std::sqrt(s));
    }
    return best;
  }
  return std::nullopt;
}

namespace {

Tensor block_tensor(std::vector<double> flat, std::size_t n, std::size_t d) {
  return Tensor({n, d}, std::move(flat));
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t k = v.size() / 2;
  return v.size() % 2 ? v[k] : 0.5 * (v[k - 1] + v[k]);
}

// Distance from x to a support known only through samples.
double nearest_sample_distance(const std::vector<double>& samples,
                               std::size_t d, const Point& x) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = samples.size() / d;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
      const double diff = x[j] - samples[i * d + j];
      s += diff * diff;
    }
    best = std::min(best, s);
  }
  return std::sqrt(best);
}

// Full-batch generator gradient of the requested objective plus the
// across-batch variance of the per-sample gradients.
struct GenGradStats {
  double norm;
  double variance;
};

GenGradStats generator_gradient(const Mlp& g, const Mlp& d,
                                const Tensor& z_batch, GenLossKind kind,
                                const NoiseSpec* noise, Rng* rng) {
  const std::size_t zb = z_batch.rows();
  // Full-batch gradient.
  std::vector<double> mean_grad;
  {
    GradTape tape;
    MlpParamsHandle gh = g.watch_params(tape);
    Tensor fake = g.apply(tape, gh, z_batch);
    Tensor loss = gen_loss(tape, d, fake, kind, noise, rng);
    GradientMap grads = tape.backward(loss);
    for (const Tensor& p : gh.params) {
      const auto& gp = grads.at(p);
      mean_grad.insert(mean_grad.end(), gp.begin(), gp.end());
    }
  }
  double norm = 0.0;
  for (double v : mean_grad) norm += v * v;
  norm = std::sqrt(norm);

  // Per-sample gradients for the variance; one small tape per sample.
  double var = 0.0;
  const std::size_t zd = z_batch.cols();
  for (std::size_t i = 0; i < zb; ++i) {
    GradTape tape;
    MlpParamsHandle gh = g.watch_params(tape);
    Tensor zi({1, zd}, std::vector<double>(
                           z_batch.data.begin() + i * zd,
                           z_batch.data.begin() + (i + 1) * zd));
    Tensor fake = g.apply(tape, gh, zi);
    Tensor loss = gen_loss(tape, d, fake, kind, noise, rng);
    GradientMap grads = tape.backward(loss);
    std::size_t off = 0;
    double dist2 = 0.0;
    for (const Tensor& p : gh.params) {
      for (double v : grads.at(p)) {
        const double diff = v - mean_grad[off++];
        dist2 += diff * diff;
      }
    }
    var += dist2;
  }
  var /= static_cast<double>(zb);
  return {norm, var};
}

}  // namespace

TrainedDiscriminator train_discriminator(const GanConfig& cfg,
                                         const Mlp& fixed_g, long iters,
                                         const TrainProbeOptions& opts) {
  cfg.validate();
  if (fixed_g.input_dim() != cfg.prior.ambient_dim())
    throw std::invalid_argument("train: generator input != prior dimension");
  if (fixed_g.output_dim() != cfg.real.ambient_dim())
    throw std::invalid_argument("train: generator output != data dimension");
  if (iters < 0) throw std::invalid_argument("train: negative iteration count");

  const std::size_t d = cfg.real.ambient_dim();
  const std::size_t zd = cfg.prior.ambient_dim();

  Rng root(cfg.seed);
  Rng rng_init = root.substream(1);
  Rng rng_batches = root.substream(2);
  Rng rng_heldout = root.substream(3);
  Rng rng_probes = root.substream(4);
  Rng rng_zeval = root.substream(5);
  Rng rng_noise = root.substream(6);

  Mlp disc = cfg.discriminator.build(rng_init);
  Optimizer opt = cfg.d_optimizer.build();

  auto sample_fake_block = [&](std::size_t n, Rng& rng) {
    std::vector<double> zs(n * zd);
    for (std::size_t i = 0; i < n; ++i) {
      Point z = cfg.prior.sample(rng);
      std::copy(z.begin(), z.end(), zs.begin() + i * zd);
    }
    return fixed_g.eval(block_tensor(std::move(zs), n, zd)).data;
  };

  // Held-out evaluation sets, drawn once; when the inputs are smoothed the
  // held-out task is the smoothed pair as well.
  const std::size_t ho = opts.heldout_per_side;
  Tensor real_eval = block_tensor(cfg.real.sample_block(ho, rng_heldout), ho, d);
  Tensor fake_eval = block_tensor(sample_fake_block(ho, rng_heldout), ho, d);
  if (cfg.noise.has_value()) {
    for (std::size_t r = 0; r < ho; ++r) {
      Point e1 = cfg.noise->sample(rng_heldout);
      Point e2 = cfg.noise->sample(rng_heldout);
      for (std::size_t j = 0; j < d; ++j) {
        real_eval.data[r * d + j] += e1[j];
        fake_eval.data[r * d + j] += e2[j];
      }
    }
  }

  // Probe set for the discrepancy-vs-optimal-discriminator measurement:
  // stratified over the real support, the fake support and the gap between
  // them. The optimal discriminator of the disjoint-support case is the
  // nearest-support indicator, with zero gradient taken everywhere probed.
  std::vector<double> probe_pts;
  std::vector<double> probe_dstar;
  std::vector<double> fake_support_samples;
  if (opts.measure_vanishing_bound) {
    const std::size_t per = opts.probe_points_per_region;
    fake_support_samples = sample_fake_block(4096, rng_probes);
    std::vector<double> reals = cfg.real.sample_block(per, rng_probes);
    std::vector<double> fakes = sample_fake_block(per, rng_probes);
    probe_pts.reserve(3 * per * d);
    probe_dstar.reserve(3 * per);
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        probe_pts.push_back(reals[i * d + j]);
      probe_dstar.push_back(1.0);
    }
    for (std::size_t i = 0; i < per; ++i) {
      for (std::size_t j = 0; j < d; ++j)
        probe_pts.push_back(fakes[i * d + j]);
      probe_dstar.push_back(0.0);
    }
    for (std::size_t i = 0; i < per; ++i) {
      const double t = rng_probes.uniform(0.15, 0.85);
      Point p(d);
      for (std::size_t j = 0; j < d; ++j) {
        p[j] = t * reals[i * d + j] + (1.0 - t) * fakes[i * d + j];
        probe_pts.push_back(p[j]);
      }
      const double dist_real =
          distance_to_support(cfg.real, p)
              .value_or(nearest_sample_distance(reals, d, p));
      const double dist_fake = nearest_sample_distance(fake_support_samples, d, p);
      probe_dstar.push_back(dist_real < dist_fake ? 1.0 : 0.0);
    }
  }

  // Fixed z batch for generator-gradient probes.
  Tensor z_eval = Tensor::zeros({1, 1});
  if (opts.measure_gen_grads) {
    std::vector<double> zs(opts.grad_eval_batch * zd);
    for (std::size_t i = 0; i < opts.grad_eval_batch; ++i) {
      Point z = cfg.prior.sample(rng_zeval);
      std::copy(z.begin(), z.end(), zs.begin() + i * zd);
    }
    z_eval = block_tensor(std::move(zs), opts.grad_eval_batch, zd);
  }

  // E ||J_theta g||_F^2 over the eval batch; the generator is frozen, so this
  // is computed once.
  double m_hat = std::numeric_limits<double>::quiet_NaN();
  if (opts.measure_vanishing_bound && opts.measure_gen_grads) {
    double acc = 0.0;
    for (std::size_t i = 0; i < z_eval.rows(); ++i) {
      Tensor zi({1, zd},
                std::vector<double>(z_eval.data.begin() + i * zd,
                                    z_eval.data.begin() + (i + 1) * zd));
      Tensor jac = jacobian(fixed_g, zi, JacobianWrt::parameters);
      double fro2 = 0.0;
      for (double v : jac.data) fro2 += v * v;
      acc += fro2;
    }
    m_hat = std::sqrt(acc / static_cast<double>(z_eval.rows()));
  }

  MetricSeries series;
  std::vector<double> median_grad_x;
  std::vector<int> bound_check;

  auto probe_now = [&](long iteration, const Tensor& last_fake_batch) {
    GradientProbe row;
    row.iteration = iteration;
    row.disc_loss = disc_loss_value(disc, real_eval, fake_eval);
    const Tensor d_real = disc.eval(real_eval);
    const Tensor d_fake = disc.eval(fake_eval);
    std::size_t correct = 0;
    for (double v : d_real.data) correct += v > 0.5;
    for (double v : d_fake.data) correct += v < 0.5;
    row.accuracy =
        static_cast<double>(correct) / static_cast<double>(2 * ho);

    std::vector<double> norms_real = grad_input_row_norms(disc, real_eval);
    std::vector<double> norms_fake = grad_input_row_norms(disc, fake_eval);
    row.grad_x_norm_real = mean_of(norms_real);
    row.grad_x_norm_fake = mean_of(norms_fake);
    std::vector<double> u = norms_real;
    u.insert(u.end(), norms_fake.begin(), norms_fake.end());
    median_grad_x.push_back(median_of(std::move(u)));

    if (opts.measure_gen_grads) {
      const bool noisy = opts.gen_grad_kind == GenLossKind::noisy_original;
      GenGradStats stats = generator_gradient(
          fixed_g, disc, z_eval, opts.gen_grad_kind,
          noisy ? &cfg.noise.value() : nullptr, noisy ? &rng_noise : nullptr);
      row.gen_grad_norm = stats.norm;
      row.grad_var = stats.variance;
    }

    int bound = -1;
    if (opts.measure_vanishing_bound && opts.measure_gen_grads) {
      const std::size_t total = probe_dstar.size();
      std::size_t extra = last_fake_batch.numel() ? last_fake_batch.rows() : 0;
      std::vector<double> pts = probe_pts;
      std::vector<double> dstar = probe_dstar;
      // The current fake evaluation points join the probe set, so the
      // measured sup dominates each per-sample term in the gradient bound.
      for (std::size_t i = 0; i < extra; ++i) {
        for (std::size_t j = 0; j < d; ++j)
          pts.push_back(last_fake_batch.data[i * d + j]);
        dstar.push_back(0.0);
      }
      Tensor pt_tensor = block_tensor(std::move(pts), total + extra, d);
      const Tensor d_out = disc.eval(pt_tensor);
      std::vector<double> gnorms = grad_input_row_norms(disc, pt_tensor);
      double eps = 0.0;
      for (std::size_t i = 0; i < total + extra; ++i)
        eps = std::max(eps, std::abs(d_out.data[i] - dstar[i]) + gnorms[i]);
      row.eps_hat = eps;
      row.m_hat = m_hat;
      if (eps < 1.0) {
        const double rhs = m_hat * eps / (1.0 - eps) + 1e-8;
        bound = row.gen_grad_norm <= rhs ? 1 : 0;
      }
    }
    bound_check.push_back(bound);
    series.push(row);
  };

  // Fake points for the bound probe come from the frozen pushforward; the
  // eval batch doubles as that set.
  Tensor eval_fake_points = Tensor::zeros({1, 1});
  if (opts.measure_gen_grads) eval_fake_points = fixed_g.eval(z_eval);

  for (long i = 0; i <= iters; ++i) {
    const bool checkpoint =
        (opts.checkpoint_every > 0 && i % opts.checkpoint_every == 0) ||
        i == iters;
    if (checkpoint) probe_now(i, eval_fake_points);
    if (i == iters) break;

    Tensor real_batch =
        block_tensor(cfg.real.sample_block(cfg.batch, rng_batches), cfg.batch, d);
    Tensor fake_batch =
        block_tensor(sample_fake_block(cfg.batch, rng_batches), cfg.batch, d);
    if (cfg.noise.has_value()) {
      // Smoothed inputs: both sides see fresh noise each iteration.
      for (std::size_t r = 0; r < cfg.batch; ++r) {
        Point e1 = cfg.noise->sample(rng_noise);
        Point e2 = cfg.noise->sample(rng_noise);
        for (std::size_t j = 0; j < d; ++j) {
          real_batch.data[r * d + j] += e1[j];
          fake_batch.data[r * d + j] += e2[j];
        }
      }
    }

    GradTape tape;
    DiscLossRecord rec = disc_loss(tape, disc, real_batch, fake_batch);
    if (!std::isfinite(rec.loss.item()))
      throw std::runtime_error("train_discriminator: divergent loss at "
                               "iteration " + std::to_string(i));
    GradientMap grads = tape.backward(rec.loss);
    opt.step(disc, grads, rec.params);
  }

  return TrainedDiscriminator{std::move(disc), std::move(series),
                             std::move(median_grad_x), std::move(bound_check)};
}

TrainedDiscriminator vanishing_gradient_probe(const GanConfig& cfg,
                                              const Mlp& fixed_g, long iters) {
  GanConfig c = cfg;
  c.gen_loss = GenLossKind::original;
  TrainProbeOptions opts;
  opts.checkpoint_every = 250;
  opts.measure_gen_grads = true;
  opts.gen_grad_kind = GenLossKind::original;
  opts.measure_vanishing_bound = true;
  return train_discriminator(c, fixed_g, iters, opts);
}

TrainedDiscriminator logd_instability_probe(const GanConfig& cfg,
                                            const Mlp& fixed_g, long iters) {
  GanConfig c = cfg;
  c.gen_loss = GenLossKind::neg_log_d;
  TrainProbeOptions opts;
  opts.checkpoint_every = 250;
  opts.measure_gen_grads = true;
  opts.gen_grad_kind = GenLossKind::neg_log_d;
  opts.measure_vanishing_bound = false;
  return train_discriminator(c, fixed_g, iters, opts);
}

}  // namespace ganlab
