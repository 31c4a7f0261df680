#include "ganlab/cauchy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ganlab {

double cauchy_tail_probability(double t, double gamma) {
  return 1.0 - (2.0 / 3.14159265358979323846) * std::atan(t / gamma);
}

double hill_tail_index(std::vector<double> abs_values, double top_fraction) {
  if (abs_values.size() < 100)
    throw std::invalid_argument("hill: need at least 100 values");
  if (!(top_fraction > 0.0 && top_fraction < 0.5))
    throw std::invalid_argument("hill: top_fraction must be in (0, 0.5)");
  const std::size_t k = std::max<std::size_t>(
      10, static_cast<std::size_t>(top_fraction *
                                   static_cast<double>(abs_values.size())));
  std::partial_sort(abs_values.begin(), abs_values.begin() + k + 1,
                    abs_values.end(), std::greater<double>());
  const double log_ref = std::log(abs_values[k]);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) acc += std::log(abs_values[i]) - log_ref;
  return static_cast<double>(k) / acc;
}

namespace {

double quantile_sorted(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(lo);
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac;
}

}  // namespace

CauchyTailStats cauchy_update_simulation(std::size_t n_draws,
                                         const CauchySimOptions& opts,
                                         Rng& rng) {
  if (n_draws < 1000000)
    throw std::invalid_argument(
        "cauchy simulation: need at least 1e6 draws for stable tail "
        "statistics");
  if (opts.z_batch == 0)
    throw std::invalid_argument("cauchy simulation: z_batch must be >= 1");

  auto draw_update = [&](Rng& r) {
    double acc = 0.0;
    for (std::size_t k = 0; k < opts.z_batch; ++k) {
      const double grad = r.normal(0.0, opts.sigma_grad);
      const double disc = r.normal(0.0, opts.sigma_disc);
      acc += -grad / disc;
    }
    return acc / static_cast<double>(opts.z_batch);
  };

  CauchyTailStats stats;
  stats.n_draws = n_draws;
  stats.gamma = opts.sigma_grad / opts.sigma_disc;

  Rng rng_main = rng.substream(1);
  std::vector<double> draws(n_draws);
  for (double& v : draws) v = draw_update(rng_main);

  std::size_t gt10 = 0, gt100 = 0;
  for (double v : draws) {
    const double a = std::abs(v);
    gt10 += a > 10.0;
    gt100 += a > 100.0;
  }
  stats.p_gt_10 = static_cast<double>(gt10) / static_cast<double>(n_draws);
  stats.p_gt_100 = static_cast<double>(gt100) / static_cast<double>(n_draws);
  stats.law_p_gt_10 = cauchy_tail_probability(10.0, stats.gamma);
  stats.law_p_gt_100 = cauchy_tail_probability(100.0, stats.gamma);

  {
    std::vector<double> abs(draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) abs[i] = std::abs(draws[i]);
    stats.hill_tail_index = hill_tail_index(std::move(abs), opts.top_fraction);
  }

  std::sort(draws.begin(), draws.end());
  stats.median = quantile_sorted(draws, 0.5);
  stats.iqr = quantile_sorted(draws, 0.75) - quantile_sorted(draws, 0.25);

  // Batch means from fresh draws: with a finite second moment their variance
  // would halve per size doubling; here it stays erratic.
  Rng rng_batches = rng.substream(2);
  for (std::size_t size : opts.variance_batch_sizes) {
    std::vector<double> means(opts.variance_batches);
    for (double& m : means) {
      double acc = 0.0;
      for (std::size_t i = 0; i < size; ++i) acc += draw_update(rng_batches);
      m = acc / static_cast<double>(size);
    }
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(means.size());
    double var = 0.0;
    for (double m : means) var += (m - mu) * (m - mu);
    var /= static_cast<double>(means.size() - 1);
    stats.batch_mean_variances.push_back(var);
  }
  stats.batch_mean_variance_monotone_decreasing = true;
  for (std::size_t i = 0; i + 1 < stats.batch_mean_variances.size(); ++i)
    if (stats.batch_mean_variances[i + 1] >= stats.batch_mean_variances[i])
      stats.batch_mean_variance_monotone_decreasing = false;

  return stats;
}

}  // namespace ganlab
