#pragma once

#include <cstddef>
#include <vector>

#include "ganlab/rng.hpp"

namespace ganlab {

struct CauchySimOptions {
  // Updates are averaged over this many prior draws per update.
  std::size_t z_batch = 16;
  double sigma_grad = 1.0;  // scale of the gradient-direction noise r
  double sigma_disc = 1.0;  // scale of the discriminator-value noise
  double top_fraction = 0.01;  // order-statistics share for the tail index
  std::size_t variance_batches = 100;
  std::vector<std::size_t> variance_batch_sizes = {125, 250, 500, 1000};
};

struct CauchyTailStats {
  std::size_t n_draws = 0;
  double gamma = 1.0;  // scale of the matching heavy-tailed law
  double median = 0.0;
  double iqr = 0.0;
  double hill_tail_index = 0.0;
  double p_gt_10 = 0.0, p_gt_100 = 0.0;          // empirical
  double law_p_gt_10 = 0.0, law_p_gt_100 = 0.0;  // 1 - (2/pi) atan(t/gamma)
  std::vector<double> batch_mean_variances;      // per batch size
  bool batch_mean_variance_monotone_decreasing = false;
};

// White-noise model of the -log D generator update: each scalar update is the
// z-batch average of -r/eps with r, eps independent centered Gaussians, so
// every update follows a centered heavy-tailed law of scale
// gamma = sigma_grad / sigma_disc regardless of the batch size. Returns the
// tail statistics plus the batch-mean variance trace used to witness the
// missing second moment.
CauchyTailStats cauchy_update_simulation(std::size_t n_draws,
                                         const CauchySimOptions& opts,
                                         Rng& rng);

// Hill estimator of the tail index from the top `top_fraction` order
// statistics of |values|; ~1 for Cauchy-like tails.
double hill_tail_index(std::vector<double> abs_values, double top_fraction);

// P(|X| > t) for a centered heavy-tailed law of scale gamma.
double cauchy_tail_probability(double t, double gamma);

}  // namespace ganlab
