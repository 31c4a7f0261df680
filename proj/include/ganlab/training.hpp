#pragma once

#include <cstdint>
#include <optional>

#include "ganlab/distributions.hpp"
#include "ganlab/losses.hpp"
#include "ganlab/metrics.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/optim.hpp"

namespace ganlab {

// Network architecture, instantiated with seeded random weights.
struct MlpArch {
  std::vector<std::size_t> dims;
  std::vector<ActivationSpec> acts;
  Mlp build(Rng& rng) const { return Mlp::random(dims, acts, rng); }
};

struct OptimizerSpec {
  Optimizer::Kind kind = Optimizer::Kind::adam;
  double lr = 1e-3;
  Optimizer build() const {
    return kind == Optimizer::Kind::sgd ? Optimizer::sgd(lr)
                                        : Optimizer::adam(lr);
  }
};

// Everything one adversarial-dynamics run needs. The generator itself is
// passed separately (the probes study a frozen generator).
struct GanConfig {
  MlpArch generator;
  MlpArch discriminator;
  ManifoldDistribution prior;
  ManifoldDistribution real;
  GenLossKind gen_loss = GenLossKind::original;
  std::optional<NoiseSpec> noise;  // smooths D inputs when present
  std::size_t batch = 256;
  std::size_t d_steps_per_g_step = 1;
  std::uint64_t seed = 0;
  OptimizerSpec d_optimizer;

  void validate() const;
};

struct TrainProbeOptions {
  long checkpoint_every = 100;
  // Held-out evaluation points per side; accuracy uses both sides together.
  std::size_t heldout_per_side = 5000;
  // Generator-gradient probes at checkpoints.
  bool measure_gen_grads = false;
  GenLossKind gen_grad_kind = GenLossKind::original;
  std::size_t grad_eval_batch = 256;
  // Discrepancy-vs-optimal-discriminator and generator-smoothness bound.
  bool measure_vanishing_bound = false;
  std::size_t probe_points_per_region = 3334;
};

struct TrainedDiscriminator {
  Mlp discriminator;
  MetricSeries series;
  // Median of ||grad_x D|| over the union of both supports, per checkpoint.
  std::vector<double> median_grad_x;
  // Per checkpoint: 1 bound holds, 0 violated, -1 not applicable (eps >= 1
  // or not measured).
  std::vector<int> bound_check;
};

// Trains a fresh discriminator against a frozen generator, recording probe
// rows at checkpoints (iterations 0, k, 2k, ... and the final iteration).
// Throws on divergent (non-finite) loss, naming the iteration.
TrainedDiscriminator train_discriminator(const GanConfig& cfg,
                                         const Mlp& fixed_g, long iters,
                                         const TrainProbeOptions& opts);

// Gradient decay of the original generator objective as D approaches the
// perfect discriminator, with the measured discrepancy eps_hat and
// generator-Jacobian bound m_hat at every checkpoint.
TrainedDiscriminator vanishing_gradient_probe(const GanConfig& cfg,
                                              const Mlp& fixed_g, long iters);

// Gradient growth and across-batch variance of the -log D objective over the
// same schedule.
TrainedDiscriminator logd_instability_probe(const GanConfig& cfg,
                                            const Mlp& fixed_g, long iters);

// Exact distance from x to the support of an analytic distribution; nullopt
// when the support has no closed form (box, gaussian, pushforward).
std::optional<double> distance_to_support(const ManifoldDistribution& dist,
                                          const Point& x);

}  // namespace ganlab
