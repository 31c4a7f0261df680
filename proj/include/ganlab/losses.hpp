#pragma once

#include <optional>

#include "ganlab/distributions.hpp"
#include "ganlab/grid.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

// Probabilities are clamped to [kProbFloor, 1 - kProbFloor] inside every log.
inline constexpr double kProbFloor = 1e-12;

enum class GenLossKind { original, neg_log_d, noisy_original };

const char* gen_loss_name(GenLossKind k);

struct DiscLossRecord {
  Tensor loss;            // scalar, minimization form
  MlpParamsHandle params; // discriminator leaves on the tape
};

// Negated two-sided classification objective of the discriminator:
//   -(mean log D(real) + mean log(1 - D(fake))).
// D must map batches to one sigmoid-bounded column in (0, 1).
DiscLossRecord disc_loss(GradTape& tape, const Mlp& discriminator,
                         const Tensor& real_batch, const Tensor& fake_batch);

// Detached evaluation of the same objective.
double disc_loss_value(const Mlp& discriminator, const Tensor& real_batch,
                       const Tensor& fake_batch);

// The objective with the closed-form optimal discriminator substituted,
// evaluated in expectation over two grid densities.
double disc_loss_on_grids(const GridDensity& pr, const GridDensity& pg);

// Generator objectives evaluated on an already-built fake batch (which may be
// recorded on the tape, in which case gradients flow into whatever produced
// it). noisy_original perturbs each sample with a fresh noise draw.
Tensor gen_loss(GradTape& tape, const Mlp& discriminator,
                const Tensor& fake_batch, GenLossKind kind,
                const NoiseSpec* noise = nullptr, Rng* rng = nullptr);

double gen_loss_value(const Mlp& discriminator, const Tensor& fake_batch,
                      GenLossKind kind, const NoiseSpec* noise = nullptr,
                      Rng* rng = nullptr);

}  // namespace ganlab
