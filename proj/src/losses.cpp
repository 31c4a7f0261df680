#include "ganlab/losses.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ganlab/divergence.hpp"

namespace ganlab {

const char* gen_loss_name(GenLossKind k) {
  switch (k) {
    case GenLossKind::original: return "original";
    case GenLossKind::neg_log_d: return "neg_log_d";
    case GenLossKind::noisy_original: return "noisy_original";
  }
  return "?";
}

namespace {

void check_batch(const Tensor& batch, const char* what) {
  if (batch.shape.size() != 2 || batch.rows() == 0)
    throw std::invalid_argument(std::string(what) +
                                ": batch must be a non-empty (n, d) block");
}

void check_scalar_head(const Mlp& d) {
  if (d.output_dim() != 1)
    throw std::invalid_argument("discriminator must output one column");
  if (d.layers().back().act.kind != Activation::sigmoid)
    throw std::invalid_argument(
        "discriminator must end in a sigmoid head so outputs lie in (0, 1)");
}

Tensor clamped_log(GradTape& tape, const Tensor& p) {
  return ganlab::log(tape, clamp(tape, p, kProbFloor, 1.0 - kProbFloor));
}

}  // namespace

DiscLossRecord disc_loss(GradTape& tape, const Mlp& discriminator,
                         const Tensor& real_batch, const Tensor& fake_batch) {
  check_batch(real_batch, "disc_loss(real)");
  check_batch(fake_batch, "disc_loss(fake)");
  check_scalar_head(discriminator);

  MlpParamsHandle handle = discriminator.watch_params(tape);
  Tensor d_real = discriminator.apply(tape, handle, real_batch);
  Tensor d_fake = discriminator.apply(tape, handle, fake_batch);

  Tensor real_term = mean_all(tape, clamped_log(tape, d_real));
  Tensor fake_term =
      mean_all(tape, clamped_log(tape, rsub_scalar(tape, 1.0, d_fake)));
  Tensor loss = scale(tape, add(tape, real_term, fake_term), -1.0);
  return DiscLossRecord{loss, std::move(handle)};
}

double disc_loss_value(const Mlp& discriminator, const Tensor& real_batch,
                       const Tensor& fake_batch) {
  check_batch(real_batch, "disc_loss(real)");
  check_batch(fake_batch, "disc_loss(fake)");
  check_scalar_head(discriminator);
  const Tensor d_real = discriminator.eval(real_batch);
  const Tensor d_fake = discriminator.eval(fake_batch);
  auto cl = [](double p) {
    return std::log(std::clamp(p, kProbFloor, 1.0 - kProbFloor));
  };
  double real_term = 0.0, fake_term = 0.0;
  for (double v : d_real.data) real_term += cl(v);
  for (double v : d_fake.data) fake_term += cl(1.0 - v);
  real_term /= static_cast<double>(d_real.numel());
  fake_term /= static_cast<double>(d_fake.numel());
  return -(real_term + fake_term);
}

double disc_loss_on_grids(const GridDensity& pr, const GridDensity& pg) {
  if (!(pr.spec() == pg.spec()))
    throw std::invalid_argument("disc_loss_on_grids: grids differ");
  auto cl = [](double p) {
    return std::log(std::clamp(p, kProbFloor, 1.0 - kProbFloor));
  };
  double real_term = 0.0, fake_term = 0.0;
  for (std::size_t i = 0; i < pr.mass().size(); ++i) {
    const double dstar =
        optimal_discriminator_value(pr.mass()[i], pg.mass()[i]);
    if (pr.mass()[i] > 0.0) real_term += pr.mass()[i] * cl(dstar);
    if (pg.mass()[i] > 0.0) fake_term += pg.mass()[i] * cl(1.0 - dstar);
  }
  return -(real_term + fake_term);
}

Tensor gen_loss(GradTape& tape, const Mlp& discriminator,
                const Tensor& fake_batch, GenLossKind kind,
                const NoiseSpec* noise, Rng* rng) {
  check_batch(fake_batch, "gen_loss(fake)");
  check_scalar_head(discriminator);
  if (kind == GenLossKind::noisy_original) {
    if (noise == nullptr || rng == nullptr)
      throw std::invalid_argument(
          "gen_loss: noisy_original requires a noise spec and rng");
    if (noise->dim() != fake_batch.cols())
      throw std::invalid_argument("gen_loss: noise dimension mismatch");
  } else if (noise != nullptr) {
    throw std::invalid_argument(std::string("gen_loss: kind ") +
                                gen_loss_name(kind) +
                                " does not take a noise spec");
  }

  Tensor input = fake_batch;
  if (kind == GenLossKind::noisy_original) {
    // Fresh draw per sample; gradients still flow through the fake batch.
    const std::size_t n = fake_batch.rows(), d = fake_batch.cols();
    Tensor eps = Tensor::zeros({n, d});
    for (std::size_t i = 0; i < n; ++i) {
      const Point e = noise->sample(*rng);
      for (std::size_t j = 0; j < d; ++j) eps.data[i * d + j] = e[j];
    }
    input = add(tape, fake_batch, eps);
  }

  Tensor d_out = discriminator.apply(tape, input);
  if (kind == GenLossKind::neg_log_d)
    return scale(tape, mean_all(tape, clamped_log(tape, d_out)), -1.0);
  return mean_all(tape, clamped_log(tape, rsub_scalar(tape, 1.0, d_out)));
}

double gen_loss_value(const Mlp& discriminator, const Tensor& fake_batch,
                      GenLossKind kind, const NoiseSpec* noise, Rng* rng) {
  GradTape tape;
  return gen_loss(tape, discriminator, fake_batch, kind, noise, rng).item();
}

}  // namespace ganlab
