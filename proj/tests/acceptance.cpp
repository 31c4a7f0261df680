// Acceptance suite: runs every headline check at its stated tolerance and
// prints one PASS/FAIL line per criterion. Exit code 0 iff all pass.
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "ganlab/cauchy.hpp"
#include "ganlab/divergence.hpp"
#include "ganlab/experiments.hpp"
#include "ganlab/identities.hpp"
#include "ganlab/losses.hpp"
#include "ganlab/training.hpp"
#include "ganlab/transport.hpp"
#include "oracles.hpp"

using namespace ganlab;

namespace {

int g_failures = 0;

void report(int number, const std::string& name, bool pass,
            const std::string& detail) {
  std::printf("[%s] %2d. %-28s %s\n", pass ? "PASS" : "FAIL", number,
              name.c_str(), detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

std::string out_dir() {
  auto dir = std::filesystem::temp_directory_path() / "ganlab_acceptance";
  std::filesystem::create_directories(dir);
  return dir.string();
}

// 1. Trained discriminator separates disjoint segments perfectly.
void criterion_perfect_discrimination() {
  SegmentGapSetup setup = make_segment_gap_setup(0.5, 0);
  TrainProbeOptions opts;
  opts.checkpoint_every = 100;
  auto res = train_discriminator(setup.config, setup.generator, 5000, opts);
  const auto& rows = res.series.rows();
  const double loss = rows.back().disc_loss;
  const double acc = rows.back().accuracy;
  const double ratio = res.median_grad_x.back() / res.median_grad_x.front();
  const bool pass = loss < 1e-3 && acc == 1.0 && ratio < 0.01;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "loss=%.2e (<1e-3), accuracy=%.4f (=1), grad ratio=%.4f "
                "(<0.01)",
                loss, acc, ratio);
  report(1, "perfect discrimination", pass, buf);
}

// 2. Original-objective generator gradient decays >= 1e3x by iteration 4000
//    and respects the measured discrepancy bound wherever it applies.
void criterion_vanishing_gradients() {
  SegmentGapSetup setup = make_segment_gap_setup(0.5, 0);
  auto res = vanishing_gradient_probe(setup.config, setup.generator, 4000);
  const auto& rows = res.series.rows();
  const double decay = rows.front().gen_grad_norm / rows.back().gen_grad_norm;
  bool bound_ok = true;
  int applicable = 0;
  for (int b : res.bound_check) {
    if (b == 0) bound_ok = false;
    if (b >= 0) ++applicable;
  }
  const bool pass = decay >= 1e3 && bound_ok && applicable > 0;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "decay=%.0fx (>=1000x), bound ok at %d applicable checkpoints",
                decay, applicable);
  report(2, "vanishing gradients", pass, buf);
}

// 3. -log D gradient grows >= 10x with increasing batch variance, 3/3 seeds.
void criterion_logd_instability() {
  bool pass = true;
  double worst_growth = 1e300;
  for (std::uint64_t seed : {0, 1, 2}) {
    SegmentGapSetup setup = make_segment_gap_setup(0.5, seed);
    auto res = logd_instability_probe(setup.config, setup.generator, 4000);
    const auto& rows = res.series.rows();
    const double growth =
        rows.back().gen_grad_norm / rows.front().gen_grad_norm;
    worst_growth = std::min(worst_growth, growth);
    if (growth < 10.0 || !(rows.back().grad_var > rows.front().grad_var))
      pass = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "worst growth=%.1fx (>=10x), variance increased on 3/3 seeds",
                worst_growth);
  report(3, "-log D instability", pass, buf);
}

// 4. White-noise update model is heavy-tailed with index ~1.
void criterion_cauchy_simulation() {
  bool pass = true;
  double hill = 0.0, p10_rel = 0.0, p100_rel = 0.0;
  for (std::uint64_t seed : {0, 1, 2}) {
    Rng rng(seed);
    CauchyTailStats stats = cauchy_update_simulation(1000000, {}, rng);
    if (seed == 0) {
      hill = stats.hill_tail_index;
      p10_rel = std::abs(stats.p_gt_10 - stats.law_p_gt_10) /
                stats.law_p_gt_10;
      p100_rel = std::abs(stats.p_gt_100 - stats.law_p_gt_100) /
                 stats.law_p_gt_100;
      if (hill < 0.9 || hill > 1.1) pass = false;
      if (p10_rel >= 0.2 || p100_rel >= 0.2) pass = false;
    }
    if (stats.batch_mean_variance_monotone_decreasing) pass = false;
  }
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "hill=%.3f (in [0.9,1.1]), tail rel err %.3f/%.3f (<0.2), "
                "batch means non-convergent 3/3",
                hill, p10_rel, p100_rel);
  report(4, "cauchy update simulation", pass, buf);
}

// 5. -log D* update equals grad[KL - 2 JSD] on the translation family.
void criterion_logd_identity() {
  GridSpec grid = GridSpec::uniform(-12.0, 12.0, 4800, 1);
  double worst = 0.0;
  for (double theta0 : {0.5, 1.0, 2.0})
    worst = std::max(worst,
                     logd_identity_check(theta0, grid).relative_error);
  char buf[120];
  std::snprintf(buf, sizeof buf, "worst relative error=%.2e (<1e-2)", worst);
  report(5, "-log D update identity", worst < 1e-2, buf);
}

// 6. Smoothed-gradient decomposition matches its recorded-graph oracle and
//    the weight ordering tracks the smoothed densities at 100/100 probes.
void criterion_noisy_decomposition() {
  const auto real = ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0});
  const auto prior = ManifoldDistribution::box_uniform({{0.0, 1.0}});
  const auto noise = NoiseSpec::gaussian_iso(2, 0.09);
  Mlp gen({MlpLayer{Tensor::matrix(1, 2, {1.0, 0.0}), Tensor::row({0.0, 0.5}),
                    ActivationSpec::identity()}});
  Tensor z = Tensor::zeros({100, 1});
  for (int i = 0; i < 100; ++i) z.data[i] = (i + 0.5) / 100.0;
  Rng rng(0);
  auto dec =
      noisy_gradient_decomposition(real, gen, prior, noise, z, 100000, rng);
  int sign_matches = 0;
  for (int i = 0; i < 100; ++i) {
    const double b_minus_a =
        dec.repulsion_weight[i] - dec.attraction_weight[i];
    if ((b_minus_a > 0.0) == (dec.density_gap[i] > 0.0)) ++sign_matches;
  }
  const bool pass = dec.relative_error < 5e-2 && sign_matches == 100;
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "rel err=%.3f (<0.05), sign matches %d/100", dec.relative_error,
                sign_matches);
  report(6, "noisy gradient decomposition", pass, buf);
}

// 7. Smoothed generator gradient equals twice the smoothed-JSD gradient.
void criterion_noisy_jsd_gradient() {
  GridSpec grid = GridSpec::uniform(-2.5, 4.5, 2800, 1);
  Rng rng(0);
  double worst = 0.0;
  for (double sigma : {0.1, 0.3}) {
    Rng r = rng.substream(static_cast<std::uint64_t>(sigma * 1000));
    worst = std::max(
        worst,
        noisy_jsd_gradient_check(1.0, sigma, grid, 200000, r).relative_error);
  }
  char buf[120];
  std::snprintf(buf, sizeof buf,
                "worst relative error=%.3f (<0.05) at sigma {0.1, 0.3}",
                worst);
  report(7, "noisy jsd gradient", worst < 5e-2, buf);
}

// 8. Exact transport machinery: brute-force equality, noise bound,
//    combined bound, each 100% of its instances.
void criterion_wasserstein_machinery() {
  Rng rng(0);
  double worst_gap = 0.0;
  int brute_ok = 0;
  const int brute_total = 200;
  for (int trial = 0; trial < brute_total; ++trial) {
    Rng r = rng.substream(trial);
    const std::size_t n = 2 + r.uniform_index(6);  // up to 7
    std::vector<double> pa(n * 2), pb(n * 2);
    for (double& v : pa) v = r.uniform(-2.0, 2.0);
    for (double& v : pb) v = r.uniform(-2.0, 2.0);
    const double got = wasserstein_exact(EmpiricalMeasure::uniform(2, pa),
                                         EmpiricalMeasure::uniform(2, pb))
                           .distance.finite();
    const double expected = oracles::brute_force_w1(pa, pb, n, 2);
    worst_gap = std::max(worst_gap, std::abs(got - expected));
    if (std::abs(got - expected) <= 1e-9) ++brute_ok;
  }

  auto noise_rows = noise_bound_checks(100, 128, 0);
  auto combined = combined_bound_checks(100, 128, 0);
  save_bound_rows(noise_rows, out_dir() + "/acceptance_noise_bounds.csv");
  save_bound_rows(combined, out_dir() + "/acceptance_combined_bounds.csv");
  int noise_ok = 0, combined_ok = 0;
  for (const auto& r : noise_rows) noise_ok += r.holds;
  for (const auto& r : combined) combined_ok += r.holds;

  const bool pass =
      brute_ok == brute_total && noise_ok == 100 && combined_ok == 100;
  char buf[180];
  std::snprintf(buf, sizeof buf,
                "brute force %d/200 (worst gap %.1e), noise bound %d/100, "
                "combined bound %d/100",
                brute_ok, worst_gap, noise_ok, combined_ok);
  report(8, "wasserstein machinery", pass, buf);
}

// 9. Grid-disjoint supports saturate the divergences exactly.
void criterion_divergence_saturation() {
  GridSpec grid = GridSpec::uniform(-1.0, 2.0, 200, 2);
  Rng rng(0);
  auto pr = rasterize(ManifoldDistribution::segment({0.0, 0.0}, {1.0, 0.0}),
                      nullptr, grid, {}, rng);
  auto pg = rasterize(ManifoldDistribution::segment({0.0, 0.5}, {1.0, 0.5}),
                      nullptr, grid, {}, rng);
  auto jsd = jsd_grid(pr, pg);
  auto kl_rg = kl_grid(pr, pg);
  auto kl_gr = kl_grid(pg, pr);
  const bool pass = !jsd.is_infinite() && jsd.finite() == kLogTwo &&
                    kl_rg.is_infinite() && kl_gr.is_infinite();
  char buf[140];
  std::snprintf(buf, sizeof buf,
                "jsd=log 2 exactly: %s, both KL directions +inf: %s",
                jsd.finite() == kLogTwo ? "yes" : "no",
                kl_rg.is_infinite() && kl_gr.is_infinite() ? "yes" : "no");
  report(9, "divergence saturation", pass, buf);
}

// 10. Reverse-mode gradients match finite differences; relu-generator images
//     have local dimension at most dim Z.
void criterion_autodiff_soundness() {
  Rng rng(100);
  double worst_rel = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    Rng r = rng.substream(trial);
    const std::size_t in = 2 + r.uniform_index(3);
    Mlp net = Mlp::random({in, 6, 5, 1},
                          {ActivationSpec::tanh(), ActivationSpec::softplus(),
                           ActivationSpec::identity()},
                          r);
    std::vector<double> xv(in);
    for (double& v : xv) v = r.uniform(-2.0, 2.0);
    const Tensor x = Tensor::row(xv);
    GradTape tape;
    ForwardTrace tr = forward(tape, net, x);
    GradientMap grads = tape.backward(sum_all(tape, tr.output));
    const auto& gx = grads.at(tr.input);
    double diff2 = 0.0, ref2 = 0.0;
    const double h = 1e-5;
    for (std::size_t j = 0; j < in; ++j) {
      Tensor xp = x, xm = x;
      xp.data[j] += h;
      xm.data[j] -= h;
      const double fd =
          (net.eval(xp).item() - net.eval(xm).item()) / (2.0 * h);
      diff2 += (gx[j] - fd) * (gx[j] - fd);
      ref2 += fd * fd;
    }
    worst_rel = std::max(worst_rel, std::sqrt(diff2) / std::sqrt(ref2));
  }

  RankProbeResult rank = jacobian_rank_probe(100, 0, 2, 10);
  const bool pass =
      worst_rel < 1e-6 && rank.within_rank == rank.probes;
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "fd rel err=%.2e (<1e-6), rank probe %zu/%zu (worst trailing "
                "ratio %.1e < 1e-8)",
                worst_rel, rank.within_rank, rank.probes, rank.worst_ratio);
  report(10, "autodiff soundness", pass, buf);
}

}  // namespace

int main() {
  std::printf("acceptance suite (outputs under %s)\n", out_dir().c_str());
  criterion_perfect_discrimination();
  criterion_vanishing_gradients();
  criterion_logd_instability();
  criterion_cauchy_simulation();
  criterion_logd_identity();
  criterion_noisy_decomposition();
  criterion_noisy_jsd_gradient();
  criterion_wasserstein_machinery();
  criterion_divergence_saturation();
  criterion_autodiff_soundness();
  if (g_failures == 0)
    std::printf("all 10 criteria passed\n");
  else
    std::printf("%d criteria FAILED\n", g_failures);
  return g_failures == 0 ? 0 : 1;
}
