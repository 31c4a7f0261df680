#include "ganlab/divergence.hpp"

#include <cmath>
#include <stdexcept>

namespace ganlab {

DivergenceValue DivergenceValue::finite_value(double v, DivergenceMethod m,
                                              std::string note) {
  if (!(v >= 0.0) || !std::isfinite(v))
    throw std::invalid_argument("divergence value must be finite and >= 0");
  return DivergenceValue{v, false, m, std::move(note)};
}

DivergenceValue DivergenceValue::infinity(DivergenceMethod m,
                                          std::string note) {
  return DivergenceValue{0.0, true, m, std::move(note)};
}

double DivergenceValue::finite() const {
  if (infinite)
    throw std::logic_error("divergence: value is the +infinity marker");
  return value;
}

namespace {

void check_same_grid(const GridDensity& p, const GridDensity& q,
                     const char* op) {
  if (!(p.spec() == q.spec()))
    throw std::invalid_argument(std::string(op) +
                                ": densities live on different grids");
}

std::string grid_note(const GridDensity& p) {
  std::string s = "grid=";
  for (std::size_t i = 0; i < p.spec().resolution.size(); ++i)
    s += (i ? "x" : "") + std::to_string(p.spec().resolution[i]);
  return s;
}

bool cell_disjoint(const GridDensity& p, const GridDensity& q) {
  for (std::size_t i = 0; i < p.mass().size(); ++i)
    if (p.mass()[i] > 0.0 && q.mass()[i] > 0.0) return false;
  return true;
}

}  // namespace

DivergenceValue kl_grid(const GridDensity& p, const GridDensity& q) {
  check_same_grid(p, q, "kl_grid");
  double s = 0.0;
  for (std::size_t i = 0; i < p.mass().size(); ++i) {
    const double pi = p.mass()[i], qi = q.mass()[i];
    if (pi == 0.0) continue;  // 0 log 0 := 0
    if (qi == 0.0)
      return DivergenceValue::infinity(DivergenceMethod::disjoint_support,
                                       grid_note(p));
    s += pi * std::log(pi / qi);
  }
  // Tiny negatives come only from fp rounding near p == q.
  return DivergenceValue::finite_value(std::max(s, 0.0),
                                       DivergenceMethod::grid, grid_note(p));
}

DivergenceValue jsd_grid(const GridDensity& p, const GridDensity& q) {
  check_same_grid(p, q, "jsd_grid");
  // Disjoint cells: saturated at exactly log 2 (histogram ratios on singular
  // supports are resolution noise, so the exact value is returned instead).
  if (cell_disjoint(p, q))
    return DivergenceValue::finite_value(
        kLogTwo, DivergenceMethod::disjoint_support, grid_note(p));
  double s = 0.0;
  for (std::size_t i = 0; i < p.mass().size(); ++i) {
    const double pi = p.mass()[i], qi = q.mass()[i];
    const double mi = 0.5 * (pi + qi);
    if (pi > 0.0) s += 0.5 * pi * std::log(pi / mi);
    if (qi > 0.0) s += 0.5 * qi * std::log(qi / mi);
  }
  s = std::min(std::max(s, 0.0), kLogTwo);
  return DivergenceValue::finite_value(s, DivergenceMethod::grid, grid_note(p));
}

DivergenceValue tv_grid(const GridDensity& p, const GridDensity& q) {
  check_same_grid(p, q, "tv_grid");
  double s = 0.0;
  for (std::size_t i = 0; i < p.mass().size(); ++i)
    s += std::abs(p.mass()[i] - q.mass()[i]);
  return DivergenceValue::finite_value(std::min(0.5 * s, 1.0),
                                       DivergenceMethod::grid, grid_note(p));
}

double optimal_discriminator_value(double p_density, double q_density) {
  if (p_density < 0.0 || q_density < 0.0)
    throw std::invalid_argument("optimal_discriminator: negative density");
  const double total = p_density + q_density;
  if (total == 0.0) return 0.5;
  return p_density / total;
}

std::vector<double> optimal_discriminator(const GridDensity& pr,
                                          const GridDensity& pg) {
  check_same_grid(pr, pg, "optimal_discriminator");
  std::vector<double> d(pr.mass().size());
  for (std::size_t i = 0; i < d.size(); ++i)
    d[i] = optimal_discriminator_value(pr.mass()[i], pg.mass()[i]);
  return d;
}

double noise_transport_bound(const NoiseSpec& noise) {
  return noise.rms_norm();
}

double wasserstein_jsd_bound(double noise_variance, double support_diameter,
                             double jsd_noisy) {
  if (noise_variance < 0.0 || support_diameter < 0.0 || jsd_noisy < 0.0)
    throw std::invalid_argument("wasserstein_jsd_bound: inputs must be >= 0");
  if (jsd_noisy > kLogTwo + 1e-9)
    throw std::invalid_argument(
        "wasserstein_jsd_bound: jsd exceeds the log 2 ceiling (" +
        std::to_string(jsd_noisy) + "); the JSD computation is broken");
  return 2.0 * std::sqrt(noise_variance) +
         2.0 * support_diameter * std::sqrt(std::min(jsd_noisy, kLogTwo));
}

}  // namespace ganlab
