#pragma once

#include <string>
#include <vector>

#include "ganlab/distributions.hpp"
#include "ganlab/grid.hpp"

namespace ganlab {

inline constexpr double kLogTwo = 0.6931471805599453;

enum class DivergenceMethod { grid, disjoint_support, closed_form, transport };

// A nonnegative statistical distance; +infinity is an explicit tag, never a
// float infinity, so it cannot leak into downstream arithmetic.
struct DivergenceValue {
  double value = 0.0;
  bool infinite = false;
  DivergenceMethod method = DivergenceMethod::grid;
  std::string note;

  static DivergenceValue finite_value(double v, DivergenceMethod m,
                                      std::string note = {});
  static DivergenceValue infinity(DivergenceMethod m, std::string note = {});

  bool is_infinite() const { return infinite; }
  // Throws when the value is the +infinity marker.
  double finite() const;
};

// KL(p || q) over identical grids; 0 log 0 := 0, and any cell with p > 0 but
// q = 0 yields the +infinity marker.
DivergenceValue kl_grid(const GridDensity& p, const GridDensity& q);

// Jensen-Shannon divergence over identical grids, in [0, log 2]. Cell-disjoint
// supports return exactly log 2.
DivergenceValue jsd_grid(const GridDensity& p, const GridDensity& q);

// Total variation over identical grids, in [0, 1].
DivergenceValue tv_grid(const GridDensity& p, const GridDensity& q);

// Probability that a point came from p rather than q; 1/2 where both vanish.
double optimal_discriminator_value(double p_density, double q_density);

// Cellwise optimal discriminator field between two grid densities.
std::vector<double> optimal_discriminator(const GridDensity& pr,
                                          const GridDensity& pg);

// sqrt(E |eps|^2): an upper bound for the transport distance a noise
// convolution can move a distribution.
double noise_transport_bound(const NoiseSpec& noise);

// 2 sqrt(V) + 2 C sqrt(jsd_noisy): the transport bound combining noise size
// and the smoothed Jensen-Shannon divergence. Rejects jsd_noisy above the
// log 2 ceiling (beyond tolerance), which signals a broken JSD computation.
double wasserstein_jsd_bound(double noise_variance, double support_diameter,
                             double jsd_noisy);

}  // namespace ganlab
