#pragma once

#include <cstddef>
#include <vector>

#include "ganlab/distributions.hpp"
#include "ganlab/grid.hpp"
#include "ganlab/nn.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

// Checks, on the 1-D Gaussian translation family g_theta(z) = z + theta with
// z ~ N(0, 1) against P_r = N(0, 1), that the expected -log D* update equals
// the theta-gradient of KL(P_g || P_r) - 2 JSD(P_g || P_r). The left side
// uses the discriminator frozen at theta0 and a grid derivative; the right
// side uses central finite differences of the grid divergences.
struct LogDIdentityResult {
  double update = 0.0;       // E_z[-d/dtheta log D*(g_theta(z))] at theta0
  double rhs = 0.0;          // d/dtheta [KL - 2 JSD] at theta0
  double kl_gradient = 0.0;  // d/dtheta KL(P_g || P_r) alone
  double relative_error = 0.0;
};

LogDIdentityResult logd_identity_check(double theta0, const GridSpec& grid,
                                       double fd_step = 1e-3);

// Splits the smoothed-optimal-discriminator generator gradient into its
// attraction-toward-data and repulsion-from-fakes integrals, with the per-z
// positive weights, and cross-checks the sum against the recorded-graph
// gradient of log(1 - D*) computed from independent density estimates.
struct NoisyGradientDecomposition {
  std::vector<double> attraction_weight;  // per z, > 0
  std::vector<double> repulsion_weight;   // per z, > 0
  std::vector<double> density_gap;        // P_{r+eps} - P_{g+eps} at g(z)
  std::vector<double> attraction;         // theta-gradient contribution
  std::vector<double> repulsion;
  std::vector<double> total;              // attraction - repulsion
  std::vector<double> autodiff_gradient;  // oracle route
  double relative_error = 0.0;
};

NoisyGradientDecomposition noisy_gradient_decomposition(
    const ManifoldDistribution& real, const Mlp& generator,
    const ManifoldDistribution& prior, const NoiseSpec& noise,
    const Tensor& z_batch, std::size_t quadrature_samples, Rng& rng);

// Checks, on the 1-D offset-segments family (P_r uniform on [0,1], P_g
// uniform on [theta, 1+theta], isotropic noise), that the expected
// log(1 - D*) gradient through noisy generator samples equals the
// theta-gradient of twice the smoothed JSD. Finite differences reuse the
// same random streams on both sides of the step so the Monte Carlo noise
// cancels.
struct NoisyJsdGradResult {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_error = 0.0;
};

NoisyJsdGradResult noisy_jsd_gradient_check(double offset_theta, double sigma,
                                            const GridSpec& grid,
                                            std::size_t mc_samples, Rng& rng,
                                            double fd_step = 0.02);

}  // namespace ganlab
