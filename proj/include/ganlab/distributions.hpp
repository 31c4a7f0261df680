#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ganlab/nn.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

using Point = std::vector<double>;

// --- noise ------------------------------------------------------------------

struct GaussianIsoNoise {
  double sigma2;
};
struct GaussianFullNoise {
  std::vector<double> cov;  // row-major d x d, SPD
};
// Isotropic Gaussian rejected beyond clip_radius; density renormalized to the
// retained mass so it stays a probability density with compact support.
struct ClippedGaussianNoise {
  double sigma2;
  double clip_radius;
};

class NoiseSpec {
 public:
  static NoiseSpec gaussian_iso(std::size_t dim, double sigma2);
  static NoiseSpec gaussian_full(std::size_t dim, std::vector<double> cov);
  static NoiseSpec clipped_gaussian(std::size_t dim, double sigma2,
                                    double clip_radius);

  std::size_t dim() const { return dim_; }
  bool is_clipped() const;
  double iso_sigma2() const;  // throws unless iso or clipped

  Point sample(Rng& rng) const;
  // Density of the noise at displacement u (length dim).
  double density(const Point& u) const;
  // sqrt(E |eps|^2); closed form for the Gaussian families, frozen
  // Monte Carlo constants for the clipped family at the default 4-sigma
  // radius (analytic truncated-moment ratio otherwise).
  double rms_norm() const;
  // Largest per-axis standard deviation, used for grid coverage margins.
  double max_axis_stddev() const;
  // Support radius: clip radius for clipped noise, +inf otherwise.
  double support_radius() const;

  const std::variant<GaussianIsoNoise, GaussianFullNoise,
                     ClippedGaussianNoise>&
  family() const {
    return family_;
  }

 private:
  NoiseSpec() = default;
  std::size_t dim_ = 0;
  std::variant<GaussianIsoNoise, GaussianFullNoise, ClippedGaussianNoise>
      family_;
  // Cached Cholesky factor for the full-covariance family.
  std::vector<double> chol_;
  double logdet_ = 0.0;
  // Cached retained-mass normalizer for the clipped family.
  double clip_norm_ = 1.0;
};

// --- manifold-supported distributions ----------------------------------------

struct SegmentDist {
  Point a, b;  // uniform on the segment [a, b]
};
struct CircleDist {
  Point center;
  double radius;  // uniform on the circle (the curve, not the disk)
};
// Two horizontal unit segments in R^2, y = 0 and y = offset, equal mass.
struct ParallelSegmentsDist {
  double offset;
};
struct PointCloudDist {
  std::vector<Point> atoms;
  std::vector<double> weights;  // nonnegative, sum 1
};
struct BoxUniformDist {
  std::vector<std::pair<double, double>> bounds;  // per-axis [lo, hi]
};
struct GaussianDist {
  Point mean;
  std::vector<double> cov;  // row-major d x d, SPD
};
struct PushforwardDist {
  std::shared_ptr<const Mlp> generator;
  std::shared_ptr<const class ManifoldDistribution> prior;
};

// A sampler plus, where they exist, an exact density and a support
// description. Immutable after construction; sampling uses caller RNG state.
class ManifoldDistribution {
 public:
  static ManifoldDistribution segment(Point a, Point b);
  static ManifoldDistribution circle(Point center, double radius);
  static ManifoldDistribution parallel_segments(double offset);
  static ManifoldDistribution point_cloud(std::vector<Point> atoms,
                                          std::vector<double> weights);
  static ManifoldDistribution box_uniform(
      std::vector<std::pair<double, double>> bounds);
  static ManifoldDistribution gaussian(Point mean, std::vector<double> cov);
  static ManifoldDistribution gaussian_iso(Point mean, double sigma2);
  static ManifoldDistribution pushforward(Mlp generator,
                                          ManifoldDistribution prior);

  std::size_t ambient_dim() const { return dim_; }
  const std::variant<SegmentDist, CircleDist, ParallelSegmentsDist,
                     PointCloudDist, BoxUniformDist, GaussianDist,
                     PushforwardDist>&
  kind() const {
    return kind_;
  }
  std::string kind_name() const;
  bool is_pushforward() const;
  // Absolutely continuous distributions have a density; singular supports
  // deliberately expose none.
  bool has_density() const;
  std::optional<double> density_at(const Point& x) const;

  Point sample(Rng& rng) const;
  // n i.i.d. samples, flattened row-major (n, d).
  std::vector<double> sample_block(std::size_t n, Rng& rng) const;

  // Axis-aligned box certain to contain the support (6-sigma box for
  // Gaussians). Throws for pushforwards, whose image is not described.
  std::vector<std::pair<double, double>> support_box() const;

 private:
  ManifoldDistribution() = default;
  std::size_t dim_ = 0;
  std::variant<SegmentDist, CircleDist, ParallelSegmentsDist, PointCloudDist,
               BoxUniformDist, GaussianDist, PushforwardDist>
      kind_;
  std::vector<double> gauss_chol_;  // cached for the gaussian kind
};

// Density of dist's noise-smoothed version at x: the expectation of the
// noise density at (x - y) over y ~ dist. Exact finite mixture for point
// clouds, exact convolution for Gaussian+Gaussian, Monte Carlo otherwise.
double convolved_density(const ManifoldDistribution& dist,
                         const NoiseSpec& noise, const Point& x,
                         std::size_t mc_samples, Rng& rng);

// Minimal Euclidean distance between two analytic supports. Closed form for
// point/segment/circle primitives; pushforward and full-dimensional kinds
// are rejected.
double support_gap(const ManifoldDistribution& a,
                   const ManifoldDistribution& b);

// Geometry helpers shared with tests.
double point_segment_distance(const Point& p, const Point& a, const Point& b);
double segment_segment_distance(const Point& a0, const Point& a1,
                                const Point& b0, const Point& b1);

}  // namespace ganlab
