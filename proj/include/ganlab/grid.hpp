#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "ganlab/distributions.hpp"
#include "ganlab/rng.hpp"

namespace ganlab {

// Regular lattice over an axis-aligned box; cells are indexed row-major with
// axis 0 slowest.
struct GridSpec {
  std::vector<std::pair<double, double>> bounds;
  std::vector<std::size_t> resolution;

  static GridSpec uniform(double lo, double hi, std::size_t cells_per_axis,
                          std::size_t dims);

  std::size_t dims() const { return bounds.size(); }
  std::size_t num_cells() const;
  double cell_volume() const;
  std::vector<double> cell_widths() const;
  std::vector<double> cell_center(std::size_t flat) const;
  // Flat index of the cell containing x, or -1 if outside the box.
  long cell_of(const std::vector<double>& x) const;
  bool operator==(const GridSpec& other) const;

  void validate() const;
};

// Discretized probability masses over a GridSpec; masses sum to 1.
class GridDensity {
 public:
  GridDensity(GridSpec spec, std::vector<double> masses);

  const GridSpec& spec() const { return spec_; }
  const std::vector<double>& mass() const { return mass_; }
  double mass_at(std::size_t flat) const { return mass_[flat]; }
  // Fraction of total mass the grid captured before normalization.
  double coverage() const { return coverage_; }
  void set_coverage(double c) { coverage_ = c; }

  // Density (mass per volume) at the given cell.
  double density_at_cell(std::size_t flat) const;

  // CSV of (cell_index..., mass) plus a JSON sidecar (<path>.json) holding
  // bounds, resolution and coverage.
  void save_csv(const std::string& path) const;
  static GridDensity load_csv(const std::string& path);

 private:
  GridSpec spec_;
  std::vector<double> mass_;
  double coverage_ = 1.0;
};

struct RasterOptions {
  // Draws for the Monte Carlo noise convolution (shared across all cells).
  std::size_t mc_samples = 20000;
  // Sample count for histogram rasterization of pushforward images.
  std::size_t histogram_samples = 100000;
  // Steps for the deterministic parameter quadrature of curves.
  std::size_t curve_steps = 400000;
  // Required captured-mass fraction before normalization.
  double min_coverage = 0.999;
};

// Discretizes `dist`, optionally convolved with `noise`, onto `grid`.
// Absolutely continuous results evaluate the (estimated) density at cell
// centers; singular supports are rasterized exactly (atoms, boxes), by
// parameter quadrature (curves) or by sample histograms (pushforwards).
// Throws if the grid captures less than min_coverage of the mass, reporting
// the leaked fraction.
GridDensity rasterize(const ManifoldDistribution& dist, const NoiseSpec* noise,
                      const GridSpec& grid, const RasterOptions& opts,
                      Rng& rng);

}  // namespace ganlab
