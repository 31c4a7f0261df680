#pragma once

#include <cstddef>
#include <vector>

#include "ganlab/divergence.hpp"
#include "ganlab/grid.hpp"

namespace ganlab {

// A finitely supported probability measure: n weighted points in R^d.
struct EmpiricalMeasure {
  std::size_t n = 0;
  std::size_t dim = 0;
  std::vector<double> points;   // flat row-major (n, dim)
  std::vector<double> weights;  // nonnegative, sum 1

  EmpiricalMeasure(std::size_t dim, std::vector<double> points,
                   std::vector<double> weights);
  static EmpiricalMeasure uniform(std::size_t dim, std::vector<double> points);
  static EmpiricalMeasure from_grid(const GridDensity& g);

  const double* point(std::size_t i) const { return points.data() + i * dim; }
};

// Transport plan between two empirical measures.
struct Coupling {
  std::size_t n = 0, m = 0;
  std::vector<double> flow;  // row-major (n, m), entries >= 0

  double at(std::size_t i, std::size_t j) const { return flow[i * m + j]; }
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
};

struct TransportResult {
  DivergenceValue distance;
  Coupling plan;
};

// Exact Wasserstein-1 under the Euclidean ground cost, solved as a min-cost
// flow by successive shortest paths with potentials. Costs are scaled to
// integers (1e9) so reduced-cost comparisons are exact and the solver cannot
// cycle; flows stay real-valued.
TransportResult wasserstein_exact(const EmpiricalMeasure& a,
                                  const EmpiricalMeasure& b);

}  // namespace ganlab
