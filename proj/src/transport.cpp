#include "ganlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <stdexcept>

namespace ganlab {

EmpiricalMeasure::EmpiricalMeasure(std::size_t dim_in,
                                   std::vector<double> points_in,
                                   std::vector<double> weights_in)
    : dim(dim_in), points(std::move(points_in)), weights(std::move(weights_in)) {
  if (dim == 0 || points.empty() || points.size() % dim != 0)
    throw std::invalid_argument("empirical measure: bad point block");
  n = points.size() / dim;
  if (weights.size() != n)
    throw std::invalid_argument("empirical measure: weight count mismatch");
  for (double x : points)
    if (!std::isfinite(x))
      throw std::invalid_argument("empirical measure: non-finite coordinate");
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0 || !std::isfinite(w))
      throw std::invalid_argument(
          "empirical measure: degenerate weights (negative or non-finite)");
    total += w;
  }
  if (!(total > 0.0) || std::abs(total - 1.0) > 1e-6)
    throw std::invalid_argument(
        "empirical measure: degenerate weights (sum " + std::to_string(total) +
        ", expected 1)");
  for (double& w : weights) w /= total;
}

EmpiricalMeasure EmpiricalMeasure::uniform(std::size_t dim,
                                           std::vector<double> points) {
  const std::size_t count = dim == 0 ? 0 : points.size() / dim;
  return EmpiricalMeasure(
      dim, std::move(points),
      std::vector<double>(count, count ? 1.0 / static_cast<double>(count) : 0.0));
}

EmpiricalMeasure EmpiricalMeasure::from_grid(const GridDensity& g) {
  std::vector<double> pts;
  std::vector<double> w;
  const std::size_t d = g.spec().dims();
  for (std::size_t flat = 0; flat < g.mass().size(); ++flat) {
    if (g.mass()[flat] == 0.0) continue;
    const auto c = g.spec().cell_center(flat);
    pts.insert(pts.end(), c.begin(), c.end());
    w.push_back(g.mass()[flat]);
  }
  return EmpiricalMeasure(d, std::move(pts), std::move(w));
}

std::vector<double> Coupling::row_sums() const {
  std::vector<double> r(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) r[i] += flow[i * m + j];
  return r;
}

std::vector<double> Coupling::col_sums() const {
  std::vector<double> c(m, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) c[j] += flow[i * m + j];
  return c;
}

namespace {

constexpr double kCostScale = 1e9;
constexpr double kZeroMass = 1e-15;

}  // namespace

TransportResult wasserstein_exact(const EmpiricalMeasure& a,
                                  const EmpiricalMeasure& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("wasserstein: dimension mismatch");
  const std::size_t n = a.n, m = b.n;
  if (n > 4096 || m > 4096)
    throw std::invalid_argument(
        "wasserstein: measures exceed the 4096-point desk scale");

  // Euclidean costs, plus the integer-scaled copy the solver reasons with.
  std::vector<double> cost(n * m);
  std::vector<std::int64_t> icost(n * m);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.dim; ++k) {
        const double d = a.point(i)[k] - b.point(j)[k];
        s += d * d;
      }
      const double c = std::sqrt(s);
      cost[i * m + j] = c;
      icost[i * m + j] = static_cast<std::int64_t>(std::llround(c * kCostScale));
    }

  std::vector<double> supply = a.weights;
  std::vector<double> demand = b.weights;
  std::vector<double> flow(n * m, 0.0);
  // Sparse backward adjacency: per sink, the sources currently feeding it.
  std::vector<std::vector<std::uint32_t>> feeders(m);

  const std::size_t total_nodes = n + m;
  std::vector<std::int64_t> potential(total_nodes, 0);
  std::vector<std::int64_t> dist(total_nodes);
  std::vector<std::int32_t> parent(total_nodes);
  constexpr std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;

  double remaining = 0.0;
  for (double d : demand) remaining += d;

  const std::size_t max_augmentations = 64 * (n + m) + 65536;
  std::size_t rounds = 0;
  while (remaining > 1e-12) {
    if (++rounds > max_augmentations)
      throw std::runtime_error(
          "wasserstein: augmentation cap exceeded; solver did not converge");

    // Dijkstra on reduced costs from all sources with remaining supply.
    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(parent.begin(), parent.end(), -1);
    using Item = std::pair<std::int64_t, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
    for (std::size_t i = 0; i < n; ++i)
      if (supply[i] > kZeroMass) {
        dist[i] = 0;
        heap.push({0, static_cast<std::uint32_t>(i)});
      }
    while (!heap.empty()) {
      const auto [d0, u] = heap.top();
      heap.pop();
      if (d0 != dist[u]) continue;
      if (u < n) {
        // Forward arcs to every sink.
        const std::size_t i = u;
        for (std::size_t j = 0; j < m; ++j) {
          const std::int64_t rc =
              icost[i * m + j] + potential[i] - potential[n + j];
          const std::int64_t nd = d0 + rc;
          if (nd < dist[n + j]) {
            dist[n + j] = nd;
            parent[n + j] = static_cast<std::int32_t>(i);
            heap.push({nd, static_cast<std::uint32_t>(n + j)});
          }
        }
      } else {
        // Backward arcs along positive flow.
        const std::size_t j = u - n;
        for (std::uint32_t i : feeders[j]) {
          if (flow[i * m + j] <= 0.0) continue;
          const std::int64_t rc =
              -icost[i * m + j] + potential[n + j] - potential[i];
          const std::int64_t nd = d0 + rc;
          if (nd < dist[i]) {
            dist[i] = nd;
            parent[i] = static_cast<std::int32_t>(n + j);
            heap.push({nd, i});
          }
        }
      }
    }

    // Closest sink with unmet demand.
    std::size_t target = m;
    std::int64_t best = kInf;
    for (std::size_t j = 0; j < m; ++j)
      if (demand[j] > kZeroMass && dist[n + j] < best) {
        best = dist[n + j];
        target = j;
      }
    if (target == m)
      throw std::runtime_error("wasserstein: no augmenting path found");

    // Bottleneck along the path.
    double bottleneck = demand[target];
    for (std::size_t v = n + target; parent[v] >= 0;) {
      const std::size_t p = static_cast<std::size_t>(parent[v]);
      if (v >= n) {
        // p -> sink arc (forward); capacity unbounded.
      } else {
        // sink p -> source v backward arc, limited by flow.
        bottleneck = std::min(bottleneck, flow[v * m + (p - n)]);
      }
      v = p;
      if (parent[v] < 0) bottleneck = std::min(bottleneck, supply[v]);
    }

    // Apply the augmentation.
    for (std::size_t v = n + target; parent[v] >= 0;) {
      const std::size_t p = static_cast<std::size_t>(parent[v]);
      if (v >= n) {
        const std::size_t i = p, j = v - n;
        if (flow[i * m + j] == 0.0)
          feeders[j].push_back(static_cast<std::uint32_t>(i));
        flow[i * m + j] += bottleneck;
      } else {
        flow[v * m + (p - n)] -= bottleneck;
      }
      v = p;
      if (parent[v] < 0) supply[v] -= bottleneck;
    }
    demand[target] -= bottleneck;
    remaining -= bottleneck;

    // Johnson potential update keeps reduced costs nonnegative.
    for (std::size_t v = 0; v < total_nodes; ++v)
      potential[v] += std::min(dist[v], best);
  }

  double value = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) value += flow[i * m + j] * cost[i * m + j];

  Coupling plan;
  plan.n = n;
  plan.m = m;
  plan.flow = std::move(flow);
  return TransportResult{
      DivergenceValue::finite_value(value, DivergenceMethod::transport,
                                    "min_cost_flow"),
      std::move(plan)};
}

}  // namespace ganlab
