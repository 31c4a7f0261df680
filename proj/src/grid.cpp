#include "ganlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ganlab {

GridSpec GridSpec::uniform(double lo, double hi, std::size_t cells_per_axis,
                           std::size_t dims) {
  GridSpec g;
  g.bounds.assign(dims, {lo, hi});
  g.resolution.assign(dims, cells_per_axis);
  g.validate();
  return g;
}

void GridSpec::validate() const {
  if (bounds.empty() || bounds.size() != resolution.size())
    throw std::invalid_argument("grid: bounds/resolution mismatch");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i].first < bounds[i].second))
      throw std::invalid_argument("grid: need lo < hi on axis " +
                                  std::to_string(i));
    if (resolution[i] == 0)
      throw std::invalid_argument("grid: zero resolution on axis " +
                                  std::to_string(i));
  }
}

std::size_t GridSpec::num_cells() const {
  std::size_t n = 1;
  for (std::size_t r : resolution) n *= r;
  return n;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < bounds.size(); ++i)
    v *= (bounds[i].second - bounds[i].first) /
         static_cast<double>(resolution[i]);
  return v;
}

std::vector<double> GridSpec::cell_widths() const {
  std::vector<double> w(bounds.size());
  for (std::size_t i = 0; i < bounds.size(); ++i)
    w[i] = (bounds[i].second - bounds[i].first) /
           static_cast<double>(resolution[i]);
  return w;
}

std::vector<double> GridSpec::cell_center(std::size_t flat) const {
  std::vector<double> c(bounds.size());
  for (std::size_t axis = bounds.size(); axis-- > 0;) {
    const std::size_t idx = flat % resolution[axis];
    flat /= resolution[axis];
    const double w = (bounds[axis].second - bounds[axis].first) /
                     static_cast<double>(resolution[axis]);
    c[axis] = bounds[axis].first + (static_cast<double>(idx) + 0.5) * w;
  }
  return c;
}

long GridSpec::cell_of(const std::vector<double>& x) const {
  if (x.size() != bounds.size())
    throw std::invalid_argument("grid: point dimension mismatch");
  long flat = 0;
  for (std::size_t axis = 0; axis < bounds.size(); ++axis) {
    const auto [lo, hi] = bounds[axis];
    if (!(x[axis] >= lo && x[axis] <= hi)) return -1;  // also rejects NaN
    const double w = (hi - lo) / static_cast<double>(resolution[axis]);
    long idx = static_cast<long>((x[axis] - lo) / w);
    idx = std::clamp<long>(idx, 0, static_cast<long>(resolution[axis]) - 1);
    flat = flat * static_cast<long>(resolution[axis]) + idx;
  }
  return flat;
}

bool GridSpec::operator==(const GridSpec& other) const {
  return bounds == other.bounds && resolution == other.resolution;
}

GridDensity::GridDensity(GridSpec spec, std::vector<double> masses)
    : spec_(std::move(spec)), mass_(std::move(masses)) {
  spec_.validate();
  if (mass_.size() != spec_.num_cells())
    throw std::invalid_argument("grid density: cell count mismatch");
  double total = 0.0;
  for (double m : mass_) {
    if (m < 0.0 || !std::isfinite(m))
      throw std::invalid_argument("grid density: masses must be finite and "
                                  ">= 0");
    total += m;
  }
  if (total <= 0.0)
    throw std::invalid_argument("grid density: total mass must be positive");
  for (double& m : mass_) m /= total;
}

double GridDensity::density_at_cell(std::size_t flat) const {
  return mass_[flat] / spec_.cell_volume();
}

void GridDensity::save_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const std::size_t d = spec_.dims();
  for (std::size_t i = 0; i < d; ++i) out << "i" << i << ",";
  out << "mass\n";
  char buf[64];
  for (std::size_t flat = 0; flat < mass_.size(); ++flat) {
    std::size_t rem = flat;
    std::vector<std::size_t> idx(d);
    for (std::size_t axis = d; axis-- > 0;) {
      idx[axis] = rem % spec_.resolution[axis];
      rem /= spec_.resolution[axis];
    }
    for (std::size_t axis = 0; axis < d; ++axis) out << idx[axis] << ",";
    std::snprintf(buf, sizeof buf, "%.17g", mass_[flat]);
    out << buf << "\n";
  }

  nlohmann::json side;
  side["bounds"] = nlohmann::json::array();
  for (const auto& [lo, hi] : spec_.bounds)
    side["bounds"].push_back({lo, hi});
  side["resolution"] = spec_.resolution;
  side["coverage"] = coverage_;
  std::ofstream sidecar(path + ".json");
  sidecar << side.dump(2) << "\n";
}

GridDensity GridDensity::load_csv(const std::string& path) {
  std::ifstream side_in(path + ".json");
  if (!side_in) throw std::runtime_error("cannot open " + path + ".json");
  nlohmann::json side = nlohmann::json::parse(side_in);
  GridSpec spec;
  for (const auto& b : side.at("bounds"))
    spec.bounds.emplace_back(b.at(0).get<double>(), b.at(1).get<double>());
  spec.resolution = side.at("resolution").get<std::vector<std::size_t>>();
  spec.validate();

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> mass(spec.num_cells(), 0.0);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string tok;
    std::size_t flat = 0;
    for (std::size_t axis = 0; axis < spec.dims(); ++axis) {
      std::getline(ss, tok, ',');
      flat = flat * spec.resolution[axis] + std::stoul(tok);
    }
    std::getline(ss, tok, ',');
    mass[flat] = std::stod(tok);
  }
  GridDensity g(spec, std::move(mass));
  if (side.contains("coverage")) g.set_coverage(side["coverage"].get<double>());
  return g;
}

namespace {

[[noreturn]] void coverage_error(const char* what, double leak) {
  char buf[160];
  std::snprintf(buf, sizeof buf,
                "rasterize: grid does not cover the %s; leaked mass fraction "
                "%.6g",
                what, leak);
  throw std::invalid_argument(buf);
}

// Adds kernel-density contributions of one sample to every cell whose center
// lies within `radius` of it. Truncation at 5 sigma leaves relative mass
// error below 1e-5.
void scatter_kernel(const GridSpec& grid, const NoiseSpec& noise,
                    const std::vector<double>& y, double radius,
                    std::vector<double>& density) {
  const std::size_t d = grid.dims();
  const std::vector<double> w = grid.cell_widths();
  std::vector<long> lo_idx(d), hi_idx(d);
  for (std::size_t axis = 0; axis < d; ++axis) {
    const double lo = grid.bounds[axis].first;
    long a = static_cast<long>(std::floor((y[axis] - radius - lo) / w[axis]));
    long b = static_cast<long>(std::floor((y[axis] + radius - lo) / w[axis]));
    lo_idx[axis] = std::max<long>(a, 0);
    hi_idx[axis] = std::min<long>(b, static_cast<long>(grid.resolution[axis]) - 1);
    if (lo_idx[axis] > hi_idx[axis]) return;
  }
  std::vector<long> idx = lo_idx;
  std::vector<double> u(d);
  while (true) {
    std::size_t flat = 0;
    for (std::size_t axis = 0; axis < d; ++axis) {
      flat = flat * grid.resolution[axis] + static_cast<std::size_t>(idx[axis]);
      u[axis] = grid.bounds[axis].first +
                (static_cast<double>(idx[axis]) + 0.5) * w[axis] - y[axis];
    }
    density[flat] += noise.density(u);
    // Odometer increment over the window.
    std::size_t axis = d;
    while (axis-- > 0) {
      if (++idx[axis] <= hi_idx[axis]) break;
      idx[axis] = lo_idx[axis];
      if (axis == 0) return;
    }
  }
}

std::vector<double> curve_points(const ManifoldDistribution& dist,
                                 std::size_t steps) {
  // Midpoint samples in parameter space; uniform speed for both kinds, so
  // equal parameter weight equals equal arc-length weight.
  std::vector<double> pts;
  pts.reserve(steps * 2);
  if (const auto* s = std::get_if<SegmentDist>(&dist.kind())) {
    const std::size_t d = s->a.size();
    pts.resize(steps * d);
    for (std::size_t i = 0; i < steps; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(steps);
      for (std::size_t j = 0; j < d; ++j)
        pts[i * d + j] = s->a[j] + t * (s->b[j] - s->a[j]);
    }
    return pts;
  }
  if (const auto* c = std::get_if<CircleDist>(&dist.kind())) {
    pts.resize(steps * 2);
    for (std::size_t i = 0; i < steps; ++i) {
      const double ang = 6.283185307179586 *
                         ((static_cast<double>(i) + 0.5) / static_cast<double>(steps));
      pts[i * 2] = c->center[0] + c->radius * std::cos(ang);
      pts[i * 2 + 1] = c->center[1] + c->radius * std::sin(ang);
    }
    return pts;
  }
  if (const auto* p = std::get_if<ParallelSegmentsDist>(&dist.kind())) {
    const std::size_t half = steps / 2;
    pts.resize(half * 4);
    for (std::size_t i = 0; i < half; ++i) {
      const double t = (static_cast<double>(i) + 0.5) / static_cast<double>(half);
      pts[i * 2] = t;
      pts[i * 2 + 1] = 0.0;
      pts[(half + i) * 2] = t;
      pts[(half + i) * 2 + 1] = p->offset;
    }
    return pts;
  }
  throw std::logic_error("curve_points: not a curve");
}

}  // namespace

GridDensity rasterize(const ManifoldDistribution& dist, const NoiseSpec* noise,
                      const GridSpec& grid, const RasterOptions& opts,
                      Rng& rng) {
  grid.validate();
  if (grid.dims() != dist.ambient_dim())
    throw std::invalid_argument("rasterize: grid dimension mismatch");

  const std::size_t cells = grid.num_cells();

  if (noise != nullptr) {
    if (noise->dim() != dist.ambient_dim())
      throw std::invalid_argument("rasterize: noise dimension mismatch");
    // Structural margin check: support plus 5 noise deviations must fit.
    if (!dist.is_pushforward()) {
      const auto box = dist.support_box();
      const double margin = std::min(5.0 * noise->max_axis_stddev(),
                                     noise->support_radius());
      for (std::size_t axis = 0; axis < grid.dims(); ++axis) {
        if (box[axis].first - margin < grid.bounds[axis].first ||
            box[axis].second + margin > grid.bounds[axis].second)
          coverage_error("support plus noise margin", 1.0);
      }
    }

    std::vector<double> density(cells, 0.0);
    const bool iso_like = !std::holds_alternative<GaussianFullNoise>(
        noise->family());
    if (iso_like && grid.dims() <= 3) {
      const double sigma = noise->max_axis_stddev();
      const double radius = std::min(5.0 * sigma, noise->support_radius());
      std::vector<double> ys = dist.sample_block(opts.mc_samples, rng);
      std::vector<double> y(grid.dims());
      for (std::size_t i = 0; i < opts.mc_samples; ++i) {
        for (std::size_t j = 0; j < grid.dims(); ++j)
          y[j] = ys[i * grid.dims() + j];
        scatter_kernel(grid, *noise, y, radius, density);
      }
      for (double& v : density) v /= static_cast<double>(opts.mc_samples);
    } else {
      std::vector<double> ys = dist.sample_block(opts.mc_samples, rng);
      std::vector<double> u(grid.dims());
      for (std::size_t flat = 0; flat < cells; ++flat) {
        const auto c = grid.cell_center(flat);
        double s = 0.0;
        for (std::size_t i = 0; i < opts.mc_samples; ++i) {
          for (std::size_t j = 0; j < grid.dims(); ++j)
            u[j] = c[j] - ys[i * grid.dims() + j];
          s += noise->density(u);
        }
        density[flat] = s / static_cast<double>(opts.mc_samples);
      }
    }
    const double vol = grid.cell_volume();
    double captured = 0.0;
    for (double& v : density) {
      v *= vol;
      captured += v;
    }
    if (captured < opts.min_coverage)
      coverage_error("noise-smoothed mass", 1.0 - captured);
    GridDensity out(grid, std::move(density));
    out.set_coverage(captured);
    return out;
  }

  // Singular / exact paths.
  std::vector<double> mass(cells, 0.0);
  double captured = 1.0;

  if (const auto* pc = std::get_if<PointCloudDist>(&dist.kind())) {
    double leaked = 0.0;
    for (std::size_t i = 0; i < pc->atoms.size(); ++i) {
      const long cell = grid.cell_of(pc->atoms[i]);
      if (cell < 0)
        leaked += pc->weights[i];
      else
        mass[static_cast<std::size_t>(cell)] += pc->weights[i];
    }
    if (leaked > 1.0 - opts.min_coverage) coverage_error("atoms", leaked);
    captured = 1.0 - leaked;
  } else if (const auto* box = std::get_if<BoxUniformDist>(&dist.kind())) {
    // Exact overlap volume per cell.
    const std::size_t d = grid.dims();
    const auto w = grid.cell_widths();
    double box_vol = 1.0;
    for (const auto& [lo, hi] : box->bounds) box_vol *= hi - lo;
    for (std::size_t flat = 0; flat < cells; ++flat) {
      const auto c = grid.cell_center(flat);
      double overlap = 1.0;
      for (std::size_t axis = 0; axis < d; ++axis) {
        const double clo = c[axis] - 0.5 * w[axis];
        const double chi = c[axis] + 0.5 * w[axis];
        const double lo = std::max(clo, box->bounds[axis].first);
        const double hi = std::min(chi, box->bounds[axis].second);
        overlap *= std::max(0.0, hi - lo);
      }
      mass[flat] = overlap / box_vol;
    }
    captured = 0.0;
    for (double m : mass) captured += m;
    if (captured < opts.min_coverage)
      coverage_error("box support", 1.0 - captured);
  } else if (std::holds_alternative<GaussianDist>(dist.kind())) {
    const double vol = grid.cell_volume();
    captured = 0.0;
    for (std::size_t flat = 0; flat < cells; ++flat) {
      mass[flat] = *dist.density_at(grid.cell_center(flat)) * vol;
      captured += mass[flat];
    }
    if (captured < opts.min_coverage)
      coverage_error("gaussian mass", 1.0 - captured);
  } else if (std::holds_alternative<SegmentDist>(dist.kind()) ||
             std::holds_alternative<CircleDist>(dist.kind()) ||
             std::holds_alternative<ParallelSegmentsDist>(dist.kind())) {
    const std::vector<double> pts = curve_points(dist, opts.curve_steps);
    const std::size_t d = grid.dims();
    const std::size_t n = pts.size() / d;
    const double w = 1.0 / static_cast<double>(n);
    double leaked = 0.0;
    std::vector<double> p(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) p[j] = pts[i * d + j];
      const long cell = grid.cell_of(p);
      if (cell < 0)
        leaked += w;
      else
        mass[static_cast<std::size_t>(cell)] += w;
    }
    if (leaked > 1.0 - opts.min_coverage) coverage_error("curve", leaked);
    captured = 1.0 - leaked;
  } else {
    // Pushforward image: histogram of samples.
    const std::size_t n = opts.histogram_samples;
    const std::size_t d = grid.dims();
    std::vector<double> xs = dist.sample_block(n, rng);
    const double w = 1.0 / static_cast<double>(n);
    double leaked = 0.0;
    std::vector<double> p(d);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < d; ++j) p[j] = xs[i * d + j];
      const long cell = grid.cell_of(p);
      if (cell < 0)
        leaked += w;
      else
        mass[static_cast<std::size_t>(cell)] += w;
    }
    if (leaked > 1.0 - opts.min_coverage) coverage_error("samples", leaked);
    captured = 1.0 - leaked;
  }

  GridDensity out(grid, std::move(mass));
  out.set_coverage(captured);
  return out;
}

}  // namespace ganlab
