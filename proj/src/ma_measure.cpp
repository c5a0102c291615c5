#include "hrma/ma_measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <stdexcept>

#include "hrma/format.hpp"
#include "hrma/ray_evolution.hpp"

namespace hrma::mass {
namespace {

double cross(Point o, Point a, Point b) {
  return (a.t - o.t) * (b.y - o.y) - (a.y - o.y) * (b.t - o.t);
}

// Area of the convex hull (Andrew's monotone chain).
double hull_area(std::vector<Point> pts) {
  std::sort(pts.begin(), pts.end(),
            [](Point p, Point q) { return p.t < q.t || (p.t == q.t && p.y < q.y); });
  if (pts.size() < 3) return 0.0;
  std::vector<Point> h(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], p) <= 0) --k;
    h[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lo = k + 1; i-- > 0;) {
    while (k >= lo && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  double area = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& p = h[i];
    const auto& q = h[(i + 1) % h.size()];
    area += p.t * q.y - q.t * p.y;
  }
  return 0.5 * std::abs(area);
}

double overlap(const Interval& a, const Interval& b) {
  return std::min(a.hi, b.hi) - std::max(a.lo, b.lo);
}

void rasterize(OccupancyRaster& raster, std::span<const SubgradientChord> chords) {
  std::map<std::size_t, std::vector<const SubgradientChord*>> sheets;
  for (const auto& c : chords) {
    raster.mark_segment(c.p0, c.p1);
    sheets[c.sheet].push_back(&c);
  }
  for (auto& [id, sheet] : sheets) {
    std::stable_sort(sheet.begin(), sheet.end(),
                     [](const auto* a, const auto* b) { return a->s < b->s; });
    for (std::size_t k = 0; k + 1 < sheet.size(); ++k) {
      const auto& c = *sheet[k];
      const auto& n = *sheet[k + 1];
      const Point quad[4] = {c.p0, c.p1, n.p1, n.p0};
      raster.fill_polygon(quad);
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// OccupancyRaster

OccupancyRaster::OccupancyRaster(Box box, std::size_t cells_t, std::size_t cells_y)
    : box_(box),
      nt_(cells_t),
      ny_(cells_y),
      dt_((box.t_hi - box.t_lo) / static_cast<double>(cells_t)),
      dy_((box.y_hi - box.y_lo) / static_cast<double>(cells_y)),
      cells_(cells_t * cells_y, 0) {
  if (cells_t == 0 || cells_y == 0 || !(dt_ > 0.0) || !(dy_ > 0.0))
    throw std::invalid_argument("OccupancyRaster: empty box or zero cells");
}

Point OccupancyRaster::center(std::size_t i, std::size_t j) const {
  return {box_.t_lo + (static_cast<double>(i) + 0.5) * dt_,
          box_.y_lo + (static_cast<double>(j) + 0.5) * dy_};
}

void OccupancyRaster::mark_segment(Point p, Point q) {
  const double steps_t = std::abs(q.t - p.t) / dt_;
  const double steps_y = std::abs(q.y - p.y) / dy_;
  const auto steps = static_cast<std::size_t>(std::ceil(4.0 * std::max(steps_t, steps_y))) + 1;
  for (std::size_t k = 0; k <= steps; ++k) {
    const double lam = static_cast<double>(k) / static_cast<double>(steps);
    const double t = p.t + lam * (q.t - p.t);
    const double y = p.y + lam * (q.y - p.y);
    const double fi = std::floor((t - box_.t_lo) / dt_);
    const double fj = std::floor((y - box_.y_lo) / dy_);
    if (fi < 0 || fj < 0 || fi >= static_cast<double>(nt_) || fj >= static_cast<double>(ny_))
      continue;
    mark(static_cast<std::size_t>(fi), static_cast<std::size_t>(fj));
  }
}

void OccupancyRaster::fill_polygon(std::span<const Point> polygon) {
  if (polygon.size() < 3) return;
  double y_min = polygon[0].y, y_max = polygon[0].y;
  for (const auto& p : polygon) {
    y_min = std::min(y_min, p.y);
    y_max = std::max(y_max, p.y);
  }
  const double j_lo = std::max(0.0, std::ceil((y_min - box_.y_lo) / dy_ - 0.5));
  const double j_hi = std::min(static_cast<double>(ny_) - 1.0, std::floor((y_max - box_.y_lo) / dy_ - 0.5));
  std::vector<double> xs;
  for (double fj = j_lo; fj <= j_hi; fj += 1.0) {
    const auto j = static_cast<std::size_t>(fj);
    const double yc = box_.y_lo + (fj + 0.5) * dy_;
    xs.clear();
    for (std::size_t k = 0; k < polygon.size(); ++k) {
      const auto& a = polygon[k];
      const auto& b = polygon[(k + 1) % polygon.size()];
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y))
        xs.push_back(a.t + (yc - a.y) * (b.t - a.t) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const double i_lo = std::max(0.0, std::ceil((xs[k] - box_.t_lo) / dt_ - 0.5));
      const double i_hi =
          std::min(static_cast<double>(nt_) - 1.0, std::floor((xs[k + 1] - box_.t_lo) / dt_ - 0.5));
      for (double fi = i_lo; fi <= i_hi; fi += 1.0) mark(static_cast<std::size_t>(fi), j);
    }
  }
}

std::size_t OccupancyRaster::occupied_count() const {
  return static_cast<std::size_t>(std::count(cells_.begin(), cells_.end(), std::uint8_t{1}));
}

// ---------------------------------------------------------------------------
// Chords and areas

std::vector<SubgradientChord> chords(const toric::ToricCauchyData& data,
                                     std::span<const double> s_mesh, std::size_t moment_nodes) {
  if (data.dimension() != 1)
    throw std::invalid_argument("chords: implemented for one space dimension");
  for (std::size_t k = 1; k < s_mesh.size(); ++k)
    if (!(s_mesh[k] > s_mesh[k - 1]))
      throw std::invalid_argument("chords: s mesh must be strictly increasing");

  const auto grid = toric::interior_grid(data.polytope.axis_range(0), moment_nodes);
  std::vector<SubgradientChord> out;
  std::vector<std::pair<Interval, std::size_t>> previous;
  std::size_t next_sheet = 0;
  for (double s : s_mesh) {
    const toric::AxisEnvelope env(data, 0, s, grid);
    const auto& fn = env.functions();
    std::vector<std::pair<Interval, std::size_t>> current;
    std::vector<bool> taken(previous.size(), false);
    for (const auto& c : env.gap().components()) {
      long best = -1;
      double best_overlap = 0.0;
      for (std::size_t p = 0; p < previous.size(); ++p) {
        const double ov = overlap(previous[p].first, c);
        if (!taken[p] && ov > best_overlap) {
          best_overlap = ov;
          best = static_cast<long>(p);
        }
      }
      std::size_t sheet;
      if (best >= 0) {
        taken[static_cast<std::size_t>(best)] = true;
        sheet = previous[static_cast<std::size_t>(best)].second;
      } else {
        sheet = next_sheet++;
      }
      current.emplace_back(c, sheet);

      std::vector<Point> graph;
      constexpr int kHullSamples = 64;
      for (int i = 0; i <= kHullSamples; ++i) {
        const double v = c.lo + (c.hi - c.lo) * i / kHullSamples;
        graph.push_back({-fn.udot(v), v});
      }
      out.push_back({s, c.lo, c.hi, {-fn.udot(c.lo), c.lo}, {-fn.udot(c.hi), c.hi}, sheet,
                     hull_area(std::move(graph))});
    }
    previous = std::move(current);
  }
  return out;
}

SweptRegion swept_area(std::span<const SubgradientChord> chords, std::size_t raster_cells) {
  if (raster_cells < 64) throw std::invalid_argument("swept_area: need at least 64 cells per axis");
  for (const auto& c : chords)
    if (!std::isfinite(c.p0.t) || !std::isfinite(c.p0.y) || !std::isfinite(c.p1.t) ||
        !std::isfinite(c.p1.y))
      throw std::invalid_argument("swept_area: non-finite chord endpoint");

  SweptRegion out;
  if (chords.empty()) {
    out.converged = true;
    return out;
  }

  Box box{chords[0].p0.t, chords[0].p0.t, chords[0].p0.y, chords[0].p0.y};
  for (const auto& c : chords)
    for (const auto& p : {c.p0, c.p1}) {
      box.t_lo = std::min(box.t_lo, p.t);
      box.t_hi = std::max(box.t_hi, p.t);
      box.y_lo = std::min(box.y_lo, p.y);
      box.y_hi = std::max(box.y_hi, p.y);
    }
  const double scale = std::max({box.t_hi - box.t_lo, box.y_hi - box.y_lo, 1e-12});
  const double pad_t = 0.01 * std::max(box.t_hi - box.t_lo, 1e-6 * scale);
  const double pad_y = 0.01 * std::max(box.y_hi - box.y_lo, 1e-6 * scale);
  box = {box.t_lo - pad_t, box.t_hi + pad_t, box.y_lo - pad_y, box.y_hi + pad_y};

  const std::size_t cap = 4 * raster_cells;
  std::size_t n = std::max<std::size_t>(64, raster_cells / 4);
  for (;;) {
    OccupancyRaster raster(box, n, n);
    rasterize(raster, chords);
    out.levels.push_back(n);
    out.level_areas.push_back(raster.area());
    out.raster = std::move(raster);

    const auto m = out.level_areas.size();
    auto rel = [&](std::size_t i) {
      const double a = out.level_areas[i];
      const double b = out.level_areas[i - 1];
      return a > 0.0 ? std::abs(a - b) / a : (b == 0.0 ? 0.0 : 1.0);
    };
    out.converged = m >= 3 && rel(m - 1) < kRasterSlack && rel(m - 2) < kRasterSlack;
    if (n >= cap || (n >= raster_cells && out.converged)) break;
    n *= 2;
  }
  out.area = out.level_areas.back();
  return out;
}

double prop3_bound(const toric::ToricCauchyData& data, std::size_t nodes) {
  if (nodes < 2) throw std::invalid_argument("prop3_bound: need at least 2 nodes");
  double total = 0.0;
  for (std::size_t axis = 0; axis < data.dimension(); ++axis) {
    const toric::AxisFunctions fn(data, axis);
    const auto r = fn.range();
    std::vector<double> y(nodes), v(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
      y[i] = i + 1 == nodes ? r.hi : r.lo + r.length() * static_cast<double>(i) / static_cast<double>(nodes - 1);
      v[i] = fn.udot(y[i]);
    }
    const convex::SampledFunction f(y, v);
    const auto env = convex::lower_convex_envelope(f);
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < nodes; ++i) {
      const double g0 = v[i] - env(y[i]);
      const double g1 = v[i + 1] - env(y[i + 1]);
      integral += 0.5 * (g0 + g1) * (y[i + 1] - y[i]);
    }
    double others = 1.0;
    for (std::size_t j = 0; j < data.dimension(); ++j)
      if (j != axis) others *= data.polytope.axis_range(j).length();
    total += integral * others;
  }
  return total;
}

std::vector<double> lifespan_mesh(double t_cvx, double T, std::size_t size) {
  std::vector<double> mesh;
  if (!(T > t_cvx) || size == 0) return mesh;
  mesh.reserve(size);
  for (std::size_t k = 1; k <= size; ++k) {
    const double w = static_cast<double>(k) / static_cast<double>(size);
    mesh.push_back(k == size ? T : t_cvx + (T - t_cvx) * w * w);
  }
  return mesh;
}

// ---------------------------------------------------------------------------
// Mass report

std::string MassReport::to_key_value() const {
  std::ostringstream os;
  os << "T=" << format_real(T) << '\n'
     << "t_cvx=" << format_real(t_cvx) << '\n'
     << "mass_regular=" << format_real(mass_regular) << '\n'
     << "mass_singular_lower=" << format_real(mass_singular_lower) << '\n'
     << "prop3_bound=" << format_real(prop3_bound) << '\n'
     << "chords=" << chord_count << '\n'
     << "raster=" << raster_cells << '\n'
     << "raster_converged=" << (raster_converged ? "true" : "false") << '\n'
     << "regular_samples=" << regular_samples << '\n'
     << "regular_image_deviation=" << format_real(regular_image_deviation) << '\n'
     << "invariants_ok=" << (invariants_ok ? "true" : "false") << '\n';
  return os.str();
}

std::string MassReport::csv_header() { return "T,t_cvx,mass_lower,prop3_bound,chords,raster"; }

std::string MassReport::to_csv_row() const {
  return format_real(T) + ',' + format_real(t_cvx) + ',' + format_real(mass_singular_lower) + ',' +
         format_real(prop3_bound) + ',' + std::to_string(chord_count) + ',' +
         std::to_string(raster_cells);
}

MassReport mass_report(const toric::ToricCauchyData& data, double T, const MassOptions& options) {
  if (!(T > 0.0)) throw std::invalid_argument("mass_report: T must be positive");
  if (data.dimension() != 1)
    throw std::invalid_argument("mass_report: implemented for one space dimension");

  MassReport rep;
  rep.T = T;
  rep.t_cvx = toric::convex_lifespan(data, options.moment_nodes).t_cvx;
  rep.prop3_bound = prop3_bound(data, options.prop3_nodes);

  const auto mesh = lifespan_mesh(rep.t_cvx, T, options.s_mesh);
  rep.chord_list = chords(data, mesh, options.moment_nodes);
  rep.chord_count = rep.chord_list.size();
  rep.region = swept_area(rep.chord_list, options.raster_cells);
  rep.mass_singular_lower = rep.region.area;
  rep.raster_cells = rep.region.levels.empty() ? options.raster_cells : rep.region.levels.back();
  rep.raster_converged = rep.region.converged;

  // Regular subgradients (d_s psi, d_x psi) must lie on the graph of -udot0.
  // Points are drawn in groups of ten x values per sampled s.
  std::mt19937_64 rng(options.seed);
  const double h = options.fd_step;
  std::uniform_real_distribution<double> s_dist(2.0 * h, T);
  std::uniform_real_distribution<double> x_dist(-options.x_extent, options.x_extent);
  constexpr std::size_t kPerSlice = 10;
  constexpr double kKinkMargin = 1e-3;
  while (rep.regular_samples < options.regular_samples) {
    const double s = s_dist(rng);
    const ray::PotentialSlice lo(data, s - h, options.moment_nodes);
    const ray::PotentialSlice mid(data, s, options.moment_nodes);
    const ray::PotentialSlice hi(data, s + h, options.moment_nodes);
    const auto& fn = mid.envelope().functions();
    std::size_t taken = 0;
    for (int attempt = 0; attempt < 100 && taken < kPerSlice &&
                          rep.regular_samples < options.regular_samples;
         ++attempt) {
      const double x = x_dist(rng);
      if (lo.distance_to_kink(x) <= kKinkMargin || mid.distance_to_kink(x) <= kKinkMargin ||
          hi.distance_to_kink(x) <= kKinkMargin)
        continue;
      const double ds = (hi.value(x) - lo.value(x)) / (2.0 * h);
      const double dx = mid.subdifferential(x).lo;
      rep.regular_image_deviation =
          std::max(rep.regular_image_deviation, std::abs(ds + fn.udot(dx)));
      ++taken;
      ++rep.regular_samples;
    }
  }

  const double slack = kRasterSlack * rep.prop3_bound;
  const bool zero_before = T > rep.t_cvx || rep.mass_singular_lower == 0.0;
  rep.invariants_ok = rep.mass_singular_lower >= 0.0 &&
                      rep.mass_singular_lower <= rep.prop3_bound + slack && zero_before &&
                      rep.regular_image_deviation <= kRegularImageTol;
  return rep;
}

double alexandrov_image_area(const std::function<double(double, double)>& g,
                             std::span<const double> s_grid, std::span<const double> x_grid,
                             std::size_t i0, std::size_t j0, Box slope_box, std::size_t cells) {
  if (i0 >= s_grid.size() || j0 >= x_grid.size())
    throw std::out_of_range("alexandrov_image_area: lattice point out of range");
  std::vector<double> vals(s_grid.size() * x_grid.size());
  for (std::size_t i = 0; i < s_grid.size(); ++i)
    for (std::size_t j = 0; j < x_grid.size(); ++j) vals[i * x_grid.size() + j] = g(s_grid[i], x_grid[j]);

  OccupancyRaster raster(slope_box, cells, cells);
  const double base = vals[i0 * x_grid.size() + j0];
  for (std::size_t ci = 0; ci < cells; ++ci)
    for (std::size_t cj = 0; cj < cells; ++cj) {
      const auto c = raster.center(ci, cj);
      const double at = c.t * s_grid[i0] + c.y * x_grid[j0] - base;
      bool supporting = true;
      for (std::size_t i = 0; i < s_grid.size() && supporting; ++i)
        for (std::size_t j = 0; j < x_grid.size(); ++j)
          if (c.t * s_grid[i] + c.y * x_grid[j] - vals[i * x_grid.size() + j] > at + 1e-12) {
            supporting = false;
            break;
          }
      if (supporting) raster.mark(ci, cj);
    }
  return raster.area();
}

}  // namespace hrma::mass
