#pragma once

// Alexandrov Monge-Ampere mass of psi on [0, T] x R, measured as the area of
// the subdifferential image swept by the kink chords.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hrma/toric_geometry.hpp"

namespace hrma::mass {

/// A point of the (d_s psi, d_x psi) plane.
struct Point {
  double t;
  double y;
};

/// co{(-udot0(a), a), (-udot0(b), b)} for an A_s component (a, b).
struct SubgradientChord {
  double s;
  double a;
  double b;
  Point p0;
  Point p1;
  std::size_t sheet;  ///< components matched across s by overlap share a sheet
  /// Area of co{(-udot0(v), v) : v in [a, b]}, the upper bound on d psi at the kink.
  double upper_hull_area;
};

struct Box {
  double t_lo, t_hi, y_lo, y_hi;
};

/// Uniform boolean occupancy grid over a box. Marking is idempotent.
class OccupancyRaster {
 public:
  OccupancyRaster() = default;
  OccupancyRaster(Box box, std::size_t cells_t, std::size_t cells_y);

  const Box& box() const { return box_; }
  std::size_t cells_t() const { return nt_; }
  std::size_t cells_y() const { return ny_; }
  double cell_area() const { return dt_ * dy_; }
  Point center(std::size_t i, std::size_t j) const;
  bool occupied(std::size_t i, std::size_t j) const { return cells_[j * nt_ + i] != 0; }

  void mark(std::size_t i, std::size_t j) { cells_[j * nt_ + i] = 1; }
  /// Every cell the segment passes through.
  void mark_segment(Point p, Point q);
  /// Cells whose centers lie inside the polygon (even-odd rule).
  void fill_polygon(std::span<const Point> polygon);

  std::size_t occupied_count() const;
  double area() const { return static_cast<double>(occupied_count()) * cell_area(); }

 private:
  Box box_{0, 0, 0, 0};
  std::size_t nt_ = 0, ny_ = 0;
  double dt_ = 0.0, dy_ = 0.0;
  std::vector<std::uint8_t> cells_;
};

struct SweptRegion {
  OccupancyRaster raster;                ///< finest level
  double area = 0.0;
  std::vector<std::size_t> levels;       ///< cells per axis, coarse to fine
  std::vector<double> level_areas;
  bool converged = false;                ///< last two doublings changed the area < 0.5%
};

/// Kink chords for every s in the mesh (strictly increasing).
std::vector<SubgradientChord> chords(const toric::ToricCauchyData& data,
                                     std::span<const double> s_mesh,
                                     std::size_t moment_nodes = 4097);

/// Rasterized area of the chords and the ruled quads between consecutive
/// chords of a sheet. Starts at max(64, raster_cells/4) cells per axis and
/// doubles up to raster_cells, then keeps doubling (at most to 4x) until the
/// last two doublings agree to 0.5%.
SweptRegion swept_area(std::span<const SubgradientChord> chords, std::size_t raster_cells);

/// Vol(epi(-udot0) \ epi(-udot0**)) = integral over P of udot0 - udot0**,
/// trapezoid rule on `nodes` points per axis including the facets.
double prop3_bound(const toric::ToricCauchyData& data, std::size_t nodes = 4097);

/// M points in (t_cvx, T], quadratically clustered toward t_cvx.
std::vector<double> lifespan_mesh(double t_cvx, double T, std::size_t size);

struct MassOptions {
  std::size_t moment_nodes = 4097;
  std::size_t s_mesh = 400;
  std::size_t raster_cells = 1024;
  std::size_t regular_samples = 1000;
  std::size_t prop3_nodes = 4097;
  double x_extent = 3.0;
  double fd_step = 1e-4;
  std::uint64_t seed = 0x5eed;
};

inline constexpr double kRegularImageTol = 1e-6;
inline constexpr double kRasterSlack = 0.005;

struct MassReport {
  double T = 0.0;
  double t_cvx = 0.0;
  double mass_regular = 0.0;
  double mass_singular_lower = 0.0;
  double prop3_bound = 0.0;
  std::size_t chord_count = 0;
  std::size_t raster_cells = 0;
  bool raster_converged = true;
  std::size_t regular_samples = 0;
  double regular_image_deviation = 0.0;  ///< max |d_s psi + udot0(d_x psi)| over samples
  bool invariants_ok = false;
  std::vector<SubgradientChord> chord_list;
  SweptRegion region;

  std::string to_key_value() const;
  static std::string csv_header();
  std::string to_csv_row() const;
};

MassReport mass_report(const toric::ToricCauchyData& data, double T,
                       const MassOptions& options = {});

/// Area of the subdifferential image of a lattice point (i0, j0) of a convex
/// function sampled on s_grid x x_grid: slope cells of `slope_box` whose
/// centers define a supporting plane at that point.
double alexandrov_image_area(const std::function<double(double, double)>& g,
                             std::span<const double> s_grid, std::span<const double> x_grid,
                             std::size_t i0, std::size_t j0, Box slope_box, std::size_t cells);

}  // namespace hrma::mass
