#pragma once

// The Legendre transform potential psi(s, x) = (u0 + s*udot0)^*(x) in one
// space dimension: slices, gradients, singular points, metric coefficients
// and finite-difference checks of the homogeneous Monge-Ampere equation.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "hrma/convex_core.hpp"
#include "hrma/toric_geometry.hpp"

namespace hrma::ray {

inline constexpr std::size_t kDefaultMomentNodes = 4097;

/// A kink of psi_s: x = flat slope of u_s** on the A_s component (a, b).
struct SingularPoint {
  double x;
  double a;
  double b;
};

/// psi_s for one s, backed by the refined envelope of u_s. Immutable.
class PotentialSlice {
 public:
  PotentialSlice(const toric::ToricCauchyData& data, double s,
                 std::size_t moment_nodes = kDefaultMomentNodes);

  double s() const { return envelope_.s(); }
  const toric::AxisEnvelope& envelope() const { return envelope_; }
  const std::vector<SingularPoint>& singular_points() const { return singular_; }

  /// sup_y (x*y - u_s(y)).
  double value(double x) const;
  /// {y : x in du_s**(y)}: the x-subdifferential of psi_s at x.
  convex::SubdifferentialInterval subdifferential(double x) const;
  /// Distance from x to the nearest kink (+inf when there is none).
  double distance_to_kink(double x) const;

 private:
  toric::AxisEnvelope envelope_;
  std::vector<SingularPoint> singular_;
};

struct RaySlice {
  double s = 0.0;
  std::vector<double> x;
  /// Discrete conjugate of the lower convex envelope of u_s over the x grid.
  convex::PLConvexFunction psi;
  /// psi_s(x) from the refined envelope (no moment-grid discretization).
  std::vector<double> psi_values;
  /// d psi_s / dx where regular, NaN at kinks.
  std::vector<double> dpsi_dx;
  std::vector<bool> regular;
  std::vector<SingularPoint> singular_points;
  double width_tol = 0.0;
};

/// Regular points have subdifferential width <= width_factor * slope range.
RaySlice ray_slice(const toric::ToricCauchyData& data, double s, std::span<const double> x_grid,
                   std::size_t moment_nodes = kDefaultMomentNodes, double width_factor = 1e-7);

/// |psi_ss - (psi_xx)^{-1} (psi_sx)^2| by centered differences (steps h in
/// s, hx in x) of an arbitrary function psi(s, x).
double hrma_residual(const std::function<double(double, double)>& psi, double s, double x,
                     double h, double hx);

/// hrma_residual of psi itself. Throws std::domain_error when the stencil
/// meets a kink of any of the slices s - h, s, s + h.
double regular_residual(const toric::ToricCauchyData& data, double s, double x, double h,
                        double hx, std::size_t moment_nodes = kDefaultMomentNodes);
double regular_residual(const toric::ToricCauchyData& data, double s, double x, double h);

/// -udot0(d psi_s/dx (x)); throws std::domain_error at a kink.
double time_derivative(const toric::ToricCauchyData& data, double s, double x,
                       std::size_t moment_nodes = kDefaultMomentNodes);
double time_derivative(const PotentialSlice& slice, double x);
/// Two-sided range of -udot0 over the reachable x-subgradients {a, b}; a
/// point interval away from kinks.
convex::SubdifferentialInterval time_derivative_bounds(const PotentialSlice& slice, double x);

struct MetricProfile {
  double s = 0.0;
  std::vector<double> y;
  std::vector<double> u_yy;  ///< second derivative of u_s** (0 on A_s)
  std::vector<bool> zero_set;
};

MetricProfile metric_profile(const toric::ToricCauchyData& data, double s,
                             std::span<const double> y_grid,
                             std::size_t moment_nodes = kDefaultMomentNodes);

struct StandoffRow {
  toric::Side side;
  int k;
  double delta;
  double slope;
};

struct SmoothnessProbe {
  std::vector<StandoffRow> rows;
  bool monotone = false;        ///< slope decreases toward the lower facet, increases toward the upper
  double reached_lo = 0.0;      ///< slope at the finest lower standoff
  double reached_hi = 0.0;      ///< slope at the finest upper standoff

  bool covers(double lo, double hi) const { return reached_lo <= lo && reached_hi >= hi; }
};

/// Envelope slopes at standoffs delta_k = 2^-k * delta0 from each facet.
SmoothnessProbe essential_smoothness_probe(const toric::ToricCauchyData& data, double s,
                                           double delta0 = 0.25, int levels = 64,
                                           std::size_t moment_nodes = kDefaultMomentNodes);

}  // namespace hrma::ray
