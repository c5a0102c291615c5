#include "hrma/ray_evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hrma::ray {
namespace {

toric::AxisEnvelope make_envelope(const toric::ToricCauchyData& data, double s,
                                  std::size_t moment_nodes) {
  if (data.dimension() != 1)
    throw std::invalid_argument("ray evolution is implemented for one space dimension");
  if (!(s >= 0.0)) throw std::invalid_argument("ray slice: s must be non-negative");
  const auto grid = toric::interior_grid(data.polytope.axis_range(0), moment_nodes);
  return toric::AxisEnvelope(data, 0, s, grid);
}

}  // namespace

PotentialSlice::PotentialSlice(const toric::ToricCauchyData& data, double s,
                               std::size_t moment_nodes)
    : envelope_(make_envelope(data, s, moment_nodes)) {
  const auto& gap = envelope_.gap();
  for (std::size_t k = 0; k < gap.size(); ++k)
    singular_.push_back({envelope_.flat_slope(k), gap[k].lo, gap[k].hi});
}

double PotentialSlice::value(double x) const {
  const double y = envelope_.dual_points(x).lo;
  return x * y - envelope_.value(y);
}

convex::SubdifferentialInterval PotentialSlice::subdifferential(double x) const {
  const auto pts = envelope_.dual_points(x);
  return {pts.lo, pts.hi};
}

double PotentialSlice::distance_to_kink(double x) const {
  double d = convex::kInf;
  for (const auto& p : singular_) d = std::min(d, std::abs(x - p.x));
  return d;
}

RaySlice ray_slice(const toric::ToricCauchyData& data, double s, std::span<const double> x_grid,
                   std::size_t moment_nodes, double width_factor) {
  const PotentialSlice slice(data, s, moment_nodes);
  auto psi = convex::conjugate(slice.envelope().hull(), x_grid);

  RaySlice out{s, {x_grid.begin(), x_grid.end()}, std::move(psi), {}, {}, {}, {}, 0.0};
  out.singular_points = slice.singular_points();
  out.width_tol = width_factor * data.polytope.axis_range(0).length();
  const auto n = x_grid.size();
  out.psi_values.resize(n);
  out.dpsi_dx.resize(n);
  out.regular.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sub = slice.subdifferential(x_grid[i]);
    out.psi_values[i] = slice.value(x_grid[i]);
    out.regular[i] = sub.width() <= out.width_tol;
    out.dpsi_dx[i] = out.regular[i] ? sub.lo : std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

double hrma_residual(const std::function<double(double, double)>& psi, double s, double x,
                     double h, double hx) {
  const double c = psi(s, x);
  const double pss = (psi(s + h, x) - 2.0 * c + psi(s - h, x)) / (h * h);
  const double pxx = (psi(s, x + hx) - 2.0 * c + psi(s, x - hx)) / (hx * hx);
  const double psx = (psi(s + h, x + hx) - psi(s + h, x - hx) - psi(s - h, x + hx) +
                      psi(s - h, x - hx)) /
                     (4.0 * h * hx);
  return std::abs(pss - psx * psx / pxx);
}

double regular_residual(const toric::ToricCauchyData& data, double s, double x, double h,
                        double hx, std::size_t moment_nodes) {
  if (!(h > 0.0) || !(hx > 0.0)) throw std::invalid_argument("regular_residual: steps must be positive");
  if (s - h < 0.0) throw std::invalid_argument("regular_residual: s - h must be non-negative");
  const PotentialSlice lo(data, s - h, moment_nodes);
  const PotentialSlice mid(data, s, moment_nodes);
  const PotentialSlice hi(data, s + h, moment_nodes);
  for (const auto* sl : {&lo, &mid, &hi})
    if (!(sl->distance_to_kink(x) > hx))
      throw std::domain_error("regular_residual: stencil crosses a kink of psi");

  auto psi = [&](double ss, double xx) {
    const auto& sl = ss < s ? lo : (ss > s ? hi : mid);
    return sl.value(xx);
  };
  return hrma_residual(psi, s, x, h, hx);
}

double regular_residual(const toric::ToricCauchyData& data, double s, double x, double h) {
  return regular_residual(data, s, x, h, h);
}

double time_derivative(const PotentialSlice& slice, double x) {
  const auto sub = slice.subdifferential(x);
  if (sub.width() > 0.0) throw std::domain_error("time_derivative: (s, x) is a kink of psi");
  return -slice.envelope().functions().udot(sub.lo);
}

double time_derivative(const toric::ToricCauchyData& data, double s, double x,
                       std::size_t moment_nodes) {
  return time_derivative(PotentialSlice(data, s, moment_nodes), x);
}

convex::SubdifferentialInterval time_derivative_bounds(const PotentialSlice& slice, double x) {
  const auto sub = slice.subdifferential(x);
  const auto& fn = slice.envelope().functions();
  const double ta = -fn.udot(sub.lo);
  const double tb = -fn.udot(sub.hi);
  return {std::min(ta, tb), std::max(ta, tb)};
}

MetricProfile metric_profile(const toric::ToricCauchyData& data, double s,
                             std::span<const double> y_grid, std::size_t moment_nodes) {
  const PotentialSlice slice(data, s, moment_nodes);
  const auto& env = slice.envelope();
  MetricProfile out{s, {y_grid.begin(), y_grid.end()}, {}, {}};
  out.u_yy.reserve(y_grid.size());
  out.zero_set.reserve(y_grid.size());
  for (double y : y_grid) {
    out.u_yy.push_back(env.curvature(y));
    out.zero_set.push_back(env.gap().contains(y));
  }
  return out;
}

SmoothnessProbe essential_smoothness_probe(const toric::ToricCauchyData& data, double s,
                                           double delta0, int levels, std::size_t moment_nodes) {
  const PotentialSlice slice(data, s, moment_nodes);
  const auto& env = slice.envelope();
  SmoothnessProbe out;
  out.monotone = true;
  for (auto side : {toric::Side::lower, toric::Side::upper}) {
    double prev = side == toric::Side::lower ? convex::kInf : -convex::kInf;
    for (int k = 1; k <= levels; ++k) {
      const double delta = std::ldexp(delta0, -k);
      const double slope = env.slope_at_standoff(side, delta);
      out.rows.push_back({side, k, delta, slope});
      if (side == toric::Side::lower ? slope > prev : slope < prev) out.monotone = false;
      prev = slope;
    }
    (side == toric::Side::lower ? out.reached_lo : out.reached_hi) = prev;
  }
  return out;
}

}  // namespace hrma::ray
