#pragma once

// Discrete Legendre-Fenchel conjugation, lower convex envelopes and
// subdifferentials of piecewise-linear functions of one variable.

#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "hrma/interval_union.hpp"

namespace hrma::convex {

/// How a function behaves off its sampled domain.
///  - finite: extended affinely by the end slopes.
///  - plus_infinity_outside: +inf outside [domain_lo, domain_hi].
enum class BoundaryMode { finite, plus_infinity_outside };

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Values of a function on a strictly increasing set of nodes.
class SampledFunction {
 public:
  SampledFunction(std::vector<double> nodes, std::vector<double> values,
                  BoundaryMode mode = BoundaryMode::finite);

  double domain_lo() const { return nodes_.front(); }
  double domain_hi() const { return nodes_.back(); }
  std::size_t size() const { return nodes_.size(); }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }
  BoundaryMode boundary_mode() const { return mode_; }

  double max_spacing() const;
  double value_range() const;

 private:
  std::vector<double> nodes_;
  std::vector<double> values_;
  BoundaryMode mode_;
};

class PLConvexFunction;

PLConvexFunction lower_convex_envelope(const SampledFunction& f);
PLConvexFunction conjugate(const PLConvexFunction& f, std::span<const double> query_grid);

/// Convex, piecewise-linear interpolant of its breakpoints.
///
/// Instances come out of lower_convex_envelope (slopes non-decreasing by
/// construction, tolerance 0) or conjugate (pointwise maxima of affine
/// functions). `from_samples` admits external data after a convexity check.
class PLConvexFunction {
 public:
  static PLConvexFunction from_samples(std::vector<double> breakpoints,
                                       std::vector<double> values,
                                       BoundaryMode mode = BoundaryMode::finite,
                                       double slope_tol = 0.0);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  /// slopes()[i] is the secant slope on [breakpoints[i], breakpoints[i+1]].
  const std::vector<double>& slopes() const { return slopes_; }
  BoundaryMode boundary_mode() const { return mode_; }
  double domain_lo() const { return breakpoints_.front(); }
  double domain_hi() const { return breakpoints_.back(); }
  std::size_t size() const { return breakpoints_.size(); }

  double operator()(double x) const;
  SampledFunction as_sampled() const;

 private:
  PLConvexFunction(std::vector<double> breakpoints, std::vector<double> values,
                   BoundaryMode mode);

  std::vector<double> breakpoints_;
  std::vector<double> values_;
  std::vector<double> slopes_;
  BoundaryMode mode_;

  friend PLConvexFunction lower_convex_envelope(const SampledFunction& f);
  friend PLConvexFunction conjugate(const PLConvexFunction& f,
                                    std::span<const double> query_grid);
};

/// [left derivative, right derivative]; infinite ends are explicit sentinels.
struct SubdifferentialInterval {
  double lo;
  double hi;

  double width() const { return hi - lo; }
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
  bool is_point() const { return lo == hi; }
  bool unbounded_below() const { return lo == -kInf; }
  bool unbounded_above() const { return hi == kInf; }
};

/// Subdifferential of f at x. Throws std::out_of_range outside the domain;
/// at an end of a plus_infinity_outside function the open side is +-inf.
SubdifferentialInterval subdifferential(const PLConvexFunction& f, double x);

/// A smooth closure of a sampled function on a closed interval [lo, hi]
/// (which may extend past the sample nodes). Values may be +-inf only for
/// `derivative` at lo/hi.
struct SmoothFunction {
  double lo;
  double hi;
  std::function<double(double)> value;
  std::function<double(double)> derivative;
};

/// Closure built from centered differences on the nodes, linearly
/// interpolated; its domain is the node range.
SmoothFunction finite_difference_closure(const SampledFunction& f);

/// Tangency points (a, b) of the common tangent of `fn` bracketing a
/// non-convex stretch whose outer nodes are a0 < b0 (node spacing h);
/// nullopt when the bisection does not settle inside the search brackets.
std::optional<Interval> common_tangent(const SmoothFunction& fn, double a0, double b0, double h);

/// 1e-9 * (max f - min f), floored at the smallest positive normal double.
double default_gap_tol(const SampledFunction& f);

/// Maximal open intervals where f exceeds its envelope by more than gap_tol.
///
/// Endpoints are refined by bisection on the common tangent slope of the two
/// tangency points (the double-tangency system). `analytic` supplies exact
/// values/derivatives; without it centered differences on the nodes are
/// used. Components closer than one node spacing are merged.
IntervalUnion gap_set(const SampledFunction& f, const PLConvexFunction& env,
                      double gap_tol,
                      const std::optional<SmoothFunction>& analytic = std::nullopt);

}  // namespace hrma::convex
