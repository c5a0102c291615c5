#pragma once

// Toric Cauchy data on an interval or an axis-aligned rectangle: the
// Guillemin potential, the symplectic-potential path u_s = u0 + s*udot0,
// its convex lifespan, and the set A_s where u_s leaves its convex envelope.

#include <cstddef>
#include <span>
#include <vector>

#include "hrma/convex_core.hpp"
#include "hrma/interval_union.hpp"

namespace hrma::toric {

/// Polynomial in one variable, coefficients lowest degree first.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coefficients);

  const std::vector<double>& coefficients() const { return c_; }
  bool is_zero() const;

  double value(double y) const;
  double derivative(double y) const;
  double second_derivative(double y) const;

 private:
  std::vector<double> c_;
};

/// l(y) = <y, normal> - offset >= 0 on the polytope.
struct Facet {
  std::vector<double> normal;
  double offset = 0.0;

  double operator()(std::span<const double> y) const;
};

/// An interval (n = 1) or an axis-aligned rectangle (n = 2).
class Polytope {
 public:
  static Polytope interval(double lo, double hi);
  static Polytope rectangle(Interval y1, Interval y2);
  /// Throws std::invalid_argument for unsupported shapes or empty interior.
  static Polytope from_facets(std::vector<Facet> facets);

  std::size_t dimension() const { return ranges_.size(); }
  const std::vector<Facet>& facets() const { return facets_; }
  Interval axis_range(std::size_t axis) const { return ranges_.at(axis); }
  /// Index of the facet bounding `axis` from below (lower == true) or above.
  std::size_t axis_facet(std::size_t axis, bool lower) const;
  std::vector<std::vector<double>> vertices() const;
  bool contains(std::span<const double> y) const;

 private:
  std::vector<Facet> facets_;
  std::vector<Interval> ranges_;
  std::vector<std::size_t> lower_facet_, upper_facet_;
};

/// sum_k l_k(y) log l_k(y), with 0 log 0 = 0 on the boundary. Throws
/// std::domain_error outside the closed polytope.
double guillemin_potential(const Polytope& p, std::span<const double> y);

enum class PotentialKind { guillemin, guillemin_plus_smooth };
enum class VelocityKind { polynomial, fubini_study_quadratic };

/// Per-axis pieces of separable data.
struct AxisSpec {
  Polynomial smooth_part;  ///< F restricted to this axis (guillemin_plus_smooth only)
  VelocityKind velocity_kind = VelocityKind::polynomial;
  Polynomial velocity;     ///< udot0 factor when velocity_kind == polynomial
};

/// u0 = guillemin_scale * u_G + sum_j F_j(y_j), udot0 = sum_j V_j(y_j).
struct ToricCauchyData {
  Polytope polytope = Polytope::interval(-1.0, 1.0);
  PotentialKind potential = PotentialKind::guillemin;
  double guillemin_scale = 1.0;
  std::vector<AxisSpec> axes;

  std::size_t dimension() const { return polytope.dimension(); }
  void validate() const;
};

/// P = [-1, 1], u0 = (1+y)log(1+y) + (1-y)log(1-y), udot0 = -y^2.
ToricCauchyData fubini_study();
/// P = [-1, 1]^2, u0 = (1/2) sum_j u_G(y_j), udot0 = -y1^2.
ToricCauchyData p1xp1();

enum class Side { lower, upper };

/// Closed forms of the data restricted to one axis.
class AxisFunctions {
 public:
  AxisFunctions(const ToricCauchyData& data, std::size_t axis);

  Interval range() const { return range_; }

  double u0(double y) const;
  double du0(double y) const;
  double d2u0(double y) const;
  double udot(double y) const;
  double dudot(double y) const;
  double d2udot(double y) const;

  double us(double s, double y) const { return u0(y) + s * udot(y); }
  double dus(double s, double y) const { return du0(y) + s * dudot(y); }
  double d2us(double s, double y) const { return d2u0(y) + s * d2udot(y); }

  /// d/dy u_s at Euclidean distance delta from the facet on `side`, with
  /// the logarithms taken of the exact facet distances.
  double dus_at_standoff(double s, Side side, double delta) const;

  convex::SmoothFunction us_closure(double s) const;
  convex::SmoothFunction udot_closure() const;

 private:
  Interval range_;
  double scale_;
  double v_lo_, v_hi_;  // facet normal components (v_lo_ > 0 > v_hi_)
  double lam_lo_, lam_hi_;
  Polynomial smooth_;
  Polynomial velocity_;

  double l_lo(double y) const { return v_lo_ * y - lam_lo_; }
  double l_hi(double y) const { return v_hi_ * y - lam_hi_; }
};

/// n nodes strictly inside `range`, spacing w/(n+1), standoff one spacing.
std::vector<double> interior_grid(Interval range, std::size_t nodes);

/// u_s restricted to `axis`, sampled on `grid` (strictly inside the range).
convex::SampledFunction u_s(const ToricCauchyData& data, double s,
                            std::span<const double> grid, std::size_t axis = 0);

/// Symplectic Cauchy pair recovered from sampled Kahler data.
struct SymplecticPair {
  Interval polytope;
  convex::SampledFunction u0;
  convex::SampledFunction udot0;
};

/// u0 = psi0^*, udot0 = -psidot0 o (psi0')^{-1} on a moment grid strictly
/// inside the closure of the slope range of psi0.
SymplecticPair cauchy_from_kahler(const convex::SampledFunction& psi0,
                                  const convex::SampledFunction& psidot0,
                                  std::size_t moment_nodes);

struct LifespanResult {
  double t_cvx = convex::kInf;
  std::vector<double> argmin;  ///< empty when t_cvx is infinite

  bool infinite() const { return t_cvx == convex::kInf; }
};

/// inf of u0'' / (-udot0'') over {udot0'' < 0}: grid scan, then golden-section
/// refinement around the grid minimizer.
LifespanResult convex_lifespan(const ToricCauchyData& data, std::size_t grid_nodes = 4097);

/// The convex envelope u_s** of one axis factor, with its gap set refined.
///
/// Outside the gap u_s** = u_s and the closed forms are used directly; on a
/// gap component it is the common tangent segment.
class AxisEnvelope {
 public:
  AxisEnvelope(const ToricCauchyData& data, std::size_t axis, double s,
               std::span<const double> grid);

  double s() const { return s_; }
  const AxisFunctions& functions() const { return fn_; }
  const convex::SampledFunction& samples() const { return samples_; }
  const convex::PLConvexFunction& hull() const { return hull_; }
  const IntervalUnion& gap() const { return gap_; }
  double flat_slope(std::size_t component) const { return flat_slopes_.at(component); }

  double value(double y) const;
  double slope(double y) const;
  double curvature(double y) const;
  double slope_at_standoff(Side side, double delta) const;

  /// {y : (u_s**)'(y) = x}; a single point unless x is a flat slope.
  Interval dual_points(double x) const;
  /// Component whose flat slope equals x (relative tolerance 1e-12), or -1.
  long flat_component(double x) const;

 private:
  double s_;
  AxisFunctions fn_;
  convex::SampledFunction samples_;
  convex::PLConvexFunction hull_;
  IntervalUnion gap_;
  std::vector<double> flat_slopes_;

  long component_containing(double y) const;
  void add_shallow_wells(std::span<const double> grid);
};

/// A_s = union over axes j of {y : y_j in slabs[j]}; for n = 1 just slabs[0].
struct GapRegion {
  std::vector<IntervalUnion> slabs;
  std::vector<Interval> ranges;

  bool empty() const;
  bool contains(std::span<const double> y) const;
  double distance_to(std::span<const double> y) const;
  /// Whether the closure of A_s meets the facet {y_axis = value}.
  bool touches_face(std::size_t axis, double value) const;
};

GapRegion a_set(const ToricCauchyData& data, double s, std::size_t nodes_per_axis);

struct ASetDiagnostics {
  bool nested = false;              ///< closure(A_s1) \ dP inside int(A_s2)
  double hausdorff = 0.0;           ///< max over axes of d_H(A_s1, A_s2)
  std::vector<IntervalUnion> a_infinity;  ///< {udot0 != udot0**} per axis
  double hausdorff_to_infinity = 0.0;     ///< d_H(A_s2, A_inf), max over axes
};

/// Refinement tolerance used as the nesting margin.
inline constexpr double kEndpointTol = 1e-10;

ASetDiagnostics a_set_diagnostics(const ToricCauchyData& data, double s1, double s2,
                                  std::size_t nodes_per_axis);

/// Componentwise nesting test with margin; endpoints within `boundary_tol`
/// of the range ends are exempt from the strict-interior requirement.
bool nested_with_margin(const IntervalUnion& inner, const IntervalUnion& outer, Interval range,
                        double margin, double boundary_tol);

}  // namespace hrma::toric
