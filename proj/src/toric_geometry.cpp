#include "hrma/toric_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hrma::toric {
namespace {

double xlogx(double l) { return l > 0.0 ? l * std::log(l) : 0.0; }

// Golden-section minimization of a unimodal function on [a, b].
template <class F>
double golden_section_min(F&& f, double a, double b, double tol) {
  const double inv_phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < 300 && (b - a) > tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc <= fd ? c : d;
}

convex::SampledFunction envelope_samples(const ToricCauchyData& data, std::size_t axis,
                                         double s, std::span<const double> grid) {
  return u_s(data, s, grid, axis);
}

}  // namespace

// ---------------------------------------------------------------------------
// Polynomial

Polynomial::Polynomial(std::vector<double> coefficients) : c_(std::move(coefficients)) {
  for (std::size_t i = 0; i < c_.size(); ++i)
    if (!std::isfinite(c_[i]))
      throw std::invalid_argument("Polynomial: non-finite coefficient " + std::to_string(i));
}

bool Polynomial::is_zero() const {
  return std::all_of(c_.begin(), c_.end(), [](double c) { return c == 0.0; });
}

double Polynomial::value(double y) const {
  double acc = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * y + *it;
  return acc;
}

double Polynomial::derivative(double y) const {
  double acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 1;) acc = acc * y + static_cast<double>(k) * c_[k];
  return acc;
}

double Polynomial::second_derivative(double y) const {
  double acc = 0.0;
  for (std::size_t k = c_.size(); k-- > 2;)
    acc = acc * y + static_cast<double>(k * (k - 1)) * c_[k];
  return acc;
}

// ---------------------------------------------------------------------------
// Polytope

double Facet::operator()(std::span<const double> y) const {
  if (y.size() != normal.size()) throw std::invalid_argument("Facet: dimension mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) acc += normal[i] * y[i];
  return acc - offset;
}

Polytope Polytope::interval(double lo, double hi) {
  return from_facets({Facet{{1.0}, lo}, Facet{{-1.0}, -hi}});
}

Polytope Polytope::rectangle(Interval y1, Interval y2) {
  return from_facets({Facet{{1.0, 0.0}, y1.lo}, Facet{{-1.0, 0.0}, -y1.hi},
                      Facet{{0.0, 1.0}, y2.lo}, Facet{{0.0, -1.0}, -y2.hi}});
}

Polytope Polytope::from_facets(std::vector<Facet> facets) {
  if (facets.empty()) throw std::invalid_argument("Polytope: no facets");
  const std::size_t n = facets.front().normal.size();
  if (n != 1 && n != 2) throw std::invalid_argument("Polytope: dimension must be 1 or 2");
  if (facets.size() != 2 * n)
    throw std::invalid_argument("Polytope: expected " + std::to_string(2 * n) + " facets, got " +
                                std::to_string(facets.size()));

  Polytope p;
  p.lower_facet_.assign(n, facets.size());
  p.upper_facet_.assign(n, facets.size());
  for (std::size_t k = 0; k < facets.size(); ++k) {
    const auto& f = facets[k];
    if (f.normal.size() != n) throw std::invalid_argument("Polytope: facet dimension mismatch");
    if (!std::isfinite(f.offset)) throw std::invalid_argument("Polytope: non-finite offset");
    std::size_t axis = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (f.normal[i] == 0.0) continue;
      if (axis != n || !std::isfinite(f.normal[i]))
        throw std::invalid_argument("Polytope: only axis-aligned facets are supported");
      axis = i;
    }
    if (axis == n) throw std::invalid_argument("Polytope: zero facet normal");
    auto& slot = f.normal[axis] > 0.0 ? p.lower_facet_[axis] : p.upper_facet_[axis];
    if (slot != facets.size())
      throw std::invalid_argument("Polytope: duplicate facet along axis " + std::to_string(axis));
    slot = k;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& lo = facets[p.lower_facet_[i]];
    const auto& hi = facets[p.upper_facet_[i]];
    const Interval r{lo.offset / lo.normal[i], hi.offset / hi.normal[i]};
    if (!(r.hi > r.lo))
      throw std::invalid_argument("Polytope: empty interior along axis " + std::to_string(i));
    p.ranges_.push_back(r);
  }
  p.facets_ = std::move(facets);
  return p;
}

std::size_t Polytope::axis_facet(std::size_t axis, bool lower) const {
  return lower ? lower_facet_.at(axis) : upper_facet_.at(axis);
}

std::vector<std::vector<double>> Polytope::vertices() const {
  if (dimension() == 1) return {{ranges_[0].lo}, {ranges_[0].hi}};
  std::vector<std::vector<double>> out;
  for (double a : {ranges_[0].lo, ranges_[0].hi})
    for (double b : {ranges_[1].lo, ranges_[1].hi}) out.push_back({a, b});
  return out;
}

bool Polytope::contains(std::span<const double> y) const {
  if (y.size() != dimension()) return false;
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < ranges_[i].lo || y[i] > ranges_[i].hi) return false;
  return true;
}

double guillemin_potential(const Polytope& p, std::span<const double> y) {
  if (y.size() != p.dimension())
    throw std::invalid_argument("guillemin_potential: dimension mismatch");
  double acc = 0.0;
  for (const auto& f : p.facets()) {
    const double l = f(y);
    if (l < 0.0) throw std::domain_error("guillemin_potential: point outside the polytope");
    acc += xlogx(l);
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Cauchy data

void ToricCauchyData::validate() const {
  if (axes.size() != polytope.dimension())
    throw std::invalid_argument("ToricCauchyData: need one axis spec per dimension");
  if (!(guillemin_scale > 0.0) || !std::isfinite(guillemin_scale))
    throw std::invalid_argument("ToricCauchyData: guillemin_scale must be positive");
  if (potential == PotentialKind::guillemin)
    for (const auto& a : axes)
      if (!a.smooth_part.is_zero())
        throw std::invalid_argument(
            "ToricCauchyData: u0 = guillemin takes no smooth part; use guillemin_plus_smooth");
}

ToricCauchyData fubini_study() {
  ToricCauchyData d;
  d.polytope = Polytope::interval(-1.0, 1.0);
  d.axes = {AxisSpec{{}, VelocityKind::fubini_study_quadratic, {}}};
  return d;
}

ToricCauchyData p1xp1() {
  ToricCauchyData d;
  d.polytope = Polytope::rectangle({-1.0, 1.0}, {-1.0, 1.0});
  d.guillemin_scale = 0.5;
  d.axes = {AxisSpec{{}, VelocityKind::fubini_study_quadratic, {}},
            AxisSpec{{}, VelocityKind::polynomial, Polynomial{}}};
  return d;
}

AxisFunctions::AxisFunctions(const ToricCauchyData& data, std::size_t axis)
    : range_(data.polytope.axis_range(axis)), scale_(data.guillemin_scale) {
  data.validate();
  const auto& lo = data.polytope.facets()[data.polytope.axis_facet(axis, true)];
  const auto& hi = data.polytope.facets()[data.polytope.axis_facet(axis, false)];
  v_lo_ = lo.normal[axis];
  lam_lo_ = lo.offset;
  v_hi_ = hi.normal[axis];
  lam_hi_ = hi.offset;
  const auto& spec = data.axes[axis];
  smooth_ = spec.smooth_part;
  velocity_ = spec.velocity_kind == VelocityKind::fubini_study_quadratic
                  ? Polynomial({0.0, 0.0, -1.0})
                  : spec.velocity;
}

double AxisFunctions::u0(double y) const {
  return scale_ * (xlogx(std::max(l_lo(y), 0.0)) + xlogx(std::max(l_hi(y), 0.0))) +
         smooth_.value(y);
}

double AxisFunctions::du0(double y) const {
  const double a = std::max(l_lo(y), 0.0);
  const double b = std::max(l_hi(y), 0.0);
  return scale_ * (v_lo_ * (std::log(a) + 1.0) + v_hi_ * (std::log(b) + 1.0)) +
         smooth_.derivative(y);
}

double AxisFunctions::d2u0(double y) const {
  const double a = std::max(l_lo(y), 0.0);
  const double b = std::max(l_hi(y), 0.0);
  return scale_ * (v_lo_ * v_lo_ / a + v_hi_ * v_hi_ / b) + smooth_.second_derivative(y);
}

double AxisFunctions::udot(double y) const { return velocity_.value(y); }
double AxisFunctions::dudot(double y) const { return velocity_.derivative(y); }
double AxisFunctions::d2udot(double y) const { return velocity_.second_derivative(y); }

double AxisFunctions::dus_at_standoff(double s, Side side, double delta) const {
  const double w = range_.length();
  const bool upper = side == Side::upper;
  const double y = upper ? range_.hi - delta : range_.lo + delta;
  const double a = upper ? v_lo_ * (w - delta) : v_lo_ * delta;
  const double b = upper ? -v_hi_ * delta : -v_hi_ * (w - delta);
  return scale_ * (v_lo_ * (std::log(a) + 1.0) + v_hi_ * (std::log(b) + 1.0)) +
         smooth_.derivative(y) + s * velocity_.derivative(y);
}

convex::SmoothFunction AxisFunctions::us_closure(double s) const {
  return {range_.lo, range_.hi, [*this, s](double y) { return us(s, y); },
          [*this, s](double y) { return dus(s, y); }};
}

convex::SmoothFunction AxisFunctions::udot_closure() const {
  return {range_.lo, range_.hi, [*this](double y) { return udot(y); },
          [*this](double y) { return dudot(y); }};
}

std::vector<double> interior_grid(Interval range, std::size_t nodes) {
  if (nodes < 2) throw std::invalid_argument("interior_grid: need at least 2 nodes");
  std::vector<double> g(nodes);
  const double w = range.length();
  for (std::size_t i = 0; i < nodes; ++i)
    g[i] = range.lo + w * static_cast<double>(i + 1) / static_cast<double>(nodes + 1);
  return g;
}

convex::SampledFunction u_s(const ToricCauchyData& data, double s, std::span<const double> grid,
                            std::size_t axis) {
  if (!(s >= 0.0)) throw std::invalid_argument("u_s: s must be non-negative");
  const AxisFunctions fn(data, axis);
  const auto r = fn.range();
  std::vector<double> values(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!(grid[i] > r.lo && grid[i] < r.hi))
      throw std::invalid_argument("u_s: grid node " + std::to_string(i) +
                                  " is not strictly inside the polytope");
    values[i] = fn.us(s, grid[i]);
  }
  return convex::SampledFunction(std::vector<double>(grid.begin(), grid.end()),
                                 std::move(values), convex::BoundaryMode::plus_infinity_outside);
}

SymplecticPair cauchy_from_kahler(const convex::SampledFunction& psi0,
                                  const convex::SampledFunction& psidot0,
                                  std::size_t moment_nodes) {
  const auto& x = psi0.nodes();
  const auto& v = psi0.values();
  const auto n = x.size();
  if (n < 3) throw std::invalid_argument("cauchy_from_kahler: psi0 needs at least 3 nodes");

  std::vector<double> slopes(n - 1), mids(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    slopes[i] = (v[i + 1] - v[i]) / (x[i + 1] - x[i]);
    mids[i] = 0.5 * (x[i] + x[i + 1]);
    if (i > 0 && !(slopes[i] > slopes[i - 1]))
      throw std::invalid_argument("cauchy_from_kahler: psi0 is not strictly convex near x = " +
                                  std::to_string(x[i]));
  }
  const Interval polytope{slopes.front(), slopes.back()};
  if (!(polytope.hi > polytope.lo))
    throw std::invalid_argument("cauchy_from_kahler: degenerate slope range");
  if (psidot0.domain_lo() > x.front() || psidot0.domain_hi() < x.back())
    throw std::invalid_argument("cauchy_from_kahler: psidot0 does not cover the psi0 grid");

  const auto grid = interior_grid(polytope, moment_nodes);
  const auto psi = convex::PLConvexFunction::from_samples(
      x, v, convex::BoundaryMode::plus_infinity_outside);
  const auto u0 = convex::conjugate(psi, grid);

  // (psi0')^{-1} by linear interpolation through (secant slope, midpoint).
  const auto psidot = convex::finite_difference_closure(psidot0).value;
  std::vector<double> udot(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double y = grid[j];
    auto it = std::upper_bound(slopes.begin(), slopes.end(), y);
    std::size_t k = it == slopes.begin() ? 0 : static_cast<std::size_t>(it - slopes.begin()) - 1;
    k = std::min(k, slopes.size() - 2);
    const double lam = (y - slopes[k]) / (slopes[k + 1] - slopes[k]);
    const double xy = (1.0 - lam) * mids[k] + lam * mids[k + 1];
    udot[j] = -psidot(xy);
  }

  return SymplecticPair{
      polytope,
      convex::SampledFunction(u0.breakpoints(), u0.values(),
                              convex::BoundaryMode::plus_infinity_outside),
      convex::SampledFunction(grid, std::move(udot), convex::BoundaryMode::finite)};
}

LifespanResult convex_lifespan(const ToricCauchyData& data, std::size_t grid_nodes) {
  data.validate();
  LifespanResult best;
  for (std::size_t axis = 0; axis < data.dimension(); ++axis) {
    const AxisFunctions fn(data, axis);
    auto ratio = [&fn](double y) {
      const double c = fn.d2udot(y);
      return c < 0.0 ? fn.d2u0(y) / -c : convex::kInf;
    };
    const auto grid = interior_grid(fn.range(), grid_nodes);
    std::size_t arg = 0;
    double r_min = convex::kInf;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double r = ratio(grid[i]);
      if (r < r_min) {
        r_min = r;
        arg = i;
      }
    }
    if (r_min == convex::kInf) continue;

    const double a = arg == 0 ? 0.5 * (fn.range().lo + grid[0]) : grid[arg - 1];
    const double b = arg + 1 == grid.size() ? 0.5 * (grid[arg] + fn.range().hi) : grid[arg + 1];
    const double y_star = golden_section_min(ratio, a, b, 1e-12);
    const double t = std::min(ratio(y_star), r_min);
    if (t < best.t_cvx) {
      best.t_cvx = t;
      best.argmin.assign(data.dimension(), 0.0);
      for (std::size_t i = 0; i < data.dimension(); ++i) {
        const auto r = data.polytope.axis_range(i);
        best.argmin[i] = 0.5 * (r.lo + r.hi);
      }
      best.argmin[axis] = ratio(y_star) <= r_min ? y_star : grid[arg];
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// AxisEnvelope

AxisEnvelope::AxisEnvelope(const ToricCauchyData& data, std::size_t axis, double s,
                           std::span<const double> grid)
    : s_(s),
      fn_(data, axis),
      samples_(envelope_samples(data, axis, s, grid)),
      hull_(convex::lower_convex_envelope(samples_)),
      gap_(convex::gap_set(samples_, hull_, convex::default_gap_tol(samples_),
                           fn_.us_closure(s))) {
  add_shallow_wells(grid);
  for (const auto& c : gap_.components())
    flat_slopes_.push_back((fn_.us(s_, c.hi) - fn_.us(s_, c.lo)) / (c.hi - c.lo));
}

// Wells shallower than the gap tolerance escape the hull test, but any node
// with u_s'' < 0 lies in A_s. Such runs get their own common tangent.
void AxisEnvelope::add_shallow_wells(std::span<const double> grid) {
  const auto n = grid.size();
  if (n < 3) return;
  const double h = samples_.max_spacing();
  const auto closure = fn_.us_closure(s_);
  std::vector<Interval> extra;
  std::size_t i = 0;
  while (i < n) {
    if (!(fn_.d2us(s_, grid[i]) < 0.0) || gap_.contains(grid[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && fn_.d2us(s_, grid[j + 1]) < 0.0 && !gap_.contains(grid[j + 1])) ++j;
    const double a0 = i == 0 ? fn_.range().lo : grid[i - 1];
    const double b0 = j + 1 == n ? fn_.range().hi : grid[j + 1];
    if (const auto t = convex::common_tangent(closure, a0, b0, h);
        t && t->lo < grid[i] && t->hi > grid[j])
      extra.push_back(*t);
    i = j + 1;
  }
  if (extra.empty()) return;
  auto all = gap_.components();
  all.insert(all.end(), extra.begin(), extra.end());
  std::sort(all.begin(), all.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& c : all) {
    if (!merged.empty() && c.lo - merged.back().hi < h)
      merged.back().hi = std::max(merged.back().hi, c.hi);
    else
      merged.push_back(c);
  }
  gap_ = IntervalUnion(std::move(merged));
}

long AxisEnvelope::component_containing(double y) const {
  const auto& cs = gap_.components();
  for (std::size_t k = 0; k < cs.size(); ++k)
    if (cs[k].contains(y)) return static_cast<long>(k);
  return -1;
}

double AxisEnvelope::value(double y) const {
  const long k = component_containing(y);
  if (k < 0) return fn_.us(s_, y);
  const auto& c = gap_[static_cast<std::size_t>(k)];
  return fn_.us(s_, c.lo) + flat_slopes_[static_cast<std::size_t>(k)] * (y - c.lo);
}

double AxisEnvelope::slope(double y) const {
  const long k = component_containing(y);
  return k < 0 ? fn_.dus(s_, y) : flat_slopes_[static_cast<std::size_t>(k)];
}

double AxisEnvelope::curvature(double y) const {
  return component_containing(y) < 0 ? fn_.d2us(s_, y) : 0.0;
}

double AxisEnvelope::slope_at_standoff(Side side, double delta) const {
  const auto r = fn_.range();
  const double y = side == Side::upper ? r.hi - delta : r.lo + delta;
  const long k = component_containing(y);
  return k < 0 ? fn_.dus_at_standoff(s_, side, delta) : flat_slopes_[static_cast<std::size_t>(k)];
}

long AxisEnvelope::flat_component(double x) const {
  for (std::size_t k = 0; k < flat_slopes_.size(); ++k)
    if (std::abs(x - flat_slopes_[k]) <= 1e-12 * (1.0 + std::abs(flat_slopes_[k])))
      return static_cast<long>(k);
  return -1;
}

Interval AxisEnvelope::dual_points(double x) const {
  if (const long k = flat_component(x); k >= 0) return gap_[static_cast<std::size_t>(k)];
  double lo = fn_.range().lo;
  double hi = fn_.range().hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (slope(mid) < x)
      lo = mid;
    else
      hi = mid;
  }
  const double y = 0.5 * (lo + hi);
  return {y, y};
}

// ---------------------------------------------------------------------------
// A_s

bool GapRegion::empty() const {
  return std::all_of(slabs.begin(), slabs.end(), [](const auto& s) { return s.empty(); });
}

bool GapRegion::contains(std::span<const double> y) const {
  for (std::size_t j = 0; j < slabs.size(); ++j)
    if (slabs[j].contains(y[j])) return true;
  return false;
}

double GapRegion::distance_to(std::span<const double> y) const {
  double best = convex::kInf;
  for (std::size_t j = 0; j < slabs.size(); ++j) best = std::min(best, slabs[j].distance_to(y[j]));
  return best;
}

bool GapRegion::touches_face(std::size_t axis, double value) const {
  for (std::size_t j = 0; j < slabs.size(); ++j) {
    if (slabs[j].empty()) continue;
    if (j != axis) return true;
    if (slabs[j].distance_to(value) == 0.0) return true;
  }
  return false;
}

GapRegion a_set(const ToricCauchyData& data, double s, std::size_t nodes_per_axis) {
  if (!(s >= 0.0)) throw std::invalid_argument("a_set: s must be non-negative");
  GapRegion region;
  for (std::size_t axis = 0; axis < data.dimension(); ++axis) {
    const auto range = data.polytope.axis_range(axis);
    const auto grid = interior_grid(range, nodes_per_axis);
    region.slabs.push_back(AxisEnvelope(data, axis, s, grid).gap());
    region.ranges.push_back(range);
  }
  return region;
}

bool nested_with_margin(const IntervalUnion& inner, const IntervalUnion& outer, Interval range,
                        double margin, double boundary_tol) {
  for (const auto& c : inner.components()) {
    bool found = false;
    for (const auto& o : outer.components()) {
      if (!(o.lo < c.hi && c.lo < o.hi)) continue;
      const bool left_ok =
          (c.lo - range.lo <= boundary_tol) ? o.lo <= c.lo : o.lo + margin <= c.lo;
      const bool right_ok =
          (range.hi - c.hi <= boundary_tol) ? c.hi <= o.hi : c.hi + margin <= o.hi;
      if (left_ok && right_ok) {
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

ASetDiagnostics a_set_diagnostics(const ToricCauchyData& data, double s1, double s2,
                                  std::size_t nodes_per_axis) {
  if (!(s1 > 0.0) || !(s1 < s2))
    throw std::invalid_argument("a_set_diagnostics: need 0 < s1 < s2");
  ASetDiagnostics out;
  out.nested = true;
  for (std::size_t axis = 0; axis < data.dimension(); ++axis) {
    const auto range = data.polytope.axis_range(axis);
    const auto grid = interior_grid(range, nodes_per_axis);
    const double h = grid[1] - grid[0];
    const AxisEnvelope e1(data, axis, s1, grid);
    const AxisEnvelope e2(data, axis, s2, grid);
    out.nested = out.nested &&
                 nested_with_margin(e1.gap(), e2.gap(), range, kEndpointTol, 1.5 * h);
    out.hausdorff = std::max(out.hausdorff, hausdorff_distance(e1.gap(), e2.gap()));

    std::vector<double> vals(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) vals[i] = e1.functions().udot(grid[i]);
    const convex::SampledFunction udot(grid, std::move(vals));
    const auto env = convex::lower_convex_envelope(udot);
    auto a_inf = convex::gap_set(udot, env, convex::default_gap_tol(udot),
                                 e1.functions().udot_closure());
    out.hausdorff_to_infinity =
        std::max(out.hausdorff_to_infinity, hausdorff_distance(e2.gap(), a_inf));
    out.a_infinity.push_back(std::move(a_inf));
  }
  return out;
}

}  // namespace hrma::toric
