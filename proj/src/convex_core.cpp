#include "hrma/convex_core.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hrma::convex {
namespace {

void require_strictly_increasing(std::span<const double> xs, const char* what) {
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]))
      throw std::invalid_argument(std::string(what) + ": non-finite entry at index " +
                                  std::to_string(i));
    if (i > 0 && !(xs[i] > xs[i - 1]))
      throw std::invalid_argument(std::string(what) + ": not strictly increasing at index " +
                                  std::to_string(i));
  }
}

double secant(const std::vector<double>& x, const std::vector<double>& v, std::size_t i,
              std::size_t j) {
  return (v[j] - v[i]) / (x[j] - x[i]);
}

std::vector<double> secant_slopes(const std::vector<double>& x, const std::vector<double>& v) {
  std::vector<double> out(x.size() - 1);
  for (std::size_t i = 0; i + 1 < x.size(); ++i) out[i] = secant(x, v, i, i + 1);
  return out;
}

// Minimizer of fn(y) - m*y over [lo, hi]. Candidates are the two ends and
// the sign change of fn' - m when fn' crosses m upward inside the bracket.
struct Support {
  double y;
  double value;
};

Support local_support(const SmoothFunction& fn, double m, double lo, double hi) {
  auto objective = [&](double y) { return fn.value(y) - m * y; };
  Support best{lo, objective(lo)};
  const Support right{hi, objective(hi)};
  if (right.value < best.value) best = right;

  if (fn.derivative(lo) - m < 0.0 && fn.derivative(hi) - m > 0.0) {
    double a = lo;
    double b = hi;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid <= a || mid >= b) break;
      if (fn.derivative(mid) - m < 0.0)
        a = mid;
      else
        b = mid;
    }
    for (double y : {a, b}) {
      const double val = objective(y);
      if (val < best.value) best = {y, val};
    }
  }
  return best;
}

struct Tangency {
  double a;
  double b;
};

// Common tangent of the two ends of a gap run whose bracketing hull nodes are
// a0 < b0. phi(m) = min_R(f - m y) - min_L(f - m y) is strictly decreasing in
// m (its derivative is y_L - y_R < 0), so its root is found by bisection.
std::optional<Tangency> refine_component(const SmoothFunction& fn, double a0, double b0, double h) {
  const double mid = 0.5 * (a0 + b0);
  double widen = 1.0;
  for (int attempt = 0; attempt < 8; ++attempt, widen *= 2.0) {
    const double l_lo = std::max(fn.lo, a0 - 2.0 * h * widen);
    const double l_hi = std::min(mid, a0 + h * widen);
    const double r_lo = std::max(mid, b0 - h * widen);
    const double r_hi = std::min(fn.hi, b0 + 2.0 * h * widen);
    if (!(l_lo < l_hi) || !(r_lo < r_hi)) break;

    auto phi = [&](double m) {
      return local_support(fn, m, r_lo, r_hi).value - local_support(fn, m, l_lo, l_hi).value;
    };

    const double m0 = (fn.value(b0) - fn.value(a0)) / (b0 - a0);
    const double step0 = 1e-8 * (1.0 + std::abs(m0));
    double m_lo = m0;
    double m_hi = m0;
    double step = step0;
    for (int it = 0; it < 2000 && phi(m_lo) < 0.0; ++it, step *= 2.0) m_lo -= step;
    step = step0;
    for (int it = 0; it < 2000 && phi(m_hi) > 0.0; ++it, step *= 2.0) m_hi += step;
    if (!(phi(m_lo) >= 0.0) || !(phi(m_hi) <= 0.0)) continue;

    for (int it = 0; it < 400; ++it) {
      const double m = 0.5 * (m_lo + m_hi);
      if (m <= m_lo || m >= m_hi) break;
      if (phi(m) > 0.0)
        m_lo = m;
      else
        m_hi = m;
    }
    const double m = 0.5 * (m_lo + m_hi);
    const double a = local_support(fn, m, l_lo, l_hi).y;
    const double b = local_support(fn, m, r_lo, r_hi).y;

    const bool a_clamped = (a == l_lo && l_lo > fn.lo) || (a == l_hi && l_hi < mid);
    const bool b_clamped = (b == r_hi && r_hi < fn.hi) || (b == r_lo && r_lo > mid);
    if (!a_clamped && !b_clamped && a < b) return Tangency{a, b};
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------------------
// SampledFunction

SampledFunction::SampledFunction(std::vector<double> nodes, std::vector<double> values,
                                 BoundaryMode mode)
    : nodes_(std::move(nodes)), values_(std::move(values)), mode_(mode) {
  if (nodes_.size() < 2) throw std::invalid_argument("SampledFunction: fewer than 2 nodes");
  if (nodes_.size() != values_.size())
    throw std::invalid_argument("SampledFunction: nodes and values differ in length");
  require_strictly_increasing(nodes_, "SampledFunction nodes");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i]))
      throw std::invalid_argument("SampledFunction: non-finite value at index " +
                                  std::to_string(i));
}

double SampledFunction::max_spacing() const {
  double h = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) h = std::max(h, nodes_[i + 1] - nodes_[i]);
  return h;
}

double SampledFunction::value_range() const {
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  return *hi - *lo;
}

// ---------------------------------------------------------------------------
// PLConvexFunction

PLConvexFunction::PLConvexFunction(std::vector<double> breakpoints, std::vector<double> values,
                                   BoundaryMode mode)
    : breakpoints_(std::move(breakpoints)), values_(std::move(values)), mode_(mode) {
  slopes_ = secant_slopes(breakpoints_, values_);
}

PLConvexFunction PLConvexFunction::from_samples(std::vector<double> breakpoints,
                                                std::vector<double> values, BoundaryMode mode,
                                                double slope_tol) {
  // SampledFunction validates shape and finiteness.
  SampledFunction checked(std::move(breakpoints), std::move(values), mode);
  PLConvexFunction f(checked.nodes(), checked.values(), mode);
  for (std::size_t i = 0; i + 1 < f.slopes_.size(); ++i)
    if (f.slopes_[i + 1] < f.slopes_[i] - slope_tol)
      throw std::invalid_argument("PLConvexFunction: slopes decrease at breakpoint " +
                                  std::to_string(i + 1));
  return f;
}

double PLConvexFunction::operator()(double x) const {
  const auto n = breakpoints_.size();
  if (x < breakpoints_.front()) {
    if (mode_ == BoundaryMode::plus_infinity_outside) return kInf;
    return values_.front() + slopes_.front() * (x - breakpoints_.front());
  }
  if (x > breakpoints_.back()) {
    if (mode_ == BoundaryMode::plus_infinity_outside) return kInf;
    return values_.back() + slopes_.back() * (x - breakpoints_.back());
  }
  auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x);
  std::size_t k = (it == breakpoints_.begin()) ? 0 : static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  if (k >= n - 1) return values_.back();
  if (x == breakpoints_[k]) return values_[k];
  return values_[k] + slopes_[k] * (x - breakpoints_[k]);
}

SampledFunction PLConvexFunction::as_sampled() const {
  return SampledFunction(breakpoints_, values_, mode_);
}

// ---------------------------------------------------------------------------
// Operations

PLConvexFunction conjugate(const PLConvexFunction& f, std::span<const double> query_grid) {
  if (query_grid.empty()) throw std::invalid_argument("conjugate: empty query grid");
  require_strictly_increasing(query_grid, "conjugate query grid");

  const auto& x = f.breakpoints();
  const auto& v = f.values();
  const auto n = x.size();

  // A finite-mode function continues affinely, so its conjugate is +inf
  // outside the closed slope range.
  std::vector<double> ys;
  BoundaryMode out_mode = BoundaryMode::finite;
  if (f.boundary_mode() == BoundaryMode::finite) {
    const double s_lo = f.slopes().front();
    const double s_hi = f.slopes().back();
    const double tol = 1e-12 * (1.0 + std::max(std::abs(s_lo), std::abs(s_hi)));
    for (double y : query_grid)
      if (y >= s_lo - tol && y <= s_hi + tol) ys.push_back(y);
    if (ys.size() < 2)
      throw std::domain_error("conjugate: fewer than 2 query points inside the slope range");
    out_mode = BoundaryMode::plus_infinity_outside;
  } else {
    ys.assign(query_grid.begin(), query_grid.end());
    if (ys.size() < 2) throw std::invalid_argument("conjugate: query grid needs 2 points");
  }

  // The maximizing breakpoint index is non-decreasing in y; ties keep the
  // smallest index.
  std::vector<double> g(ys.size());
  std::size_t i = 0;
  for (std::size_t j = 0; j < ys.size(); ++j) {
    const double y = ys[j];
    while (i + 1 < n && x[i + 1] * y - v[i + 1] > x[i] * y - v[i]) ++i;
    g[j] = x[i] * y - v[i];
  }
  return PLConvexFunction(std::move(ys), std::move(g), out_mode);
}

PLConvexFunction lower_convex_envelope(const SampledFunction& f) {
  const auto& x = f.nodes();
  const auto& v = f.values();

  // Monotone chain over points already sorted by abscissa. Popping on a
  // strict slope decrease keeps collinear nodes and leaves the stored
  // secant slopes non-decreasing exactly.
  std::vector<std::size_t> hull;
  hull.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    while (hull.size() >= 2) {
      const auto p = hull[hull.size() - 2];
      const auto q = hull.back();
      if (secant(x, v, p, q) > secant(x, v, q, i))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }

  std::vector<double> bx, bv;
  bx.reserve(hull.size());
  bv.reserve(hull.size());
  for (auto k : hull) {
    bx.push_back(x[k]);
    bv.push_back(v[k]);
  }
  return PLConvexFunction(std::move(bx), std::move(bv), f.boundary_mode());
}

SubdifferentialInterval subdifferential(const PLConvexFunction& f, double x) {
  if (!(x >= f.domain_lo() && x <= f.domain_hi()))
    throw std::out_of_range("subdifferential: point outside the domain");

  const auto& b = f.breakpoints();
  const auto& sl = f.slopes();
  const bool open_ends = f.boundary_mode() == BoundaryMode::plus_infinity_outside;

  auto it = std::lower_bound(b.begin(), b.end(), x);
  const auto i = static_cast<std::size_t>(it - b.begin());
  if (it != b.end() && *it == x) {
    const double lo = (i == 0) ? (open_ends ? -kInf : sl.front()) : sl[i - 1];
    const double hi = (i + 1 == b.size()) ? (open_ends ? kInf : sl.back()) : sl[i];
    return {lo, hi};
  }
  return {sl[i - 1], sl[i - 1]};
}

SmoothFunction finite_difference_closure(const SampledFunction& f) {
  const auto& x = f.nodes();
  const auto& v = f.values();
  const auto n = x.size();
  std::vector<double> d(n);
  d[0] = secant(x, v, 0, 1);
  d[n - 1] = secant(x, v, n - 2, n - 1);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = secant(x, v, i - 1, i + 1);

  auto interp = [x](const std::vector<double>& w) {
    return [x, w](double t) {
      auto it = std::upper_bound(x.begin(), x.end(), t);
      std::size_t k = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
      k = std::min(k, x.size() - 2);
      const double lam = (t - x[k]) / (x[k + 1] - x[k]);
      return (1.0 - lam) * w[k] + lam * w[k + 1];
    };
  };
  return SmoothFunction{x.front(), x.back(), interp(v), interp(d)};
}

std::optional<Interval> common_tangent(const SmoothFunction& fn, double a0, double b0, double h) {
  if (!(a0 < b0) || !(h > 0.0)) throw std::invalid_argument("common_tangent: need a0 < b0 and h > 0");
  const auto t = refine_component(fn, a0, b0, h);
  if (!t) return std::nullopt;
  return Interval{t->a, t->b};
}

double default_gap_tol(const SampledFunction& f) {
  return std::max(1e-9 * f.value_range(), std::numeric_limits<double>::min());
}

IntervalUnion gap_set(const SampledFunction& f, const PLConvexFunction& env, double gap_tol,
                      const std::optional<SmoothFunction>& analytic) {
  if (!(gap_tol > 0.0)) throw std::invalid_argument("gap_set: gap_tol must be positive");

  const auto& x = f.nodes();
  const auto& v = f.values();
  const auto n = x.size();
  const double h = f.max_spacing();
  const SmoothFunction fn = analytic ? *analytic : finite_difference_closure(f);

  std::vector<Tangency> raw;
  std::size_t i = 0;
  while (i < n) {
    if (v[i] - env(x[i]) > gap_tol) {
      std::size_t j = i;
      while (j + 1 < n && v[j + 1] - env(x[j + 1]) > gap_tol) ++j;
      const double a0 = x[i == 0 ? 0 : i - 1];
      const double b0 = x[j + 1 < n ? j + 1 : n - 1];
      auto t = refine_component(fn, a0, b0, h).value_or(Tangency{a0, b0});
      // The refined component must still cover every node of the run.
      if (!((t.a < x[i] || i == 0) && (t.b > x[j] || j + 1 == n))) t = {a0, b0};
      raw.push_back(t);
      i = j + 1;
    } else {
      ++i;
    }
  }

  std::vector<Interval> merged;
  for (const auto& t : raw) {
    if (!(t.b > t.a)) continue;
    if (!merged.empty() && t.a - merged.back().hi < h)
      merged.back().hi = std::max(merged.back().hi, t.b);
    else
      merged.push_back({t.a, t.b});
  }
  return IntervalUnion(std::move(merged));
}

}  // namespace hrma::convex
