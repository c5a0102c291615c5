#pragma once

// Independent closed forms and brute-force references used by the tests.
// Nothing here calls into the library.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

namespace oracle {

/// Root of g on [lo, hi] by bisection; g(lo) and g(hi) must differ in sign.
inline double bisect(const std::function<double(double)>& g, double lo, double hi,
                     double tol = 1e-15) {
  double glo = g(lo);
  for (int it = 0; it < 300 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double gm = g(mid);
    if ((gm < 0) == (glo < 0)) {
      lo = mid;
      glo = gm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Positive root a of log((1+a)/(1-a)) = 2*k*a, the half-width of A_s for
/// the Fubini-Study data (k = s) or for the product example (k = 2s).
/// Requires k > 1.
inline double tangency_root(double k) {
  auto g = [k](double a) { return std::log((1 + a) / (1 - a)) - 2 * k * a; };
  // g < 0 just right of 0 and g -> +inf at 1.
  double hi = 1.0 - 1e-16;
  while (g(hi) < 0) hi = 0.5 * (1.0 + hi);
  return bisect(g, 1e-9, hi);
}

/// Guillemin potential of [-1, 1].
inline double guillemin(double y) {
  auto xlogx = [](double t) { return t > 0 ? t * std::log(t) : 0.0; };
  return xlogx(1 + y) + xlogx(1 - y);
}

/// Conjugate of the Guillemin potential of [-1, 1].
inline double guillemin_conjugate(double x) { return 2.0 * std::log(std::cosh(0.5 * x)); }

/// log(1 + e^{2x}) - x, evaluated without overflow.
inline double fs_kahler(double x) { return std::abs(x) + std::log1p(std::exp(-2 * std::abs(x))); }

/// Swept-area oracle for udot0 = -y^2 on [-1, 1]: (4/3) a_T^3.
inline double fs_mass(double T) {
  if (T <= 1.0) return 0.0;
  const double a = tangency_root(T);
  return 4.0 / 3.0 * a * a * a;
}

/// max_i (x_i * y - v_i), brute force over all nodes.
inline double brute_conjugate(const std::vector<double>& x, const std::vector<double>& v, double y) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < x.size(); ++i) best = std::max(best, x[i] * y - v[i]);
  return best;
}

/// Trapezoid integral of f over [lo, hi] with n intervals.
inline double trapezoid(const std::function<double(double)>& f, double lo, double hi, int n) {
  const double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int i = 1; i < n; ++i) sum += f(lo + i * h);
  return sum * h;
}

}  // namespace oracle
