#include "hrma/interval_union.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace hrma {
namespace {

// sup over the closure of `from` of the distance to the closure of `to`.
// d(., to) is piecewise linear, so the sup over a component is attained at
// its endpoints or at the midpoint of a gap of `to` lying inside it.
double directed_distance(const IntervalUnion& from, const IntervalUnion& to) {
  double worst = 0.0;
  const auto& tc = to.components();
  for (const auto& c : from.components()) {
    worst = std::max({worst, to.distance_to(c.lo), to.distance_to(c.hi)});
    for (std::size_t j = 0; j + 1 < tc.size(); ++j) {
      const double mid = 0.5 * (tc[j].hi + tc[j + 1].lo);
      if (mid > c.lo && mid < c.hi) worst = std::max(worst, to.distance_to(mid));
    }
  }
  return worst;
}

}  // namespace

IntervalUnion::IntervalUnion(std::vector<Interval> components)
    : components_(std::move(components)) {
  for (std::size_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (!(c.hi > c.lo) || !std::isfinite(c.lo) || !std::isfinite(c.hi))
      throw std::invalid_argument("IntervalUnion: component " + std::to_string(i) +
                                  " has non-positive length");
    if (i > 0 && !(components_[i - 1].hi < c.lo))
      throw std::invalid_argument("IntervalUnion: components " + std::to_string(i - 1) +
                                  " and " + std::to_string(i) + " overlap or are unsorted");
  }
}

bool IntervalUnion::contains(double y) const {
  auto it = std::upper_bound(components_.begin(), components_.end(), y,
                             [](double v, const Interval& c) { return v < c.hi; });
  return it != components_.end() && it->contains(y);
}

double IntervalUnion::measure() const {
  double total = 0.0;
  for (const auto& c : components_) total += c.length();
  return total;
}

double IntervalUnion::distance_to(double y) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : components_) {
    if (y >= c.lo && y <= c.hi) return 0.0;
    best = std::min(best, y < c.lo ? c.lo - y : y - c.hi);
  }
  return best;
}

double hausdorff_distance(const IntervalUnion& a, const IntervalUnion& b) {
  if (a.empty() && b.empty()) return 0.0;
  if (a.empty() || b.empty()) return std::numeric_limits<double>::infinity();
  return std::max(directed_distance(a, b), directed_distance(b, a));
}

}  // namespace hrma
