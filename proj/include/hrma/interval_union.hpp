#pragma once

#include <cstddef>
#include <vector>

namespace hrma {

struct Interval {
  double lo;
  double hi;

  double length() const { return hi - lo; }
  bool contains(double y) const { return y > lo && y < hi; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// Finite union of disjoint open intervals, sorted left to right.
class IntervalUnion {
 public:
  IntervalUnion() = default;
  /// Throws std::invalid_argument unless components are sorted, disjoint
  /// (b_i < a_{i+1}) and of positive length.
  explicit IntervalUnion(std::vector<Interval> components);

  const std::vector<Interval>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  bool empty() const { return components_.empty(); }
  const Interval& operator[](std::size_t i) const { return components_[i]; }

  bool contains(double y) const;
  double measure() const;
  /// Distance from y to the closure of the union; +inf when empty.
  double distance_to(double y) const;

  friend bool operator==(const IntervalUnion&, const IntervalUnion&) = default;

 private:
  std::vector<Interval> components_;
};

/// Hausdorff distance between the closures. 0 for two empty sets, +inf if
/// exactly one is empty.
double hausdorff_distance(const IntervalUnion& a, const IntervalUnion& b);

}  // namespace hrma
