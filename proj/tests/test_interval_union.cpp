#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "hrma/interval_union.hpp"

using hrma::Interval;
using hrma::IntervalUnion;

namespace {

// Hausdorff distance by dense sampling of both closures.
double sampled_hausdorff(const IntervalUnion& a, const IntervalUnion& b, int per_component) {
  auto directed = [per_component](const IntervalUnion& from, const IntervalUnion& to) {
    double worst = 0.0;
    for (const auto& c : from.components())
      for (int k = 0; k <= per_component; ++k)
        worst = std::max(worst, to.distance_to(c.lo + c.length() * k / per_component));
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

IntervalUnion random_union(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(1, 4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> pts;
  const int n = count(rng);
  for (int i = 0; i < 2 * n; ++i) pts.push_back(u(rng));
  std::sort(pts.begin(), pts.end());
  std::vector<Interval> comps;
  for (int i = 0; i < n; ++i)
    if (pts[2 * i + 1] > pts[2 * i] && (comps.empty() || comps.back().hi < pts[2 * i]))
      comps.push_back({pts[2 * i], pts[2 * i + 1]});
  return IntervalUnion(comps);
}

}  // namespace

TEST_CASE("construction validates ordering and lengths") {
  CHECK_NOTHROW(IntervalUnion({{-1, 0}, {0.5, 1}}));
  CHECK_THROWS_AS(IntervalUnion({{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalUnion({{0.5, 1}, {-1, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalUnion({{-1, 0}, {0, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(IntervalUnion({{0, INFINITY}}), std::invalid_argument);
}

TEST_CASE("membership, measure and distance") {
  const IntervalUnion u({{-1, -0.5}, {0.25, 0.75}});
  CHECK(u.size() == 2);
  CHECK(u.measure() == doctest::Approx(1.0));
  CHECK(u.contains(-0.75));
  CHECK_FALSE(u.contains(-0.5));  // open components
  CHECK_FALSE(u.contains(0.0));
  CHECK(u.distance_to(0.0) == doctest::Approx(0.25));
  CHECK(u.distance_to(2.0) == doctest::Approx(1.25));
  CHECK(u.distance_to(-0.5) == 0.0);
  CHECK(std::isinf(IntervalUnion{}.distance_to(0.0)));
}

TEST_CASE("hausdorff distance edge cases") {
  const IntervalUnion e;
  const IntervalUnion a({{0, 1}});
  CHECK(hausdorff_distance(e, e) == 0.0);
  CHECK(std::isinf(hausdorff_distance(a, e)));
  CHECK(hausdorff_distance(a, a) == 0.0);
  // The midpoint of the gap in b is the farthest point of a from b.
  const IntervalUnion b({{0, 0.2}, {0.8, 1}});
  CHECK(hausdorff_distance(a, b) == doctest::Approx(0.3));
  CHECK(hausdorff_distance(b, a) == doctest::Approx(0.3));
}

TEST_CASE("hausdorff distance agrees with dense sampling on random unions") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto a = random_union(rng);
    const auto b = random_union(rng);
    const double exact = hausdorff_distance(a, b);
    const double sampled = sampled_hausdorff(a, b, 4000);
    CHECK(exact >= sampled - 1e-12);
    CHECK(exact <= sampled + 2.0 / 4000);
    CHECK(exact == doctest::Approx(hausdorff_distance(b, a)));
  }
}
