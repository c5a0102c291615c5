#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "hrma/ma_measure.hpp"
#include "oracles.hpp"

using namespace hrma;
using namespace hrma::mass;

namespace {

toric::ToricCauchyData fs_with_velocity(std::vector<double> coeffs) {
  auto d = toric::fubini_study();
  d.axes[0].velocity_kind = toric::VelocityKind::polynomial;
  d.axes[0].velocity = toric::Polynomial(std::move(coeffs));
  return d;
}

}  // namespace

TEST_CASE("occupancy raster primitives") {
  CHECK_THROWS_AS(OccupancyRaster({0, 0, 0, 1}, 8, 8), std::invalid_argument);
  CHECK_THROWS_AS(OccupancyRaster({0, 1, 0, 1}, 0, 8), std::invalid_argument);

  OccupancyRaster r({0, 1, 0, 1}, 100, 100);
  CHECK(r.cell_area() == doctest::Approx(1e-4));
  const Point square[] = {{0.2, 0.2}, {0.6, 0.2}, {0.6, 0.6}, {0.2, 0.6}};
  r.fill_polygon(square);
  CHECK(r.area() == doctest::Approx(0.16).epsilon(1e-9));
  r.fill_polygon(square);  // idempotent
  CHECK(r.area() == doctest::Approx(0.16).epsilon(1e-9));

  OccupancyRaster tri({0, 1, 0, 1}, 1000, 1000);
  const Point t[] = {{0.1, 0.1}, {0.9, 0.1}, {0.1, 0.9}};
  tri.fill_polygon(t);
  CHECK(tri.area() == doctest::Approx(0.32).epsilon(5e-3));

  OccupancyRaster seg({0, 1, 0, 1}, 10, 10);
  seg.mark_segment({0.05, 0.05}, {0.95, 0.95});
  for (std::size_t i = 0; i < 10; ++i) CHECK(seg.occupied(i, i));
  seg.mark_segment({0.05, 0.55}, {0.95, 0.55});
  CHECK(seg.occupied_count() == 19);
}

TEST_CASE("prop3 bound") {
  CHECK(prop3_bound(toric::fubini_study()) == doctest::Approx(4.0 / 3.0).epsilon(1e-6));
  CHECK(prop3_bound(toric::p1xp1()) == doctest::Approx(8.0 / 3.0).epsilon(1e-6));
  CHECK(prop3_bound(fs_with_velocity({0, 0, 1})) == doctest::Approx(0.0));
  // -y^4 has hull -1 on [-1, 1], so the bound is 2 - 2/5.
  CHECK(prop3_bound(fs_with_velocity({0, 0, 0, 0, -1})) == doctest::Approx(1.6).epsilon(1e-6));
  CHECK_THROWS_AS(prop3_bound(toric::fubini_study(), 1), std::invalid_argument);
}

TEST_CASE("lifespan mesh") {
  const auto m = lifespan_mesh(1.0, 3.0, 100);
  REQUIRE(m.size() == 100);
  CHECK(m.front() > 1.0);
  CHECK(m.back() == 3.0);
  for (std::size_t k = 1; k < m.size(); ++k) CHECK(m[k] > m[k - 1]);
  CHECK(lifespan_mesh(1.0, 1.0, 100).empty());
  CHECK(lifespan_mesh(convex::kInf, 3.0, 100).empty());
}

TEST_CASE("chords of the Fubini-Study data") {
  const auto d = toric::fubini_study();
  const double mesh[] = {1.2, 1.5, 2.0};
  const auto cs = chords(d, mesh);
  REQUIRE(cs.size() == 3);
  for (std::size_t k = 0; k < 3; ++k) {
    const double a = oracle::tangency_root(mesh[k]);
    CHECK(cs[k].s == mesh[k]);
    CHECK(cs[k].sheet == 0);
    CHECK(std::abs(cs[k].b - a) < 1e-10);
    CHECK(std::abs(cs[k].a + a) < 1e-10);
    CHECK(cs[k].p0.t == doctest::Approx(a * a));
    CHECK(cs[k].p0.y == cs[k].a);
    CHECK(cs[k].p1.t == doctest::Approx(a * a));
    // Region between the chord and the parabola t = v^2.
    CHECK(cs[k].upper_hull_area == doctest::Approx(4.0 / 3.0 * a * a * a).epsilon(1e-3));
  }
  const double bad[] = {2.0, 1.5};
  CHECK_THROWS_AS(chords(d, bad), std::invalid_argument);
  CHECK_THROWS_AS(chords(toric::p1xp1(), mesh), std::invalid_argument);
}

TEST_CASE("swept area edge cases") {
  std::vector<SubgradientChord> none;
  const auto empty = swept_area(none, 256);
  CHECK(empty.area == 0.0);
  CHECK(empty.converged);
  std::vector<SubgradientChord> one{{1.0, -0.5, 0.5, {0.25, -0.5}, {0.25, 0.5}, 0, 0.0}};
  CHECK_THROWS_AS(swept_area(one, 32), std::invalid_argument);
  one[0].p1.t = NAN;
  CHECK_THROWS_AS(swept_area(one, 256), std::invalid_argument);
}

TEST_CASE("mass report against the swept-area oracle") {
  const auto d = toric::fubini_study();
  MassOptions o;
  o.raster_cells = 512;
  o.regular_samples = 200;

  const auto before = mass_report(d, 1.0, o);
  CHECK(before.mass_singular_lower == 0.0);
  CHECK(before.chord_count == 0);
  CHECK(before.invariants_ok);

  const auto r = mass_report(d, 1.5, o);
  CHECK(r.t_cvx == doctest::Approx(1.0));
  CHECK(r.chord_count == o.s_mesh);
  CHECK(r.mass_singular_lower == doctest::Approx(oracle::fs_mass(1.5)).epsilon(0.05));
  CHECK(r.mass_singular_lower > 0.0);
  CHECK(r.mass_singular_lower < r.prop3_bound);
  CHECK(r.regular_samples == 200);
  CHECK(r.regular_image_deviation < kRegularImageTol);
  CHECK(r.invariants_ok);

  CHECK_THROWS_AS(mass_report(d, 0.0, o), std::invalid_argument);
  CHECK_THROWS_AS(mass_report(toric::p1xp1(), 1.0, o), std::invalid_argument);
}

TEST_CASE("serialization") {
  MassReport r;
  r.T = 1.5;
  r.t_cvx = 1.0;
  r.mass_singular_lower = 0.1;
  r.prop3_bound = 4.0 / 3.0;
  r.chord_count = 3;
  r.raster_cells = 1024;
  CHECK(MassReport::csv_header() == "T,t_cvx,mass_lower,prop3_bound,chords,raster");
  CHECK(r.to_csv_row() == "1.5,1,0.10000000000000001,1.3333333333333333,3,1024");
  CHECK(r.to_key_value().find("mass_singular_lower=0.10000000000000001\n") != std::string::npos);
}

TEST_CASE("sandwich on random velocities") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  MassOptions o;
  o.raster_cells = 256;
  o.s_mesh = 100;
  o.regular_samples = 50;
  for (int trial = 0; trial < 3; ++trial) {
    const auto d = fs_with_velocity({u(rng), u(rng), -1.0 - std::abs(u(rng)), 0.5 * u(rng)});
    const double t = toric::convex_lifespan(d).t_cvx;
    REQUIRE(std::isfinite(t));
    const auto r = mass_report(d, 2.0 * t, o);
    CHECK(r.mass_singular_lower > 0.0);
    CHECK(r.mass_singular_lower <= r.prop3_bound * (1 + kRasterSlack));
  }
}

TEST_CASE("Alexandrov image of |s| + |x|") {
  std::vector<double> grid;
  for (int i = -5; i <= 5; ++i) grid.push_back(0.2 * i);
  auto g = [](double s, double x) { return std::abs(s) + std::abs(x); };
  CHECK(alexandrov_image_area(g, grid, grid, 5, 5, {-2, 2, -2, 2}, 256) == doctest::Approx(4.0).epsilon(0.01));
  // Away from both kink lines the image is a single point.
  CHECK(alexandrov_image_area(g, grid, grid, 7, 8, {-2, 2, -2, 2}, 256) < 1e-3);
  CHECK_THROWS_AS(alexandrov_image_area(g, grid, grid, 11, 0, {-2, 2, -2, 2}, 64), std::out_of_range);
}
