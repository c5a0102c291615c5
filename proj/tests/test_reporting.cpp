#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <string>

#include "hrma/reporting.hpp"

using namespace hrma;
using namespace hrma::report;

namespace {

// Returns the field named by the ConfigError thrown while parsing, or "" if none.
std::string failing_field(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

constexpr const char* kFs1d = R"(
# Fubini-Study line with a quadratic velocity
name = fs
dimension = 1
facet = 1 -1
facet = -1 -1
udot0 = 0, 0, -1
)";

}  // namespace

TEST_CASE("csv table") {
  CsvTable t({"a", "b"});
  t.add_row({cell(0.1), cell(true)});
  t.add_row({cell(std::size_t{7}), cell(-3)});
  CHECK(t.rows() == 2);
  CHECK(t.str() == "a,b\n0.10000000000000001,true\n7,-3\n");
  CHECK_THROWS_AS(t.add_row({"x"}), std::invalid_argument);
  CHECK_THROWS_AS(CsvTable({}), std::invalid_argument);
  CHECK(cell(INFINITY) == "inf");
  CHECK(cell(-INFINITY) == "-inf");
  CHECK(cell(NAN) == "nan");
  // Round trip through the text form is exact.
  const double v = 1.0 / 3.0;
  CHECK(std::stod(cell(v)) == v);
}

TEST_CASE("svg figure") {
  SvgFigure f(400, 300, {0, 1, -1, 1}, "a < b");
  const mass::Point pts[] = {{0, -1}, {1, 1}};
  f.polyline(pts, "black");
  f.rect({0.25, 0.5, 0, 0.5}, "red", 0.5);
  f.label(0.5, 0.5, "x&y");
  const auto s = f.str();
  CHECK(s.rfind("<svg", 0) == 0);
  CHECK(s.find("</svg>") != std::string::npos);
  CHECK(s.find("<polyline") != std::string::npos);
  CHECK(s.find("fill=\"red\"") != std::string::npos);
  CHECK(s.find("a &lt; b") != std::string::npos);
  CHECK(s.find("x&amp;y") != std::string::npos);
  // (0, -1) maps to the lower-left corner of the 40-pixel margin frame.
  CHECK(s.find("40.00,260.00") != std::string::npos);
  CHECK_THROWS_AS(SvgFigure(400, 300, {1, 1, 0, 1}), std::invalid_argument);
}

TEST_CASE("builtins") {
  CHECK(builtin_names() == std::vector<std::string>{"fubini-study", "p1xp1"});
  const auto fs = builtin("fubini-study");
  CHECK(fs.data.dimension() == 1);
  CHECK_NOTHROW(fs.validate());
  const auto p = builtin("p1xp1");
  CHECK(p.data.dimension() == 2);
  CHECK(p.data.guillemin_scale == 0.5);
  try {
    builtin("cp2");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "builtin");
  }
}

TEST_CASE("run config validation") {
  auto c = builtin("fubini-study");
  c.raster = 32;
  try {
    c.validate();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.field() == "raster");
  }
  c.raster = 1024;
  c.T = -1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("parse config") {
  const auto c = parse_config(kFs1d);
  CHECK(c.name == "fs");
  REQUIRE(c.data.dimension() == 1);
  CHECK(c.data.axes[0].velocity_kind == toric::VelocityKind::polynomial);
  CHECK(c.data.axes[0].velocity.value(0.5) == doctest::Approx(-0.25));
  CHECK(c.moment_nodes == 4097);
  CHECK_FALSE(c.T.has_value());

  // Same data as the builtin: identical lifespans.
  CHECK(toric::convex_lifespan(c.data).t_cvx ==
        doctest::Approx(toric::convex_lifespan(builtin("fubini-study").data).t_cvx));

  const auto two = parse_config(R"(
dimension = 2
facet = 1 0 -1
facet = -1 0 -1
facet = 0 1 -1
facet = 0 -1 -1
u0 = guillemin_plus_smooth
u0.scale = 0.5
u0.F.y1 = 0 0 0.1
udot0.y1 = fubini_study_quadratic
udot0.y2 = 0 0 1
moment_nodes = 513
T = 2.5
)");
  CHECK(two.data.dimension() == 2);
  CHECK(two.data.guillemin_scale == 0.5);
  CHECK(two.data.axes[0].velocity_kind == toric::VelocityKind::fubini_study_quadratic);
  CHECK(two.data.axes[1].velocity.value(0.5) == doctest::Approx(0.25));
  CHECK(two.moment_nodes == 513);
  REQUIRE(two.T.has_value());
  CHECK(*two.T == 2.5);
}

TEST_CASE("config errors name the field") {
  const std::string base = "dimension = 1\nfacet = 1 -1\nfacet = -1 -1\n";
  CHECK(failing_field(base) == "udot0");
  CHECK(failing_field("facet = 1 -1\nfacet = -1 -1\nudot0 = 1\n") == "dimension");
  CHECK(failing_field(base + "udot0 = 0 0 -1\ncolour = red\n") == "colour");
  CHECK(failing_field(base + "udot0 = 0 0 -1\nudot0 = 1\n") == "udot0");
  CHECK(failing_field(base + "udot0 = 0 zero\n") == "udot0");
  CHECK(failing_field(base + "udot0 = 1\nraster = 10\n") == "raster");
  CHECK(failing_field(base + "udot0 = 1\nT = -2\n") == "T");
  CHECK(failing_field(base + "udot0 = 1\nu0.F = 0 1\n") == "u0.F");
  CHECK(failing_field(base + "udot0 = 1\nu0 = bergman\n") == "u0");
  CHECK(failing_field(base + "udot0 = 1\nseparable = false\n") == "separable");
  CHECK(failing_field(base + "udot0.y2 = 1\n") == "udot0.y2");
  CHECK(failing_field("dimension = 1\nfacet = 1 -1\nudot0 = 1\n") == "facet");
  CHECK(failing_field("dimension = 1\nfacet = 1 -1 3\nfacet = -1 -1\nudot0 = 1\n") == "facet");
  CHECK(failing_field(base + "just words\n") == "line 4");
  CHECK(failing_field(base + "udot0 = 1\n") == "");
}

TEST_CASE("load config from disk") {
  CHECK_THROWS_AS(load_config("/nonexistent/path.cfg"), ConfigError);
}
