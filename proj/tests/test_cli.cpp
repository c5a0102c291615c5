#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "oracles.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "hrma");
  std::ostringstream out, err;
  const int code = hrma::cli::run(std::move(args), out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  const auto p = fs::current_path() / "cli_out" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Rows of a CSV file without the header, split on commas.
std::vector<std::vector<std::string>> csv_rows(const fs::path& p) {
  std::istringstream in(slurp(p));
  std::vector<std::vector<std::string>> rows;
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string c;
    while (std::getline(ls, c, ',')) cells.push_back(c);
    rows.push_back(cells);
  }
  return rows;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "data.cfg";
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST_CASE("lifespan") {
  const auto dir = fresh_dir("lifespan");
  const auto r = run({"lifespan", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out == "t_cvx=1.000000 argmin=0.000000\n");
  CHECK(fs::exists(dir / "lifespan.csv"));

  const auto cfg = write_config(dir, "dimension = 1\nfacet = 1 -1\nfacet = -1 -1\nudot0 = 0 0 1\n");
  const auto inf = run({"lifespan", "--config", cfg.string(), "--out", dir.string()});
  CHECK(inf.code == 0);
  CHECK(inf.out == "t_cvx=inf argmin=none\n");
}

TEST_CASE("usage and config errors exit 2") {
  const auto dir = fresh_dir("errors");
  const auto cfg = write_config(dir, "dimension = 1\nfacet = 1 -1\nfacet = -1 -1\n");
  const auto r = run({"lifespan", "--config", cfg.string(), "--out", dir.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("udot0") != std::string::npos);

  CHECK(run({}).code == 2);
  CHECK(run({"bogus"}).code == 2);
  CHECK(run({"lifespan", "--builtin", "cp3"}).code == 2);
  CHECK(run({"lifespan", "--grid", "10"}).code == 2);
  CHECK(run({"ray", "--builtin", "p1xp1", "--out", dir.string()}).code == 2);
  CHECK(run({"lifespan", "--config", cfg.string(), "--builtin", "p1xp1"}).code == 2);
  CHECK(run({"lifespan", "--config", (dir / "missing.cfg").string()}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("envelope marks A_s") {
  const auto dir = fresh_dir("envelope");
  const auto r = run({"envelope", "--s", "2", "--out", dir.string(), "--svg"});
  CHECK(r.code == 0);
  CHECK(fs::exists(dir / "envelope.svg"));
  const double a2 = oracle::tangency_root(2.0);
  const auto rows = csv_rows(dir / "envelope.csv");
  REQUIRE(rows.size() == 4097);
  const double h = 2.0 / 4096;
  for (const auto& row : rows) {
    const double y = std::stod(row[0]);
    const bool in = row[3] == "true";
    if (std::abs(std::abs(y) - a2) > h) CHECK(in == (std::abs(y) < a2));
    CHECK(std::stod(row[2]) <= std::stod(row[1]) + 1e-9);
  }

  const auto early = fresh_dir("envelope_early");
  CHECK(run({"envelope", "--s", "0.5", "--out", early.string()}).code == 0);
  for (const auto& row : csv_rows(early / "envelope.csv")) CHECK(row[3] == "false");

  const auto zero = fresh_dir("envelope_zero");
  CHECK(run({"envelope", "--s", "0", "--out", zero.string()}).code == 0);
  for (const auto& row : csv_rows(zero / "envelope.csv")) CHECK(row[1] == row[2]);

  const auto two = fresh_dir("envelope_2d");
  CHECK(run({"envelope", "--builtin", "p1xp1", "--s", "1", "--out", two.string()}).code == 0);
  CHECK(fs::exists(two / "envelope_y1.csv"));
  CHECK(fs::exists(two / "envelope_y2.csv"));
}

TEST_CASE("ray outputs") {
  const auto dir = fresh_dir("ray");
  const auto r = run({"ray", "--s", "2", "--T", "2", "--out", dir.string(), "--svg"});
  CHECK(r.code == 0);
  CHECK(r.out.find("kinks=1 x_s=0.000000") != std::string::npos);
  for (const char* f : {"ray.csv", "metric.csv", "graph.csv", "kinks.csv", "ray.svg"})
    CHECK(fs::exists(dir / f));

  // psi(0, 0) = 0 and psi_0 is the conjugate of the Guillemin potential.
  for (const auto& row : csv_rows(dir / "graph.csv")) {
    if (std::stod(row[0]) != 0.0) continue;
    const double x = std::stod(row[1]);
    CHECK(std::abs(std::stod(row[2]) - oracle::guillemin_conjugate(x)) < 1e-10);
  }

  // Kinks appear only after t_cvx = 1, at x = 0, with widening subdifferentials.
  double prev_width = 0.0;
  const auto kinks = csv_rows(dir / "kinks.csv");
  CHECK_FALSE(kinks.empty());
  for (const auto& row : kinks) {
    const double s = std::stod(row[0]);
    CHECK(s > 1.0);
    CHECK(std::abs(std::stod(row[1])) < 1e-12);
    const double width = std::stod(row[3]) - std::stod(row[2]);
    CHECK(width > prev_width);
    CHECK(std::stod(row[3]) == doctest::Approx(oracle::tangency_root(s)).epsilon(1e-9));
    prev_width = width;
  }
}

TEST_CASE("mass outputs and determinism") {
  const auto dir = fresh_dir("mass");
  const auto before = run({"mass", "--T", "1", "--raster", "256", "--out", dir.string()});
  CHECK(before.code == 0);
  CHECK(before.out.find("mass_singular_lower=0\n") != std::string::npos);

  const auto a = fresh_dir("mass_a");
  const auto b = fresh_dir("mass_b");
  const auto ra = run({"mass", "--T", "1.5", "--raster", "256", "--out", a.string(), "--svg"});
  const auto rb = run({"mass", "--T", "1.5", "--raster", "256", "--out", b.string(), "--svg"});
  REQUIRE(ra.code == 0);
  CHECK(ra.out == rb.out);
  for (const char* f : {"mass.csv", "chords.csv", "mass.txt", "subdiff.svg"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  const auto row = csv_rows(a / "mass.csv").at(0);
  const double m = std::stod(row[2]);
  CHECK(m > 0.0);
  CHECK(m < 4.0 / 3.0);
  CHECK(m == doctest::Approx(oracle::fs_mass(1.5)).epsilon(0.05));
}

TEST_CASE("sweep") {
  const auto dir = fresh_dir("sweep");
  const auto r = run({"sweep", "--T", "3", "--grid", "1025", "--out", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("slices=50 start=1.000000 T=3.000000 nested=true", 0) == 0);

  const auto p = fresh_dir("sweep_p1xp1");
  CHECK(run({"sweep", "--builtin", "p1xp1", "--T", "0.9", "--grid", "1025", "--out", p.string()}).code == 0);
  const auto rows = csv_rows(p / "sweep_summary.csv");
  REQUIRE(rows.size() == 50);
  for (const auto& row : rows) {
    CHECK(row[4] == "true");
    CHECK(std::stod(row[5]) >= 0.05);
  }
}
