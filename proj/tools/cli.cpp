#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "hrma/convex_core.hpp"
#include "hrma/ma_measure.hpp"
#include "hrma/ray_evolution.hpp"
#include "hrma/reporting.hpp"
#include "hrma/toric_geometry.hpp"

namespace hrma::cli {
namespace {

namespace fs = std::filesystem;
using report::cell;
using report::CsvTable;
using report::RunConfig;
using report::SvgFigure;

struct Options {
  std::string command;
  std::string config_path;
  std::string builtin_name;
  std::optional<double> s;
  std::optional<double> T;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> raster;
  std::string out_dir = ".";
  bool svg = false;
};

class UsageError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string fixed6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  const std::string text = buf;
  return text == "-0.000000" ? text.substr(1) : text;
}

std::string axis_suffix(const RunConfig& cfg, std::size_t axis) {
  return cfg.data.dimension() == 1 ? "" : "_y" + std::to_string(axis + 1);
}

void require_1d(const RunConfig& cfg, const std::string& command) {
  if (cfg.data.dimension() != 1)
    throw UsageError(command + ": dimension must be 1 for this subcommand");
}

std::vector<double> uniform(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

mass::Box bounds(std::span<const mass::Point> pts) {
  mass::Box b{convex::kInf, -convex::kInf, convex::kInf, -convex::kInf};
  for (const auto& p : pts) {
    if (!std::isfinite(p.t) || !std::isfinite(p.y)) continue;
    b.t_lo = std::min(b.t_lo, p.t);
    b.t_hi = std::max(b.t_hi, p.t);
    b.y_lo = std::min(b.y_lo, p.y);
    b.y_hi = std::max(b.y_hi, p.y);
  }
  const double pt = 0.05 * std::max(b.t_hi - b.t_lo, 1e-3);
  const double py = 0.05 * std::max(b.y_hi - b.y_lo, 1e-3);
  return {b.t_lo - pt, b.t_hi + pt, b.y_lo - py, b.y_hi + py};
}

// ---------------------------------------------------------------------------

int cmd_lifespan(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const auto r = toric::convex_lifespan(cfg.data, cfg.moment_nodes);
  const auto n = cfg.data.dimension();

  std::string argmin = "none";
  if (!r.infinite()) {
    argmin.clear();
    for (std::size_t j = 0; j < r.argmin.size(); ++j) argmin += (j ? "," : "") + fixed6(r.argmin[j]);
  }
  out << "t_cvx=" << fixed6(r.t_cvx) << " argmin=" << argmin << '\n';

  std::vector<std::string> header{"t_cvx"};
  for (std::size_t j = 0; j < n; ++j) header.push_back("argmin_y" + std::to_string(j + 1));
  header.push_back("moment_nodes");
  CsvTable t(header);
  std::vector<std::string> row{cell(r.t_cvx)};
  for (std::size_t j = 0; j < n; ++j)
    row.push_back(r.infinite() ? cell(std::nan("")) : cell(r.argmin[j]));
  row.push_back(cell(cfg.moment_nodes));
  t.add_row(row);
  t.write(fs::path(opt.out_dir) / "lifespan.csv");
  return kExitOk;
}

int cmd_envelope(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const double s = opt.s.value_or(2.0);
  if (!(s >= 0.0)) throw UsageError("s: must be non-negative");
  bool ok = true;
  for (std::size_t axis = 0; axis < cfg.data.dimension(); ++axis) {
    const auto range = cfg.data.polytope.axis_range(axis);
    const auto grid = toric::interior_grid(range, cfg.moment_nodes);
    const toric::AxisEnvelope env(cfg.data, axis, s, grid);
    const auto& fn = env.functions();

    CsvTable t({"y", "u_s", "u_s_env", "in_A_s"});
    std::vector<mass::Point> graph, hull;
    for (double y : grid) {
      const double u = fn.us(s, y);
      const double e = env.value(y);
      if (e > u + 1e-9 * (1.0 + std::abs(u))) ok = false;
      t.add_row({cell(y), cell(u), cell(e), cell(env.gap().contains(y))});
      graph.push_back({y, u});
      hull.push_back({y, e});
    }
    const auto suffix = axis_suffix(cfg, axis);
    t.write(fs::path(opt.out_dir) / ("envelope" + suffix + ".csv"));

    out << "s=" << format_real(s) << " axis=y" << axis + 1
        << " components=" << env.gap().size();
    for (const auto& c : env.gap().components())
      out << " (" << fixed6(c.lo) << "," << fixed6(c.hi) << ")";
    out << '\n';

    if (opt.svg) {
      const auto box = bounds(graph);
      SvgFigure fig(720, 480, box, "u_s (black) and its convex envelope (red), s = " + fixed6(s));
      for (const auto& c : env.gap().components())
        fig.rect({c.lo, c.hi, box.y_lo, box.y_hi}, "#9ecae1", 0.5);
      fig.polyline(graph, "black");
      fig.polyline(hull, "#d62728", 1.0);
      fig.write(fs::path(opt.out_dir) / ("envelope" + suffix + ".svg"));
    }
  }
  return ok ? kExitOk : kExitInvariant;
}

int cmd_ray(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  require_1d(cfg, "ray");
  const double s = opt.s.value_or(2.0);
  const double T = cfg.T.value_or(2.0);
  if (!(s >= 0.0)) throw UsageError("s: must be non-negative");
  const auto xs = uniform(-3.0, 3.0, cfg.x_nodes);
  bool ok = true;

  const auto slice = ray::ray_slice(cfg.data, s, xs, cfg.moment_nodes);
  CsvTable ray_csv({"x", "psi", "dpsi_dx", "is_regular"});
  for (std::size_t i = 0; i < xs.size(); ++i) {
    ray_csv.add_row({cell(xs[i]), cell(slice.psi_values[i]), cell(slice.dpsi_dx[i]),
                     cell(static_cast<bool>(slice.regular[i]))});
    // The grid conjugate is a lower bound of the refined value.
    const double pl = slice.psi(xs[i]);
    if (std::isfinite(pl) && pl > slice.psi_values[i] + 1e-8 * (1.0 + std::abs(pl))) ok = false;
  }
  ray_csv.write(fs::path(opt.out_dir) / "ray.csv");

  const auto range = cfg.data.polytope.axis_range(0);
  const auto ys = toric::interior_grid(range, cfg.x_nodes);
  const auto metric = ray::metric_profile(cfg.data, s, ys, cfg.moment_nodes);
  CsvTable metric_csv({"y", "u_yy"});
  for (std::size_t i = 0; i < ys.size(); ++i) metric_csv.add_row({cell(ys[i]), cell(metric.u_yy[i])});
  metric_csv.write(fs::path(opt.out_dir) / "metric.csv");

  constexpr std::size_t kSlices = 41;
  const auto ss = uniform(0.0, T, kSlices);
  CsvTable graph({"s", "x", "psi"});
  CsvTable kinks({"s", "x_s", "a", "b"});
  std::vector<std::vector<mass::Point>> curves;
  for (double sk : ss) {
    const ray::PotentialSlice p(cfg.data, sk, cfg.moment_nodes);
    if (p.singular_points().size() != p.envelope().gap().size()) ok = false;
    std::vector<mass::Point> curve;
    for (double x : xs) {
      const double v = p.value(x);
      graph.add_row({cell(sk), cell(x), cell(v)});
      curve.push_back({x, v});
    }
    curves.push_back(std::move(curve));
    for (const auto& k : p.singular_points())
      kinks.add_row({cell(sk), cell(k.x), cell(k.a), cell(k.b)});
  }
  graph.write(fs::path(opt.out_dir) / "graph.csv");
  kinks.write(fs::path(opt.out_dir) / "kinks.csv");

  out << "s=" << format_real(s) << " kinks=" << slice.singular_points.size();
  for (const auto& k : slice.singular_points) out << " x_s=" << fixed6(k.x);
  out << " lattice_kinks=" << kinks.rows() << '\n';

  if (opt.svg) {
    std::vector<mass::Point> all;
    for (const auto& c : curves) all.insert(all.end(), c.begin(), c.end());
    SvgFigure fig(720, 480, bounds(all), "psi(s, .) for s in [0, " + fixed6(T) + "]");
    for (std::size_t k = 0; k < curves.size(); k += 4) {
      const int shade = static_cast<int>(200.0 * (1.0 - ss[k] / std::max(T, 1e-12)));
      char color[16];
      std::snprintf(color, sizeof color, "#%02x%02x%02x", shade, shade, 255);
      fig.polyline(curves[k], color, 1.2);
    }
    fig.write(fs::path(opt.out_dir) / "ray.svg");
  }
  return ok ? kExitOk : kExitInvariant;
}

void write_subdiff_svg(const RunConfig& cfg, const mass::MassReport& rep, const fs::path& path) {
  const toric::AxisFunctions fn(cfg.data, 0);
  const auto range = fn.range();
  const auto ys = uniform(range.lo, range.hi, 1025);
  std::vector<double> vs;
  for (double y : ys) vs.push_back(fn.udot(y));
  const auto env = convex::lower_convex_envelope(convex::SampledFunction(ys, vs));

  std::vector<mass::Point> graph, hull;
  for (std::size_t i = 0; i < ys.size(); ++i) {
    graph.push_back({-vs[i], ys[i]});
    hull.push_back({-env(ys[i]), ys[i]});
  }
  std::vector<mass::Point> all = graph;
  all.insert(all.end(), hull.begin(), hull.end());
  SvgFigure fig(720, 480, bounds(all), "subdifferential image, T = " + fixed6(rep.T));

  // Occupied cells, aggregated to at most 256 per axis.
  const auto& r = rep.region.raster;
  if (r.cells_t() > 0) {
    const std::size_t f = std::max<std::size_t>(1, r.cells_t() / 256);
    const auto& b = r.box();
    const double dt = (b.t_hi - b.t_lo) / static_cast<double>(r.cells_t());
    const double dy = (b.y_hi - b.y_lo) / static_cast<double>(r.cells_y());
    for (std::size_t J = 0; J * f < r.cells_y(); ++J)
      for (std::size_t I = 0; I * f < r.cells_t(); ++I) {
        bool any = false;
        for (std::size_t j = J * f; j < std::min((J + 1) * f, r.cells_y()) && !any; ++j)
          for (std::size_t i = I * f; i < std::min((I + 1) * f, r.cells_t()); ++i)
            if (r.occupied(i, j)) {
              any = true;
              break;
            }
        if (any)
          fig.rect({b.t_lo + dt * static_cast<double>(I * f), b.t_lo + dt * static_cast<double>((I + 1) * f),
                    b.y_lo + dy * static_cast<double>(J * f), b.y_lo + dy * static_cast<double>((J + 1) * f)},
                   "#9ecae1", 0.8);
      }
  }
  for (std::size_t k = 0; k < rep.chord_list.size(); k += 25) {
    const auto& c = rep.chord_list[k];
    const mass::Point seg[2] = {c.p0, c.p1};
    fig.polyline(seg, "#3182bd", 0.6);
  }
  fig.polyline(graph, "black");
  fig.polyline(hull, "#d62728", 1.0);
  fig.write(path);
}

int cmd_mass(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  require_1d(cfg, "mass");
  mass::MassOptions mo;
  mo.moment_nodes = cfg.moment_nodes;
  mo.s_mesh = cfg.s_mesh;
  mo.raster_cells = cfg.raster;
  const auto rep = mass::mass_report(cfg.data, cfg.T.value_or(1.5), mo);

  CsvTable t({"T", "t_cvx", "mass_lower", "prop3_bound", "chords", "raster"});
  t.add_row({cell(rep.T), cell(rep.t_cvx), cell(rep.mass_singular_lower), cell(rep.prop3_bound),
             cell(rep.chord_count), cell(rep.raster_cells)});
  t.write(fs::path(opt.out_dir) / "mass.csv");

  CsvTable ch({"s", "a", "b", "t0", "y0", "t1", "y1"});
  for (const auto& c : rep.chord_list)
    ch.add_row({cell(c.s), cell(c.a), cell(c.b), cell(c.p0.t), cell(c.p0.y), cell(c.p1.t), cell(c.p1.y)});
  ch.write(fs::path(opt.out_dir) / "chords.csv");

  {
    std::ofstream kv(fs::path(opt.out_dir) / "mass.txt", std::ios::binary);
    kv << rep.to_key_value();
  }
  if (opt.svg) write_subdiff_svg(cfg, rep, fs::path(opt.out_dir) / "subdiff.svg");

  out << rep.to_key_value();
  return rep.invariants_ok ? kExitOk : kExitInvariant;
}

int cmd_sweep(const RunConfig& cfg, const Options& opt, std::ostream& out) {
  const double T = cfg.T.value_or(3.0);
  const auto life = toric::convex_lifespan(cfg.data, cfg.moment_nodes);
  const double start = life.infinite() ? 0.0 : life.t_cvx;
  constexpr std::size_t kSteps = 50;

  CsvTable comps({"s", "axis", "component", "a", "b"});
  CsvTable summary({"s", "components", "hausdorff_prev", "nested_prev", "touches_facet",
                    "vertex_distance"});
  const auto vertices = cfg.data.polytope.vertices();
  const auto n = cfg.data.dimension();

  bool nested_all = true;
  double max_rate = 0.0;
  std::optional<double> prev;
  for (std::size_t k = 1; k <= kSteps && T > start; ++k) {
    const double s = start + (T - start) * static_cast<double>(k) / kSteps;
    const auto region = toric::a_set(cfg.data, s, cfg.moment_nodes);
    std::size_t count = 0;
    bool touches = false;
    for (std::size_t axis = 0; axis < n; ++axis) {
      const auto& slab = region.slabs[axis];
      count += slab.size();
      for (std::size_t c = 0; c < slab.size(); ++c)
        comps.add_row({cell(s), cell(axis + 1), cell(c), cell(slab[c].lo), cell(slab[c].hi)});
      for (std::size_t other = 0; other < n; ++other)
        for (double v : {cfg.data.polytope.axis_range(other).lo, cfg.data.polytope.axis_range(other).hi})
          touches = touches || region.touches_face(other, v);
    }
    double vdist = convex::kInf;
    for (const auto& v : vertices) vdist = std::min(vdist, region.distance_to(v));

    double hd = std::nan("");
    bool nested = true;
    if (prev && *prev > 0.0) {
      const auto d = toric::a_set_diagnostics(cfg.data, *prev, s, cfg.moment_nodes);
      hd = d.hausdorff;
      nested = d.nested;
      nested_all = nested_all && nested;
      if (std::isfinite(hd)) max_rate = std::max(max_rate, hd / (s - *prev));
    }
    summary.add_row({cell(s), cell(count), cell(hd), cell(nested), cell(touches), cell(vdist)});
    prev = s;
  }
  comps.write(fs::path(opt.out_dir) / "sweep.csv");
  summary.write(fs::path(opt.out_dir) / "sweep_summary.csv");

  out << "slices=" << summary.rows() << " start=" << fixed6(start) << " T=" << fixed6(T)
      << " nested=" << (nested_all ? "true" : "false") << " max_hausdorff_rate=" << format_real(max_rate)
      << '\n';
  return nested_all ? kExitOk : kExitInvariant;
}

RunConfig resolve_config(const Options& opt) {
  if (!opt.config_path.empty() && !opt.builtin_name.empty())
    throw UsageError("config: give either --config or --builtin, not both");
  RunConfig cfg = opt.config_path.empty() ? report::builtin(opt.builtin_name.empty() ? "fubini-study"
                                                                                     : opt.builtin_name)
                                          : report::load_config(opt.config_path);
  if (opt.grid) cfg.moment_nodes = *opt.grid;
  if (opt.raster) cfg.raster = *opt.raster;
  if (opt.T) cfg.T = *opt.T;
  cfg.validate();
  return cfg;
}

}  // namespace

int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Toric Legendre-transform solver for the homogeneous Monge-Ampere Cauchy problem",
               "hrma"};
  app.require_subcommand(1);
  app.fallthrough();

  Options opt;
  app.add_option("--config", opt.config_path, "Cauchy-data config file");
  app.add_option("--builtin", opt.builtin_name, "Builtin data: fubini-study or p1xp1");
  app.add_option("--s", opt.s, "Time s for envelope and ray");
  app.add_option("--T", opt.T, "Final time for ray, mass and sweep");
  app.add_option("--grid", opt.grid, "Moment-polytope nodes per axis");
  app.add_option("--raster", opt.raster, "Raster cells per axis for the mass");
  app.add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
  app.add_flag("--svg", opt.svg, "Also write SVG figures");

  const std::pair<const char*, const char*> commands[] = {
      {"lifespan", "Convex lifespan and its minimizer"},
      {"envelope", "u_s, its convex envelope and A_s at time s"},
      {"ray", "psi slices, lattice samples and kinks"},
      {"mass", "Monge-Ampere mass of the singular locus up to T"},
      {"sweep", "A_s over a mesh of 50 times up to T"}};
  for (const auto& [name, help] : commands)
    app.add_subcommand(name, help)->callback([&opt, name = std::string(name)] { opt.command = name; });

  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const auto cfg = resolve_config(opt);
    fs::create_directories(opt.out_dir);
    if (opt.command == "lifespan") return cmd_lifespan(cfg, opt, out);
    if (opt.command == "envelope") return cmd_envelope(cfg, opt, out);
    if (opt.command == "ray") return cmd_ray(cfg, opt, out);
    if (opt.command == "mass") return cmd_mass(cfg, opt, out);
    return cmd_sweep(cfg, opt, out);
  } catch (const report::ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << "usage: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInvariant;
  }
}

}  // namespace hrma::cli
