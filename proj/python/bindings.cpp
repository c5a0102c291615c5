#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hrma/convex_core.hpp"
#include "hrma/ma_measure.hpp"
#include "hrma/ray_evolution.hpp"
#include "hrma/reporting.hpp"
#include "hrma/toric_geometry.hpp"

namespace py = pybind11;
using namespace hrma;

namespace {

using Pairs = std::vector<std::pair<double, double>>;

Pairs components(const IntervalUnion& u) {
  Pairs out;
  for (const auto& c : u.components()) out.emplace_back(c.lo, c.hi);
  return out;
}

toric::ToricCauchyData data_for(const std::string& name) { return report::builtin(name).data; }

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Legendre-transform solver for the toric homogeneous Monge-Ampere Cauchy problem";

  py::register_exception<report::ConfigError>(m, "ConfigError", PyExc_ValueError);

  py::class_<toric::ToricCauchyData>(m, "CauchyData")
      .def_property_readonly("dimension", &toric::ToricCauchyData::dimension)
      .def_readonly("guillemin_scale", &toric::ToricCauchyData::guillemin_scale);

  m.def("builtin", &data_for, py::arg("name"), "Builtin Cauchy data: fubini-study or p1xp1.");
  m.def("parse_config", [](const std::string& text) { return report::parse_config(text).data; },
        py::arg("text"), "Cauchy data from the line-based config format.");

  m.def("lower_convex_envelope",
        [](std::vector<double> x, std::vector<double> v) {
          const auto env = convex::lower_convex_envelope(convex::SampledFunction(std::move(x), std::move(v)));
          return py::make_tuple(env.breakpoints(), env.values());
        },
        py::arg("nodes"), py::arg("values"),
        "Breakpoints and values of the lower convex envelope of the samples.");

  m.def("conjugate",
        [](std::vector<double> x, std::vector<double> v, const std::vector<double>& slopes) {
          const auto f = convex::lower_convex_envelope(convex::SampledFunction(std::move(x), std::move(v)));
          const auto g = convex::conjugate(f, slopes);
          return py::make_tuple(g.breakpoints(), g.values());
        },
        py::arg("nodes"), py::arg("values"), py::arg("slopes"),
        "Discrete conjugate sup_i (p x_i - v_i) over the slope grid (restricted to the slope range).");

  m.def("convex_lifespan",
        [](const toric::ToricCauchyData& d, std::size_t nodes) {
          const auto r = toric::convex_lifespan(d, nodes);
          return py::make_tuple(r.t_cvx, r.argmin);
        },
        py::arg("data"), py::arg("grid_nodes") = 4097, "(t_cvx, argmin); t_cvx is inf when never reached.");

  m.def("a_set",
        [](const toric::ToricCauchyData& d, double s, std::size_t nodes) {
          std::vector<Pairs> out;
          for (const auto& slab : toric::a_set(d, s, nodes).slabs) out.push_back(components(slab));
          return out;
        },
        py::arg("data"), py::arg("s"), py::arg("nodes") = 4097,
        "Per-axis components of A_s.");

  m.def("psi",
        [](const toric::ToricCauchyData& d, double s, const std::vector<double>& xs, std::size_t nodes) {
          const ray::PotentialSlice slice(d, s, nodes);
          std::vector<double> out;
          for (double x : xs) out.push_back(slice.value(x));
          return out;
        },
        py::arg("data"), py::arg("s"), py::arg("x"), py::arg("nodes") = 4097,
        "psi(s, x) for one-dimensional data.");

  m.def("kinks",
        [](const toric::ToricCauchyData& d, double s, std::size_t nodes) {
          const ray::PotentialSlice slice(d, s, nodes);
          std::vector<std::tuple<double, double, double>> out;
          for (const auto& k : slice.singular_points())
            out.emplace_back(k.x, k.a, k.b);
          return out;
        },
        py::arg("data"), py::arg("s"), py::arg("nodes") = 4097, "(x_s, a, b) per kink of psi_s.");

  m.def("mass",
        [](const toric::ToricCauchyData& d, double T, std::size_t raster, std::size_t s_mesh) {
          mass::MassOptions o;
          o.raster_cells = raster;
          o.s_mesh = s_mesh;
          const auto r = mass::mass_report(d, T, o);
          py::dict out;
          out["T"] = r.T;
          out["t_cvx"] = r.t_cvx;
          out["mass_singular_lower"] = r.mass_singular_lower;
          out["prop3_bound"] = r.prop3_bound;
          out["chords"] = r.chord_count;
          out["raster"] = r.raster_cells;
          out["regular_image_deviation"] = r.regular_image_deviation;
          out["invariants_ok"] = r.invariants_ok;
          return out;
        },
        py::arg("data"), py::arg("T"), py::arg("raster") = 1024, py::arg("s_mesh") = 400,
        "Monge-Ampere mass report up to time T (one-dimensional data).");
}
