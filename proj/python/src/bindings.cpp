#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>

#include "gmcf/app.hpp"
#include "gmcf/config.hpp"
#include "gmcf/driver.hpp"
#include "gmcf/errors.hpp"
#include "gmcf/sor.hpp"
#include "gmcf/work_distribution.hpp"

namespace py = pybind11;
using namespace gmcf;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

// Interior of f as a (km, jm, im) array, i fastest.
FloatArray to_numpy(const ScalarField& f) {
  FloatArray out({f.km(), f.jm(), f.im()});
  auto v = out.mutable_unchecked<3>();
  for (int k = 1; k <= f.km(); ++k)
    for (int j = 1; j <= f.jm(); ++j)
      for (int i = 1; i <= f.im(); ++i) v(k - 1, j - 1, i - 1) = f(i, j, k);
  return out;
}

ScalarField from_numpy(const FloatArray& a) {
  if (a.ndim() != 3) throw ShapeError("expected a 3-d array shaped (km, jm, im)");
  const auto v = a.unchecked<3>();
  ScalarField f(static_cast<int>(a.shape(2)), static_cast<int>(a.shape(1)),
                static_cast<int>(a.shape(0)));
  for (int k = 1; k <= f.km(); ++k)
    for (int j = 1; j <= f.jm(); ++j)
      for (int i = 1; i <= f.im(); ++i) f(i, j, k) = v(k - 1, j - 1, i - 1);
  return f;
}

SorScheme scheme_of(const std::string& s) {
  if (s == "redblack") return SorScheme::RedBlack;
  if (s == "twinned") return SorScheme::Twinned;
  throw ConfigError("scheme must be 'redblack' or 'twinned', got '" + s + "'");
}

py::tuple solve(const FloatArray& rhs_in, float h, std::optional<float> omega,
                int n_iter, const std::string& scheme, int workers) {
  const ScalarField rhs = from_numpy(rhs_in);
  const Grid g = Grid::uniform(rhs.im(), rhs.jm(), rhs.km(), h);
  const SorScheme s = scheme_of(scheme);
  PressureSolution sol;
  {
    py::gil_scoped_release release;
    sol = solve_pressure(g.make_field<float>(), rhs, build_uniform_coeffs(g),
                         omega.value_or(default_omega(s)), n_iter, s, workers);
  }
  return py::make_tuple(to_numpy(sol.p), sol.residuals);
}

py::dict audit(std::int64_t ip, std::int64_t jp, std::int64_t kp,
               std::int64_t nthreads, std::int64_t nunits) {
  const auto a = audit_boundary_coverage(ip, jp, kp, nthreads, nunits);
  py::dict d;
  d["boundary_range"] = a.boundary_range;
  d["padded_range"] = a.padded_range;
  d["covered"] = a.covered;
  d["padding"] = a.padding;
  d["ok"] = a.ok();
  d["first_offending_gid"] = a.first_offending_gid;
  return d;
}

py::object map_gid(std::int64_t gid, std::int64_t ip, std::int64_t jp, std::int64_t kp) {
  const auto p = map_boundary_gid(gid, ip, jp, kp);
  if (!p) return py::none();
  return py::make_tuple(to_string(p->face), p->coords[0], p->coords[1]);
}

py::dict profile(float u_star, float z0, std::vector<float> heights,
                 float gust_amplitude, float gust_period, double t) {
  DriverConfig c;
  c.kp = static_cast<int>(heights.size());
  c.u_star = u_star;
  c.z0 = z0;
  c.level_heights = std::move(heights);
  c.gust_amplitude = gust_amplitude;
  c.gust_period = gust_period;
  const auto p = generate_profile(c, t);
  py::dict d;
  d["u"] = p.u;
  d["v"] = p.v;
  d["w"] = p.w;
  return d;
}

py::dict coupled(const std::string& text) {
  const RunConfig cfg = parse_config(text, RunMode::Coupled);
  CoupledSummary s;
  {
    py::gil_scoped_release release;
    s = run_coupled(cfg);
  }
  py::dict d;
  d["ok"] = s.ok();
  d["reqdata"] = s.reqdata_count();
  d["respdata"] = s.respdata_count();
  d["les_steps"] = s.les.steps_run;
  d["driver_steps"] = s.driver.steps_run;
  d["first_interpolation_interval"] = s.les.first_interpolation_interval;
  d["interval_log"] = s.interval_log();
  d["summary"] = s.to_text();
  if (s.les.final_state) {
    d["u"] = to_numpy(s.les.final_state->u);
    d["p"] = to_numpy(s.les.final_state->p);
  }
  return d;
}

py::dict les_standalone(const std::string& text) {
  const RunConfig cfg = parse_config(text, RunMode::LesStandalone);
  std::optional<LesStandaloneReport> r;
  {
    py::gil_scoped_release release;
    r = run_les_standalone(cfg);
  }
  py::dict d;
  d["steps"] = r->steps_run;
  d["max_divergence"] = r->max_divergence;
  d["max_speed"] = r->max_speed;
  d["residuals"] = r->last_residuals;
  for (auto [name, f] : {std::pair{"u", &r->state.u}, {"v", &r->state.v},
                         {"w", &r->state.w}, {"p", &r->state.p}}) {
    d[name] = to_numpy(*f);
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Model-coupling runtime, LES and SOR kernels";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ProtocolError>(m, "ProtocolError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<UnsupportedError>(m, "UnsupportedError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);

  m.def("boundary_range", &boundary_range, py::arg("ip"), py::arg("jp"), py::arg("kp"));
  m.def("padded_range", &padded_range, py::arg("range"), py::arg("nthreads"),
        py::arg("nunits"));
  m.def("map_boundary_gid", &map_gid, py::arg("gid"), py::arg("ip"), py::arg("jp"),
        py::arg("kp"),
        "(face, c0, c1) for a boundary gid, None for padding.");
  m.def("audit_boundary_coverage", &audit, py::arg("ip"), py::arg("jp"), py::arg("kp"),
        py::arg("nthreads"), py::arg("nunits"));

  m.def("solve_pressure", &solve, py::arg("rhs"), py::arg("h") = 1.0f,
        py::arg("omega") = py::none(), py::arg("n_iter") = kDefaultSorIterations,
        py::arg("scheme") = "redblack", py::arg("workers") = 1,
        "Zero-Dirichlet SOR solve of a (km, jm, im) float32 rhs. Returns (p, residuals).");

  m.def("generate_profile", &profile, py::arg("u_star"), py::arg("z0"),
        py::arg("heights"), py::arg("gust_amplitude") = 0.0f,
        py::arg("gust_period") = 600.0f, py::arg("t") = 0.0);

  m.def("run_coupled", &coupled, py::arg("config_text"));
  m.def("run_les_standalone", &les_standalone, py::arg("config_text"));
}
