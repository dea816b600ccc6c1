#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include "vww/error.hpp"
#include "vww/estimates.hpp"
#include "vww/potential.hpp"
#include "vww/prufer.hpp"
#include "vww/spectral.hpp"
#include "vww/veryweak.hpp"
#include "vww/wave.hpp"

namespace py = pybind11;
using namespace vww;

namespace {

// pybind11 holders cannot be pointers to const.
using PyBasis = std::shared_ptr<EigenBasis>;

py::array_t<double> to_array(const std::vector<double>& v) { return py::array_t<double>(v.size(), v.data()); }

GridFunction from_array(const Grid& grid, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 1 || static_cast<std::size_t>(a.shape(0)) != grid.size()) {
    throw Error(ErrorCode::GridMismatch, "expected " + std::to_string(grid.size()) + " samples");
  }
  return GridFunction(grid, std::vector<double>(a.data(), a.data() + a.shape(0)));
}

py::array_t<double> to_matrix(const std::vector<GridFunction>& rows) {
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  py::array_t<double> out(std::vector<py::ssize_t>{static_cast<py::ssize_t>(rows.size()), static_cast<py::ssize_t>(cols)});
  auto m = out.mutable_unchecked<2>();
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t i = 0; i < cols; ++i) m(j, i) = rows[j].values[i];
  }
  return out;
}

py::dict fit_dict(const std::optional<PowerFit>& f) {
  py::dict d;
  if (f) {
    d["slope"] = f->slope;
    d["intercept"] = f->intercept;
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Spectral wave solver for distributional potentials q = nu'.";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);

  py::class_<NuPrimitive>(m, "Nu")
      .def(py::init([](std::vector<std::pair<double, double>> jumps, double slope) {
             std::vector<SmoothTerm> smooth;
             if (slope != 0.0) smooth.push_back({SmoothKind::Linear, {slope}, {}});
             std::vector<Jump> js;
             for (auto [x, a] : jumps) js.push_back({x, a});
             return NuPrimitive(std::move(smooth), std::move(js));
           }),
           py::arg("jumps") = std::vector<std::pair<double, double>>{}, py::arg("slope") = 0.0,
           "nu = slope*x + sum_i a_i H(x - x_i); q = slope + sum_i a_i delta_{x_i}.")
      .def_static("zero", &NuPrimitive::zero)
      .def_static("linear", &NuPrimitive::linear, py::arg("c"))
      .def_static("heaviside", &NuPrimitive::heaviside, py::arg("x0"), py::arg("alpha"))
      .def_static("sine", &NuPrimitive::sine, py::arg("amplitude"), py::arg("mode"))
      .def_static("cosine", &NuPrimitive::cosine, py::arg("amplitude"), py::arg("mode"))
      .def("__call__", &NuPrimitive::operator(), py::arg("x"))
      .def_property_readonly("has_atoms", &NuPrimitive::has_atoms)
      .def("l2_norm", &NuPrimitive::l2_norm)
      .def("mollify", [](const NuPrimitive& nu, double eps, std::size_t grid, const std::string& profile) {
             return mollify_primitive(nu, {mollifier_profile_from_string(profile), eps}, Grid(grid));
           },
           py::arg("epsilon"), py::arg("grid") = 2048, py::arg("profile") = "bump");

  m.def("mollify_potential",
        [](const NuPrimitive& nu, double eps, std::size_t grid, const std::string& profile) {
          return to_array(mollify_potential(nu, {mollifier_profile_from_string(profile), eps}, Grid(grid)).values);
        },
        py::arg("nu"), py::arg("epsilon"), py::arg("grid") = 2048, py::arg("profile") = "bump");

  py::class_<EigenBasis, PyBasis>(m, "Basis")
      .def_property_readonly("lambdas", [](const EigenBasis& b) { return to_array(b.lambdas()); })
      .def_property_readonly("nodes", [](const EigenBasis& b) { return to_array(b.grid().nodes()); })
      .def_property_readonly("gram_off_diagonal", &EigenBasis::gram_off_diagonal)
      .def("__len__", &EigenBasis::size)
      .def("phi", [](const EigenBasis& b, std::size_t n) {
             if (n < 1 || n > b.size()) throw py::index_error("mode index out of range");
             return to_array(b[n - 1].phi.values);
           },
           py::arg("n"))
      .def("analyze", [](const PyBasis& b, py::array_t<double> f) {
             return to_array(analyze(from_array(b->grid(), f), b).coeffs);
           },
           py::arg("f"))
      .def("sobolev_norm", [](const PyBasis& b, py::array_t<double> f, double k) {
             return sobolev_norm(analyze(from_array(b->grid(), f), b), k);
           },
           py::arg("f"), py::arg("k"));

  m.def("build_basis",
        [](const NuPrimitive& nu, int n_max, std::size_t grid, std::size_t threads) {
          py::gil_scoped_release release;
          return std::const_pointer_cast<EigenBasis>(build_basis(nu, n_max, Grid(grid), {}, threads));
        },
        py::arg("nu"), py::arg("n_max") = 40, py::arg("grid") = 2048, py::arg("threads") = 1);

  m.def("solve",
        [](const PyBasis& b, py::array_t<double> u0, py::array_t<double> u1, double horizon, std::size_t samples) {
          const WaveProblem p = make_problem(b, from_array(b->grid(), u0), from_array(b->grid(), u1), horizon);
          const WaveSolution s = solve_homogeneous(p, uniform_times(horizon, samples));
          py::dict d;
          d["times"] = to_array(s.times);
          d["u"] = to_matrix(s.values);
          d["u_t"] = to_matrix(s.dt_values);
          d["energy"] = to_array(mode_energy(s));
          return d;
        },
        py::arg("basis"), py::arg("u0"), py::arg("u1"), py::arg("T") = 1.0, py::arg("time_samples") = 100,
        "Homogeneous solve on T*j/time_samples, j = 0..time_samples.");

  m.def("estimate",
        [](const std::string& id, const PyBasis& b, py::array_t<double> u0, py::array_t<double> u1, double horizon,
           std::size_t samples) {
          const WaveProblem p = make_problem(b, from_array(b->grid(), u0), from_array(b->grid(), u1), horizon);
          const WaveSolution s = solve_homogeneous(p, uniform_times(horizon, samples));
          const EstimateReport r = verify(estimate_id_from_string(id), p, s);
          py::dict d;
          d["lhs"] = r.lhs_max;
          d["rhs"] = r.rhs;
          d["ratio"] = r.ratio;
          d["time"] = r.lhs_time;
          return d;
        },
        py::arg("id"), py::arg("basis"), py::arg("u0"), py::arg("u1"), py::arg("T") = 1.0,
        py::arg("time_samples") = 100);

  m.def("existence",
        [](const NuPrimitive& nu, std::vector<double> ladder, std::size_t grid, int n_max, double horizon) {
          VeryWeakExperiment e;
          e.nu = nu;
          e.grid = Grid(grid);
          e.n_max = n_max;
          e.horizon = horizon;
          e.ladder = std::move(ladder);
          e.u0 = GridFunction::sample(e.grid, [](double x) { return x * (1 - x); });
          e.u1 = GridFunction(e.grid);
          NetReport r;
          {
            py::gil_scoped_release release;
            r = run_existence(e);
          }
          py::dict d;
          std::vector<double> eps, u, q;
          for (const NetRow& row : r.rows) {
            eps.push_back(row.epsilon);
            u.push_back(row.u_norm);
            q.push_back(row.q_linf);
          }
          d["epsilon"] = to_array(eps);
          d["u_norm"] = to_array(u);
          d["q_linf"] = to_array(q);
          d["u_fit"] = fit_dict(r.u_fit);
          d["q_fit"] = fit_dict(r.q_fit);
          return d;
        },
        py::arg("nu"), py::arg("ladder") = default_ladder(), py::arg("grid") = 2048, py::arg("n_max") = 40,
        py::arg("T") = 1.0, "Mollified ladder with data u0 = x(1-x), u1 = 0.");

  m.def("default_ladder", [] { return to_array(default_ladder()); });
}
