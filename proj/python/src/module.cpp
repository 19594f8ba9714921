#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "hankelspec/asymptotics.hpp"
#include "hankelspec/errors.hpp"
#include "hankelspec/hankel.hpp"
#include "hankelspec/laplace.hpp"
#include "hankelspec/psido.hpp"
#include "hankelspec/spectra.hpp"
#include "hankelspec/verify.hpp"

namespace py = pybind11;
using namespace hankelspec;
using nlohmann::json;

namespace {

// Reports cross the boundary as plain dicts.
py::object to_py(const json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

DiscreteKernel kernel_arg(const py::object& k) {
  if (py::isinstance<py::str>(k)) return discrete_kernel_from_json(json::parse(k.cast<std::string>()));
  const std::string text = py::module_::import("json").attr("dumps")(k).cast<std::string>();
  return discrete_kernel_from_json(json::parse(text));
}

}  // namespace

PYBIND11_MODULE(_hankelspec, m) {
  m.doc() = "Spectra of Hankel operators with log-power kernels";
  m.attr("__version__") = HANKELSPEC_VERSION;

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<ConvergenceError>(m, "ConvergenceError", PyExc_ArithmeticError);
  py::register_exception<ResolutionError>(m, "ResolutionError", PyExc_ArithmeticError);

  m.def("v_alpha", &v_alpha, py::arg("alpha"));
  m.def("beta", &beta_fn, py::arg("a"), py::arg("b"));
  m.def(
      "coefficients",
      [](double alpha, double b1, double bm1) {
        json j = c_pm_discrete({alpha, b1, bm1});
        return to_py(j);
      },
      py::arg("alpha"), py::arg("b1"), py::arg("bm1"));
  m.def(
      "coefficients_continuous",
      [](double alpha, double b0, double binf) {
        json j = c_pm_continuous({alpha, b0, binf});
        return to_py(j);
      },
      py::arg("alpha"), py::arg("b0"), py::arg("binf"));
  m.def("weyl_coefficient", &weyl_coefficient, py::arg("a_plus_inf"), py::arg("a_minus_inf"),
        py::arg("alpha"));

  m.def(
      "model_sequence",
      [](double alpha, double b1, double bm1, std::size_t count) {
        return model_sequence({alpha, b1, bm1}).samples(count);
      },
      py::arg("alpha"), py::arg("b1"), py::arg("bm1"), py::arg("count"));

  py::class_<SpectrumResult>(m, "Spectrum")
      .def_readonly("lambda_plus", &SpectrumResult::lambda_plus)
      .def_readonly("lambda_minus", &SpectrumResult::lambda_minus)
      .def_readonly("residual_plus", &SpectrumResult::residual_plus)
      .def_readonly("residual_minus", &SpectrumResult::residual_minus)
      .def_readonly("dim", &SpectrumResult::dim)
      .def_readonly("norm_estimate", &SpectrumResult::norm_estimate)
      .def_readonly("complete_plus", &SpectrumResult::complete_plus)
      .def_readonly("complete_minus", &SpectrumResult::complete_minus)
      .def_readonly("method", &SpectrumResult::method)
      .def("counting", &counting_function, py::arg("eps"))
      .def("to_csv", &to_csv)
      .def("__repr__", [](const SpectrumResult& s) {
        return "<Spectrum N=" + std::to_string(s.dim) + " +" + std::to_string(s.lambda_plus.size()) +
               " -" + std::to_string(s.lambda_minus.size()) + ">";
      });

  m.def(
      "spectrum",
      [](const py::object& kernel, std::size_t n, std::size_t k) {
        StudyOptions so;
        so.lanczos_k = k;
        const auto h = kernel_arg(kernel);
        py::gil_scoped_release release;
        return truncated_spectrum(h, n, so);
      },
      py::arg("kernel"), py::arg("n"), py::arg("k") = 64,
      "Spectrum of the N x N truncation; kernel is a JSON description (dict or str).");

  m.def(
      "fit",
      [](const SpectrumResult& s, double alpha, std::size_t first, std::size_t last) {
        return to_py(to_json(fit_coefficient(s, alpha, {first, last})));
      },
      py::arg("spectrum"), py::arg("alpha"), py::arg("first"), py::arg("last"));

  m.def(
      "hs_identity",
      [](const py::object& kernel, std::size_t n) {
        const auto r = hs_identity(kernel_arg(kernel), n);
        return py::make_tuple(r.lhs, r.rhs, r.rel_err);
      },
      py::arg("kernel"), py::arg("n"));

  m.def(
      "laplace_ratios",
      [](double alpha, int mpow, const std::vector<double>& t, bool large) {
        return to_py(to_json(large ? lemma_L_check(alpha, mpow, 0.5, t) : lemma_M_check(alpha, mpow, 2.0, t)));
      },
      py::arg("alpha"), py::arg("m"), py::arg("t"), py::arg("large") = true);

  m.def(
      "psido_top",
      [](double alpha, double b0, double binf, double x_half, std::size_t m_pts, std::size_t k) {
        const auto psi = build_psdo(symbol_star({alpha, b0, binf}, smooth_cutoffs()), x_half, m_pts);
        LanczosOptions lo;
        lo.k = k;
        py::gil_scoped_release release;
        return lanczos_extreme(psi.linear_map(), m_pts, lo);
      },
      py::arg("alpha"), py::arg("b0"), py::arg("binf"), py::arg("x_half") = 40.0,
      py::arg("m") = 1 << 14, py::arg("k") = 10);
}
