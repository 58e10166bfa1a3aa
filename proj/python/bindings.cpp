#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "convforge/approx.hpp"
#include "convforge/errors.hpp"
#include "convforge/factorize.hpp"
#include "convforge/json_io.hpp"
#include "convforge/network.hpp"
#include "convforge/sequence.hpp"
#include "convforge/toeplitz.hpp"

namespace py = pybind11;
using namespace convforge;

namespace {

std::vector<double> as_list(const FiniteSequence& s) { return {s.coeffs().begin(), s.coeffs().end()}; }

py::dict report_dict(const ErrorReport& r) {
  py::dict d;
  d["J"] = r.J;
  d["m"] = r.m;
  d["sup_error"] = r.sup_error;
  d["grid"] = r.grid;
  d["param_count"] = r.param_count;
  return d;
}

}  // namespace

PYBIND11_MODULE(_convforge, m) {
  m.doc() = "Sequence factorization and explicit deep CNN construction";

  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<NumericalError> numerical(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const ValidationError& e) {
      PyErr_SetString(validation.ptr(), (e.kind() + ": " + e.what()).c_str());
    } catch (const NumericalError& e) {
      PyErr_SetString(numerical.ptr(), (e.kind() + ": " + e.what()).c_str());
    }
  });

  m.def(
      "convolve",
      [](const std::vector<double>& a, const std::vector<double>& b) {
        return as_list(convolve(FiniteSequence(a), FiniteSequence(b)));
      },
      py::arg("a"), py::arg("b"));

  m.def(
      "toeplitz",
      [](const std::vector<double>& mask, int in_dim, int s) {
        return Eigen::MatrixXd(ConvMatrix(FiniteSequence(mask), in_dim, s).entries());
      },
      py::arg("mask"), py::arg("in_dim"), py::arg("s"));

  m.def(
      "factorize_mask",
      [](const std::vector<double>& W, int s, double tol) {
        const FactorizationResult r = factorize_mask(FiniteSequence(W), s, tol);
        std::vector<std::vector<double>> masks;
        for (const auto& mask : r.masks) masks.push_back(as_list(mask));
        py::dict d;
        d["masks"] = masks;
        d["J"] = r.J();
        d["max_rel_error"] = r.max_rel_error;
        return d;
      },
      py::arg("W"), py::arg("s"), py::arg("tol") = 1e-10);

  py::class_<RidgeTerm>(m, "RidgeTerm")
      .def(py::init<double, Eigen::VectorXd, double>(), py::arg("beta"), py::arg("alpha"), py::arg("t"))
      .def_readwrite("beta", &RidgeTerm::beta)
      .def_readwrite("alpha", &RidgeTerm::alpha)
      .def_readwrite("t", &RidgeTerm::t);

  py::class_<RidgeExpansion>(m, "RidgeExpansion")
      .def(py::init([](double beta0, Eigen::VectorXd alpha0, double v, std::vector<RidgeTerm> terms) {
             return RidgeExpansion{beta0, std::move(alpha0), v, std::move(terms)};
           }),
           py::arg("beta0"), py::arg("alpha0"), py::arg("v") = 0.0, py::arg("terms") = std::vector<RidgeTerm>{})
      .def_readwrite("beta0", &RidgeExpansion::beta0)
      .def_readwrite("alpha0", &RidgeExpansion::alpha0)
      .def_readwrite("v", &RidgeExpansion::v)
      .def_readwrite("terms", &RidgeExpansion::terms)
      .def_property_readonly("d", &RidgeExpansion::d)
      .def_property_readonly("m", &RidgeExpansion::m)
      .def("__call__", &RidgeExpansion::operator(), py::arg("x"))
      .def("validate", &RidgeExpansion::validate)
      .def("to_json", [](const RidgeExpansion& r) { return io::to_json(r).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::ridge_from_json(io::json::parse(s)); });

  py::class_<DeepCnn>(m, "DeepCnn")
      .def_property_readonly("d", [](const DeepCnn& n) { return n.config().d; })
      .def_property_readonly("s", [](const DeepCnn& n) { return n.config().s; })
      .def_property_readonly("J", [](const DeepCnn& n) { return n.config().J; })
      .def_property_readonly("widths", [](const DeepCnn& n) { return n.config().widths(); })
      .def_property_readonly("masks", [](const DeepCnn& n) {
        std::vector<std::vector<double>> out;
        for (const auto& mask : n.masks()) out.push_back(as_list(mask));
        return out;
      })
      .def_property_readonly("biases", [](const DeepCnn& n) {
        std::vector<Eigen::VectorXd> out;
        for (const auto& layer : n.layers()) out.push_back(layer.bias.entries);
        return out;
      })
      .def_property_readonly("output_coeffs", &DeepCnn::output_coeffs)
      .def_property_readonly("bound_ledger", &DeepCnn::bound_ledger)
      .def("__call__", [](const DeepCnn& n, const Eigen::VectorXd& x) { return evaluate(n, x); }, py::arg("x"))
      .def("to_json", [](const DeepCnn& n) { return io::to_json(n).dump(); })
      .def_static("from_json", [](const std::string& s) { return io::network_from_json(io::json::parse(s)); });

  m.def(
      "build_network",
      [](const RidgeExpansion& ridge, int s, int J, double domain_bound, double factor_tol) {
        return build_network(ridge, s, J, domain_bound, {factor_tol});
      },
      py::arg("ridge"), py::arg("s"), py::arg("J"), py::arg("domain_bound") = 1.0,
      py::arg("factor_tol") = 1e-9);

  m.def(
      "forward",
      [](const DeepCnn& net, const Eigen::VectorXd& x) {
        const ForwardPass pass = forward(net, x);
        return py::make_tuple(pass.activations, pass.output);
      },
      py::arg("net"), py::arg("x"));
  m.def("evaluate", &evaluate, py::arg("net"), py::arg("x"));
  m.def("minimal_depth", &minimal_depth, py::arg("d"), py::arg("s"), py::arg("m"));
  m.def("count_free_parameters", &count_free_parameters, py::arg("net"));
  m.def("free_parameter_formula", &free_parameter_formula, py::arg("s"), py::arg("d"), py::arg("J"));

  m.def(
      "fit_ridge",
      [](const std::string& target, int d, int m, std::uint64_t seed, const std::map<std::string, double>& params) {
        return fit_ridge(make_target(target, d, params), d, m, seed);
      },
      py::arg("target"), py::arg("d"), py::arg("m"), py::arg("seed"),
      py::arg("params") = std::map<std::string, double>{});

  m.def(
      "rate_study",
      [](const std::string& target, int d, int s, const std::vector<int>& depths, std::uint64_t seed,
         int samples, int threads, const std::map<std::string, double>& params) {
        RateStudyOptions opts;
        opts.samples = samples;
        opts.threads = threads;
        std::vector<ErrorReport> rows;
        {
          py::gil_scoped_release release;
          rows = rate_study(make_target(target, d, params), d, s, depths, seed, opts);
        }
        py::list out;
        for (const auto& r : rows) out.append(report_dict(r));
        return out;
      },
      py::arg("target"), py::arg("d"), py::arg("s"), py::arg("depths"), py::arg("seed"),
      py::arg("samples") = 4096, py::arg("threads") = 1,
      py::arg("params") = std::map<std::string, double>{});
}
