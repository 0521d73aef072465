#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cirest/error.hpp"
#include "cirest/estimate.hpp"
#include "cirest/gql.hpp"
#include "cirest/model.hpp"
#include "cirest/montecarlo.hpp"
#include "cirest/simulate.hpp"

namespace py = pybind11;
using namespace cirest;

namespace {

Estimator estimator_from(const std::string& name) {
  const auto e = parse_estimator(name);
  if (!e) throw Error(ErrorCode::InvalidArgument, "unknown estimator '" + name + "'");
  return *e;
}

std::vector<double> path_values(const Path& path) { return {path.values().begin(), path.values().end()}; }

py::dict record_dict(const ReplicationRecord& r) {
  py::dict d;
  d["rep"] = r.rep;
  d["estimator"] = std::string(to_string(r.estimator));
  d["theta"] = r.theta;
  d["z"] = r.z;
  d["status"] = r.ok() ? std::string("ok") : std::string(to_string(*r.status));
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Exact CIR simulation and Gaussian quasi-likelihood estimation";

  static py::exception<Error> cirest_error(m, "CirestError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(cirest_error, e.what());
    }
  });

  py::class_<CirParams>(m, "CirParams")
      .def(py::init<double, double, double>(), py::arg("alpha"), py::arg("beta"), py::arg("gamma"))
      .def_readwrite("alpha", &CirParams::alpha)
      .def_readwrite("beta", &CirParams::beta)
      .def_readwrite("gamma", &CirParams::gamma)
      .def("positive", &CirParams::positive)
      .def("boundary_non_attracting", &CirParams::boundary_non_attracting)
      .def("admissible_for_estimation", &CirParams::admissible_for_estimation)
      .def("__eq__", [](const CirParams& a, const CirParams& b) { return a == b; })
      .def("__repr__", [](const CirParams& p) {
        return "CirParams(alpha=" + std::to_string(p.alpha) + ", beta=" + std::to_string(p.beta) +
               ", gamma=" + std::to_string(p.gamma) + ")";
      });

  py::class_<EstimationResult>(m, "EstimationResult")
      .def_property_readonly("label", [](const EstimationResult& r) { return std::string(to_string(r.label)); })
      .def_readonly("theta_hat", &EstimationResult::theta_hat)
      .def_readonly("admissible", &EstimationResult::admissible)
      .def_readonly("scaled_error", &EstimationResult::scaled_error)
      .def_readonly("studentized", &EstimationResult::studentized);

  m.def("invariant_moment", &invariant_moment, py::arg("params"), py::arg("q"));
  m.def(
      "cond_moments",
      [](const CirParams& p, double x, double h) {
        const CondMoments c = cond_moments(p, x, h);
        return py::make_tuple(c.mu, c.sigma2);
      },
      py::arg("params"), py::arg("x"), py::arg("h"), "Conditional mean and variance of X_{t+h} given X_t = x.");
  m.def(
      "ergodic_average",
      [](const std::vector<double>& xs, double h, const std::function<double(double)>& f) {
        return ergodic_average(Path(xs, h), f);
      },
      py::arg("xs"), py::arg("h"), py::arg("f"));

  m.def(
      "simulate_path",
      [](const CirParams& p, std::size_t n, double h, std::uint64_t seed, std::uint64_t replication) {
        return path_values(simulate_path(p, {n, h}, {seed, replication}));
      },
      py::arg("params"), py::arg("n"), py::arg("h"), py::arg("seed"), py::arg("replication") = 0,
      "Stationary start followed by n exact transitions; returns n + 1 values.");

  m.def(
      "gqlf", [](const CirParams& p, const std::vector<double>& xs, double h) { return gqlf(p, Path(xs, h)); },
      py::arg("params"), py::arg("xs"), py::arg("h"));
  m.def(
      "gqlf_gradient",
      [](const CirParams& p, const std::vector<double>& xs, double h) { return gqlf_gradient(p, Path(xs, h)); },
      py::arg("params"), py::arg("xs"), py::arg("h"));
  m.def("info_matrix", [](const CirParams& p) { return info_matrix(p).entries; }, py::arg("params"));
  m.def("info_matrix_inverse", &info_matrix_inverse, py::arg("params"));
  m.def("info_sqrt", &info_sqrt, py::arg("params"));

  m.def(
      "estimate",
      [](const std::string& estimator, const std::vector<double>& xs, double h, std::optional<CirParams> truth) {
        const Path path(xs, h);
        EstimationResult r = estimate(estimator_from(estimator), path);
        if (truth) r = studentize(r, *truth, path.scheme());
        return r;
      },
      py::arg("estimator"), py::arg("xs"), py::arg("h"), py::arg("truth") = py::none());

  m.def("asymptotic_prediction",
        [](const CirParams& truth, std::size_t n, double h) { return asymptotic_prediction(truth, {n, h}); },
        py::arg("truth"), py::arg("n"), py::arg("h"));

  m.def(
      "_run_study",
      [](const CirParams& truth, std::size_t n, double h, std::size_t replications, std::uint64_t seed,
         const std::vector<std::string>& estimators, std::size_t workers) {
        McConfig config;
        config.truth = truth;
        config.scheme = {n, h};
        config.replications = replications;
        config.master_seed = seed;
        config.workers = workers;
        config.estimators.clear();
        for (const auto& name : estimators) config.estimators.push_back(estimator_from(name));
        StudyResult study;
        {
          py::gil_scoped_release release;
          study = run_study(config);
        }
        py::list records;
        for (const auto& r : study.records) records.append(record_dict(r));
        return py::make_tuple(summary_json(study.summary), records);
      },
      py::arg("truth"), py::arg("n"), py::arg("h"), py::arg("replications"), py::arg("seed"), py::arg("estimators"),
      py::arg("workers"));
}
