#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "svrg/harness.hpp"

namespace py = pybind11;
using namespace svrg;

namespace {

py::dict record_to_dict(const TraceRecord& r) {
  py::dict d;
  d["variant"] = r.variant;
  d["seed"] = r.seed;
  d["stage"] = r.stage;
  d["grad_evals"] = r.grad_evals;
  d["effective_passes"] = r.effective_passes;
  d["train_objective"] = r.train_objective;
  d["test_error"] = r.test_error;
  d["batch_size"] = r.batch_size;
  d["error_norm"] = r.error_norm ? py::object(py::float_(*r.error_norm))
                                 : py::object(py::none());
  d["wall_time_ms"] = r.wall_time_ms;
  d["status"] = to_string(r.status);
  return d;
}

ExperimentSpec spec_from_kwargs(const py::dict& kwargs) {
  ExperimentSpec spec;
  for (auto item : kwargs) {
    const auto key = py::cast<std::string>(item.first);
    std::string value;
    if (py::isinstance<py::bool_>(item.second))
      value = py::cast<bool>(item.second) ? "true" : "false";
    else if (py::isinstance<py::list>(item.second) ||
             py::isinstance<py::tuple>(item.second)) {
      bool first = true;
      for (auto elem : item.second) {
        if (!first) value += ',';
        value += py::cast<std::string>(py::str(elem));
        first = false;
      }
    } else {
      value = py::cast<std::string>(py::str(item.second));
    }
    apply_config_line(spec, key, value);
  }
  if (spec.variants.empty()) spec.variants = {"plain"};
  return spec;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "variance-reduced stochastic optimization toolkit";

  py::class_<SparseDataset>(mod, "Dataset")
      .def_property_readonly("n", &SparseDataset::n)
      .def_readonly("dim", &SparseDataset::dim)
      .def("to_libsvm", [](const SparseDataset& d) { return to_libsvm(d); });

  mod.def("generate_synthetic", &generate_synthetic, py::arg("n"), py::arg("dim"),
          py::arg("margin") = 0.0, py::arg("seed") = 42);
  mod.def("load_libsvm", &load_libsvm_file, py::arg("path"));
  mod.def("parse_libsvm", &parse_libsvm_string, py::arg("text"));
  mod.def("save_libsvm", &save_libsvm_file, py::arg("dataset"), py::arg("path"));
  mod.def("preprocess", &preprocess, py::arg("dataset"), py::arg("add_bias") = true,
          py::arg("normalize") = true);
  mod.def("split", [](const SparseDataset& d, double fraction, std::uint64_t seed) {
            auto [train, test] = split(d, fraction, seed);
            return py::make_tuple(std::move(train), std::move(test));
          },
          py::arg("dataset"), py::arg("fraction"), py::arg("seed") = 1);

  mod.def("rho", [](double a, double b, double eta, std::size_t m, double mu) {
            const auto r = rho(a, b, eta, m, mu);
            py::dict d;
            d["value"] = r.value;
            d["ok"] = r.ok;
            d["reason"] = r.reason;
            return d;
          },
          py::arg("a"), py::arg("b"), py::arg("eta"), py::arg("m"), py::arg("mu"));
  mod.def("next_batch_size", [](std::size_t n, double s2, double gamma,
                                double rho_tilde, std::size_t stage) {
            BatchSchedule sched;
            sched.kind = BatchSchedule::Kind::VarianceBased;
            sched.s2 = s2;
            sched.gamma = gamma;
            sched.rho_tilde = rho_tilde;
            return next_batch_size(sched, stage, n);
          },
          py::arg("n"), py::arg("s2"), py::arg("gamma"), py::arg("rho_tilde"),
          py::arg("stage"));
  mod.def("inflection_stage", &inflection_stage, py::arg("s2"), py::arg("gamma"),
          py::arg("n"), py::arg("rho_tilde"));

  mod.def("run_experiment", [](const py::kwargs& kwargs) {
            const ExperimentSpec spec = spec_from_kwargs(kwargs);
            ExperimentResult res;
            {
              py::gil_scoped_release release;
              res = run_experiment(spec);
            }
            py::list records;
            for (const auto& r : res.traces) records.append(record_to_dict(r));
            py::dict out;
            out["records"] = records;
            out["runs_total"] = res.runs_total;
            out["runs_diverged"] = res.runs_diverged;
            return out;
          });
  mod.def("rates_report", [](const py::kwargs& kwargs) {
            return rates_report(spec_from_kwargs(kwargs));
          });
  mod.def("to_csv", [](const py::kwargs& kwargs) {
            const ExperimentSpec spec = spec_from_kwargs(kwargs);
            return to_csv(run_experiment(spec).traces);
          });
}
