// Thin Python layer over the harness. JSON crosses the boundary as text.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cocom/geometry.hpp"
#include "cocom/harness.hpp"
#include "cocom/optimistic.hpp"

namespace py = pybind11;
using namespace cocom;

namespace {

ExperimentConfig parse(const std::string& text) {
  ExperimentConfig cfg = ExperimentConfig::from_json(nlohmann::json::parse(text));
  cfg.validate();
  return cfg;
}

py::dict seed_dict(const ExperimentConfig& cfg, const SeedResult& r, bool with_csv) {
  py::dict d;
  d["summary"] = r.summary_json().dump();
  d["bounds"] = r.bounds.to_json().dump();
  if (with_csv) d["csv"] = csv_string(r);
  py::list checks;
  if (r.ok)
    for (const Check& c : verify_seed(cfg, r)) checks.append(py::make_tuple(c.name, c.ok, c.lhs, c.rhs));
  d["checks"] = checks;
  return d;
}

}  // namespace

PYBIND11_MODULE(_cocom, m) {
  m.doc() = "online learning with memory and long-term constraints";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ContractViolation>(m, "ContractViolation", PyExc_RuntimeError);

  m.def("normalize_config", [](const std::string& text) { return parse(text).to_json().dump(); },
        "Parse and validate a config, returning it with every default filled in.");

  m.def(
      "run_seed",
      [](const std::string& text, std::uint64_t seed, bool with_csv) {
        ExperimentConfig cfg = parse(text);
        SeedResult r;
        {
          py::gil_scoped_release release;
          r = run_seed(cfg, seed);
        }
        return seed_dict(cfg, r, with_csv);
      },
      py::arg("config"), py::arg("seed"), py::arg("with_csv") = true);

  m.def(
      "run_experiment",
      [](const std::string& text, const std::string& out_dir, int parallel) {
        ExperimentConfig cfg = parse(text);
        ExperimentSummary s;
        {
          py::gil_scoped_release release;
          s = run_experiment(cfg, out_dir, parallel);
        }
        return s.json.dump();
      },
      py::arg("config"), py::arg("out_dir") = "", py::arg("parallel") = 1);

  m.def("huber", &huber);
  m.def(
      "project_box",
      [](const Vec& lo, const Vec& hi, const Vec& p) { return project(FeasibleSet::box(lo, hi), p); });
  m.def(
      "project_ball",
      [](const Vec& c, double r, const Vec& p) { return project(FeasibleSet::ball(c, r), p); });
  m.def(
      "ftrl_argmin_box",
      [](const Vec& lo, const Vec& hi, const Vec& g, double mu) {
        FeasibleSet set = FeasibleSet::box(lo, hi);
        return ftrl_argmin(set, g, mu, Regularizer::for_set(set));
      });
  m.attr("csv_header") = kCsvHeader;
}
