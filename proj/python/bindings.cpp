// Python bindings. Structured values cross the boundary as JSON text; the
// package __init__ decodes them into plain dicts and lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "json.hpp"
#include "edgemkt/errors.hpp"
#include "edgemkt/forecast.hpp"
#include "edgemkt/online_game.hpp"
#include "edgemkt/pipeline.hpp"
#include "edgemkt/scenario.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

edgemkt::ExperimentConfig parse_config(const std::string& text) {
  if (text.empty()) return edgemkt::experiment_config_from_json(json::object());
  try {
    return edgemkt::experiment_config_from_json(json::parse(text));
  } catch (const json::parse_error& e) {
    throw edgemkt::ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
}

std::string generate(const std::string& config, std::uint64_t seed) {
  const auto cfg = parse_config(config);
  return json(edgemkt::generate_scenario(cfg.scenario, seed)).dump();
}

std::string run(const std::string& config, const std::string& pipeline, std::uint64_t seed, int trials) {
  const auto cfg = parse_config(config);
  const auto spec = edgemkt::pipeline_spec(pipeline);
  std::vector<edgemkt::TrialResult> results;
  for (int t = 0; t < trials; ++t) {
    const std::uint64_t ts = edgemkt::trial_seed(seed, t);
    results.push_back(edgemkt::run_pipeline(edgemkt::generate_scenario(cfg.scenario, ts), spec, cfg, ts).result);
  }
  return json{{"trials", results}, {"summary", edgemkt::summarize(results)}}.dump();
}

std::string sweep_csv(const std::string& config, const std::string& axis, const std::vector<int>& values, int trials,
                      std::uint64_t seed) {
  const auto cfg = parse_config(config);
  return edgemkt::sweep_csv(
      edgemkt::sweep(cfg, edgemkt::sweep_axis(axis), values, trials, edgemkt::pipeline_names(), seed));
}

std::string online(const std::string& config, std::uint64_t seed) {
  const auto cfg = parse_config(config);
  const auto inst = edgemkt::build_online_instance(edgemkt::generate_scenario(cfg.scenario, seed), {});
  const auto res = edgemkt::pg_brd(inst, cfg.brd, seed);
  return json{{"profile", res.profile},
              {"rounds", res.rounds},
              {"converged", res.converged},
              {"evaluations", res.evaluations},
              {"potential", edgemkt::potential(inst, res.profile)},
              {"nash_equilibrium", edgemkt::verify_ne(inst, res.profile, cfg.brd.epsilon).ok}}
      .dump();
}

std::string ordinal(long samples, std::uint64_t seed) {
  const auto r = edgemkt::check_ordinal(samples, seed);
  return json{{"samples", r.samples},
              {"violations", r.violations},
              {"sandwich_checks", r.sandwich_checks},
              {"sandwich_violations", r.sandwich_violations},
              {"exact_potential_violations", r.exact_violations}}
      .dump();
}

}  // namespace

PYBIND11_MODULE(_edgemkt, m) {
  m.doc() = "Edge-service market simulator core";
  py::register_exception<edgemkt::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<edgemkt::InputError>(m, "InputError", PyExc_ValueError);

  m.def("pipeline_names", &edgemkt::pipeline_names);
  m.def("default_parameter_count", [] { return edgemkt::init_model(edgemkt::LiquidShape{}, 1).parameter_count(); });
  m.def("generate_scenario_json", &generate, py::arg("config"), py::arg("seed"));
  m.def("run_json", &run, py::arg("config"), py::arg("pipeline"), py::arg("seed"), py::arg("trials"));
  m.def("sweep_csv", &sweep_csv, py::arg("config"), py::arg("axis"), py::arg("values"), py::arg("trials"),
        py::arg("seed"));
  m.def("online_json", &online, py::arg("config"), py::arg("seed"));
  m.def("check_ordinal_json", &ordinal, py::arg("samples"), py::arg("seed"));
}
