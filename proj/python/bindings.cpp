#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "gascert/cli.hpp"
#include "gascert/spectral.hpp"

namespace py = pybind11;
using namespace gascert;

namespace {

// Returns (report JSON text, exit code).
std::pair<std::string, int> run(const std::string& config) {
  const RunConfig cfg = config_from_json(Json::parse(config));
  CommandResult res;
  {
    py::gil_scoped_release release;
    res = run_command(cfg);
  }
  return {res.report.dump(2), res.exit_code};
}

double evaluate(const std::string& text, int k, const std::vector<double>& point,
                const std::map<std::string, double>& params) {
  NameSet names;
  ParamMap pm;
  for (const auto& [name, v] : params) {
    names.insert(name);
    pm[name] = v;
  }
  return parse(text, k, names).eval(point, pm);
}

std::vector<double> gradient_at_fixed_point(const std::string& map, const std::map<std::string, double>& params,
                                            int expansion) {
  ParamMap pm(params.begin(), params.end());
  NormalizedMap nm = normalize(catalogue_entry(map, pm));
  if (expansion > 0) nm = expand(nm, expansion);
  return gradient(nm).a;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "gascert native core";
  static py::exception<Error> base(m, "GascertError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(base, error_envelope(e).dump().c_str());
    } catch (const Json::exception& e) {
      py::set_error(base, Json{{"error", e.what()}, {"hint", "config must be valid JSON"}}.dump().c_str());
    }
  });

  m.def("run", &run, py::arg("config"), "Run a command from a JSON config; returns (report_json, exit_code).");
  m.def("evaluate", &evaluate, py::arg("expr"), py::arg("k"), py::arg("point"),
        py::arg("params") = std::map<std::string, double>{});
  m.def("gradient", &gradient_at_fixed_point, py::arg("map"), py::arg("params") = std::map<std::string, double>{},
        py::arg("expansion") = 0);
  m.def("catalogue_names", &catalogue_names);
}
