#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "wfshap/analysis.hpp"
#include "wfshap/attribution.hpp"
#include "wfshap/game_io.hpp"
#include "wfshap/manifest.hpp"
#include "wfshap/simulator.hpp"

namespace py = pybind11;
using namespace wfshap;

namespace {

GameTable dense_game(std::vector<std::string> components, std::vector<double> values,
                     std::optional<std::size_t> task_count, std::string label) {
  return GameTable::from_dense(ComponentSet(std::move(components)), std::move(values), task_count, std::move(label));
}

AttributionResult permutation(const GameTable& game, std::size_t samples, std::uint64_t seed, bool antithetic) {
  EstimatorConfig cfg;
  cfg.method = Method::kPermutationMc;
  cfg.samples = samples;
  cfg.seed = seed;
  cfg.antithetic = antithetic;
  return shapley_permutation(game, cfg);
}

std::map<std::string, std::string> optimal_configuration(const std::filesystem::path& table_path) {
  std::map<std::string, std::string> out;
  for (const auto& choice : discover_optimal_configuration(read_attribution_table_file(table_path)).assignment) {
    out[choice.component.label] = choice.candidate;
  }
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Shapley attribution for multi-component workflows";
  m.attr("__version__") = std::string(kToolVersion);

  static py::exception<Error> error(m, "Error", PyExc_RuntimeError);
  static py::exception<ValidationError> validation(m, "ValidationError", PyExc_ValueError);
  static py::exception<IncompleteGameError> incomplete(m, "IncompleteGameError", validation.ptr());
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const IncompleteGameError& e) {
      PyErr_SetString(incomplete.ptr(), e.what());
    } catch (const ValidationError& e) {
      PyErr_SetString(validation.ptr(), e.what());
    } catch (const Error& e) {
      PyErr_SetString(error.ptr(), e.what());
    }
  });

  py::enum_<Method>(m, "Method")
      .value("EXACT", Method::kExact)
      .value("PERMUTATION_MC", Method::kPermutationMc)
      .value("REPORTED", Method::kReported);

  py::class_<GameTable>(m, "GameTable")
      .def(py::init(&dense_game), py::arg("components"), py::arg("values"), py::arg("task_count") = std::nullopt,
           py::arg("label") = "", "Complete table from 2^n values indexed by coalition mask.")
      .def_property_readonly("components", [](const GameTable& g) { return g.components().labels(); })
      .def_property_readonly("label", &GameTable::label)
      .def_property_readonly("task_count", &GameTable::task_count)
      .def("__len__", &GameTable::size)
      .def("value", py::overload_cast<Mask>(&GameTable::value, py::const_), py::arg("mask"))
      .def("is_complete", &GameTable::is_complete)
      .def("missing_masks", &GameTable::missing_masks)
      .def("values", [](const GameTable& g) {
        g.require_complete();
        return std::vector<double>(g.dense().begin(), g.dense().end());
      });

  py::class_<AttributionResult>(m, "AttributionResult")
      .def_readonly("labels", &AttributionResult::labels)
      .def_readonly("phi", &AttributionResult::phi)
      .def_readonly("method", &AttributionResult::method)
      .def_readonly("samples", &AttributionResult::samples)
      .def_readonly("std_error", &AttributionResult::std_error)
      .def_readonly("empty_value", &AttributionResult::empty_value)
      .def_readonly("grand_value", &AttributionResult::grand_value)
      .def_readonly("seed", &AttributionResult::seed)
      .def("phi_sum", &AttributionResult::phi_sum)
      .def("efficiency_residual", &AttributionResult::efficiency_residual)
      .def("as_dict", [](const AttributionResult& r) {
        std::map<std::string, double> out;
        for (std::size_t i = 0; i < r.phi.size(); ++i) out[r.labels[i]] = r.phi[i];
        return out;
      });

  py::class_<SynergyMatrix>(m, "SynergyMatrix")
      .def_readonly("labels", &SynergyMatrix::labels)
      .def("__len__", &SynergyMatrix::size)
      .def("at", &SynergyMatrix::at, py::arg("i"), py::arg("j"))
      .def("rows", [](const SynergyMatrix& s) {
        std::vector<std::vector<double>> rows(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
          for (std::size_t j = 0; j < s.size(); ++j) rows[i].push_back(s.at(i, j));
        }
        return rows;
      });

  py::class_<SyntheticGameSpec>(m, "SyntheticGameSpec")
      .def_static("additive", &SyntheticGameSpec::additive, py::arg("base"), py::arg("weights"))
      .def_readonly("n", &SyntheticGameSpec::n)
      .def_readwrite("base", &SyntheticGameSpec::base)
      .def_readwrite("clamp", &SyntheticGameSpec::clamp)
      .def("gamma", &SyntheticGameSpec::gamma)
      .def("set_gamma", &SyntheticGameSpec::set_gamma)
      .def("to_json", &format_spec_json)
      .def_static("from_json", [](const std::string& text) { return parse_spec_json(text); });

  m.def(
      "synthesize_game",
      [](const SyntheticGameSpec& spec) {
        auto game = synthesize_game(spec);
        return py::make_tuple(std::move(game.table), game.analytic_phi);
      },
      py::arg("spec"), "Returns (table, analytic phi or None when clamping applied).");

  m.def("shapley_exact", &shapley_exact, py::arg("game"));
  m.def("shapley_permutation", &permutation, py::arg("game"), py::arg("samples"), py::arg("seed"),
        py::arg("antithetic") = true);
  m.def("synergy_matrix", &synergy_matrix, py::arg("game"));
  m.def("parse_game_json", &parse_game_json, py::arg("text"));
  m.def("format_game_json", &format_game_json, py::arg("game"));
  m.def("read_game_file", &read_game_file, py::arg("path"));
  m.def("consistency_rate", &consistency_rate, py::arg("a"), py::arg("b"));
  m.def("optimal_configuration", &optimal_configuration, py::arg("table_path"),
        "Per-component best candidate of a model attribution table file.");
}
