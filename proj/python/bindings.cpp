#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>

#include "systemflow/systemflow.hpp"

namespace py = pybind11;
using namespace systemflow;

namespace {

Scenario point(const Model& m, std::optional<double> pileup, std::optional<std::string> reduction,
               std::optional<std::string> variants, std::optional<double> skill) {
  Scenario s = m.scenario;
  if (pileup) s.conditions.pileup = *pileup;
  if (reduction) s.conditions.l1_reduction = parse_ratio(*reduction);
  if (variants) s.variants = VariantConfig::from_label(*variants, s.variants);
  if (skill) s.skill = *skill;
  return s;
}

py::dict row_dict(const SweepRow& r) {
  py::dict d;
  d["pileup"] = r.pileup;
  d["reduction"] = r.reduction;
  d["skill"] = r.skill;
  d["variant"] = r.variant;
  d["score"] = r.score ? py::cast(*r.score) : py::none();
  d["error"] = r.error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_systemflow, m) {
  m.doc() = "Flow-graph model of trigger and data-acquisition pipelines";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", PyExc_RuntimeError);

  py::class_<SystemScore>(m, "SystemScore")
      .def_readonly("tp", &SystemScore::tp)
      .def_readonly("fp", &SystemScore::fp)
      .def_readonly("tn", &SystemScore::tn)
      .def_readonly("fn", &SystemScore::fn)
      .def_readonly("precision", &SystemScore::precision)
      .def_readonly("recall", &SystemScore::recall)
      .def_readonly("f1", &SystemScore::f1)
      .def_readonly("output_rate", &SystemScore::output_rate)
      .def_readonly("total_power", &SystemScore::total_power)
      .def_readonly("productivity", &SystemScore::productivity)
      .def_readonly("degenerate", &SystemScore::degenerate)
      .def_property_readonly("productivity_per_kj", &SystemScore::productivity_per_kj)
      .def("__repr__", [](const SystemScore& s) {
        std::ostringstream os;
        os << "SystemScore(power=" << s.total_power << " W, f1=" << s.f1
           << ", productivity=" << s.productivity_per_kj() << " /kJ)";
        return os.str();
      });

  py::class_<ErrorCosts>(m, "ErrorCosts")
      .def_readonly("e_tp", &ErrorCosts::e_tp)
      .def_readonly("e_tn", &ErrorCosts::e_tn)
      .def_readonly("e_fp", &ErrorCosts::e_fp)
      .def_readonly("e_fn", &ErrorCosts::e_fn)
      .def_readonly("tn_tp_ratio", &ErrorCosts::tn_tp_ratio);

  py::class_<Model>(m, "Model")
      .def_readonly("seed", &Model::seed)
      .def_property_readonly("node_ids",
                             [](const Model& md) {
                               std::vector<std::string> ids;
                               for (const auto& n : md.graph.nodes) ids.push_back(node_id(n));
                               return ids;
                             })
      .def_property_readonly("report_labels", [](const Model& md) {
        std::vector<std::string> labels;
        for (const auto& r : md.config.report) labels.push_back(r.label);
        return labels;
      });

  m.def(
      "load_model",
      [](const std::string& path, std::optional<std::uint64_t> seed) {
        return build_model(load_config(path), seed);
      },
      py::arg("path"), py::arg("seed") = py::none(), "Parse a config file and build its model.");
  m.def(
      "parse_model",
      [](const std::string& text, const std::string& base_dir, std::optional<std::uint64_t> seed) {
        return build_model(parse_config(text, base_dir), seed);
      },
      py::arg("text"), py::arg("base_dir") = ".", py::arg("seed") = py::none());
  m.def(
      "canonical_config",
      [](const std::string& path) { return serialize_config(load_config(path)); }, py::arg("path"),
      "Canonical YAML of a config file, with extends resolved.");

  m.def(
      "run",
      [](const Model& md, std::optional<double> pileup, std::optional<std::string> reduction,
         std::optional<std::string> variants, std::optional<double> skill) {
        py::gil_scoped_release release;
        return evaluate(md.graph, point(md, pileup, reduction, variants, skill)).score;
      },
      py::arg("model"), py::arg("pileup") = py::none(), py::arg("reduction") = py::none(),
      py::arg("variants") = py::none(), py::arg("skill") = py::none(),
      "Score one operating point; unset arguments keep the config's conditions.");
  m.def(
      "evaluate_json",
      [](const Model& md, std::optional<double> pileup, std::optional<std::string> reduction,
         std::optional<std::string> variants, std::optional<double> skill) {
        return evaluation_to_json(evaluate(md.graph, point(md, pileup, reduction, variants, skill)));
      },
      py::arg("model"), py::arg("pileup") = py::none(), py::arg("reduction") = py::none(),
      py::arg("variants") = py::none(), py::arg("skill") = py::none());
  m.def(
      "costs",
      [](const Model& md, std::optional<double> pileup, std::optional<std::string> reduction,
         std::optional<std::string> variants, std::optional<double> skill) {
        return evaluate(md.graph, point(md, pileup, reduction, variants, skill)).costs;
      },
      py::arg("model"), py::arg("pileup") = py::none(), py::arg("reduction") = py::none(),
      py::arg("variants") = py::none(), py::arg("skill") = py::none());
  m.def(
      "sweep",
      [](const Model& md, unsigned jobs) {
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = sweep(md.graph, md.scenario, md.config.sweep, jobs);
        }
        py::list out;
        for (const auto& r : rows) out.append(row_dict(r));
        return out;
      },
      py::arg("model"), py::arg("jobs") = 1, "Evaluate the config's sweep grid.");
  m.def(
      "report",
      [](const Model& md, unsigned jobs) {
        std::vector<SweepRow> rows;
        {
          py::gil_scoped_release release;
          rows = run_report(md, jobs);
        }
        py::list out;
        for (std::size_t i = 0; i < rows.size(); ++i) {
          py::dict d = row_dict(rows[i]);
          d["label"] = md.config.report[i].label;
          out.append(d);
        }
        return out;
      },
      py::arg("model"), py::arg("jobs") = 1, "Evaluate the config's report rows.");

  m.def("parse_ratio", &parse_ratio, py::arg("text"));
  m.def("format_ratio", &format_ratio, py::arg("ratio"));
  m.def(
      "trigger_rate",
      [](double threshold, double width, double plateau, double input_rate, double lambda) {
        TriggerPath p;
        p.name = "path";
        p.curve = {"path", threshold, width, plateau};
        p.input_rate = input_rate;
        return trigger_rate(p, lambda);
      },
      py::arg("threshold"), py::arg("width"), py::arg("plateau"), py::arg("input_rate"),
      py::arg("lam"), "Rate through a turn-on curve for an exponential momentum spectrum.");
  m.def(
      "fit_lambda",
      [](double threshold, double width, double plateau, double input_rate, double empirical_rate) {
        TriggerPath p;
        p.name = "path";
        p.curve = {"path", threshold, width, plateau};
        p.input_rate = input_rate;
        p.empirical_rate = empirical_rate;
        return fit_lambda(p).lambda;
      },
      py::arg("threshold"), py::arg("width"), py::arg("plateau"), py::arg("input_rate"),
      py::arg("empirical_rate"), "Spectrum slope that reproduces the empirical rate.");
  m.def(
      "main",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "systemflow");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool; returns (exit code, stdout, stderr).");
}
