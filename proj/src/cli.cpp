#include "systemflow/cli.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <thread>

#include "systemflow/config.hpp"
#include "systemflow/error.hpp"
#include "systemflow/report.hpp"
#include "systemflow/units.hpp"

namespace systemflow {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::string format = "csv";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  bool strict = false;
  std::optional<double> pileup;
  std::string reduction;
  std::optional<std::string> variants;
  std::optional<double> skill;
};

void add_common(CLI::App* cmd, Options& o, bool format) {
  cmd->add_option("config", o.config, "model config (YAML)")->required();
  cmd->add_option("--seed", o.seed, "override the calibration seed");
  cmd->add_flag("--strict", o.strict, "treat warnings as errors");
  cmd->add_option("--out", o.out, "output file (default: stdout or $SYSTEMFLOW_OUT_DIR)");
  if (format)
    cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

void add_point(CLI::App* cmd, Options& o) {
  cmd->add_option("--pileup", o.pileup, "mean pile-up");
  cmd->add_option("--reduction", o.reduction, "L1T reduction, e.g. 400:1");
  cmd->add_option("--variants", o.variants, "baseline or flags joined by '+'");
  cmd->add_option("--skill", o.skill, "extra L1T skill factor");
}

Scenario point_scenario(const Model& m, const Options& o) {
  Scenario s = m.scenario;
  if (o.pileup) s.conditions.pileup = *o.pileup;
  if (!o.reduction.empty()) {
    try {
      s.conditions.l1_reduction = parse_ratio(o.reduction);
    } catch (const std::exception& e) {
      throw ConfigError("--reduction", e.what());
    }
  }
  if (o.variants) {
    try {
      s.variants = VariantConfig::from_label(*o.variants, s.variants);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("--variants", e.what());
    }
  }
  if (o.skill) s.skill = *o.skill;
  return s;
}

void emit(const std::string& command, const std::string& ext, const std::string& text,
          const Options& o, std::ostream& out, std::ostream& err) {
  std::string path = o.out;
  if (path.empty()) {
    if (const char* dir = std::getenv("SYSTEMFLOW_OUT_DIR"); dir && *dir) {
      std::filesystem::create_directories(dir);
      path = (std::filesystem::path(dir) / (command + "." + ext)).string();
    }
  }
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ModelError("cannot write '" + path + "'");
  f << text;
  err << "wrote " << path << "\n";
}

void check_warnings(const std::vector<std::string>& warnings, const Options& o, std::ostream& err) {
  std::set<std::string> shown;
  for (const auto& w : warnings)
    if (shown.insert(w).second) err << "warning: " << w << "\n";
  if (o.strict && !warnings.empty()) throw ModelError("warnings are errors under --strict");
}

void check_row_warnings(const Model& m, const std::vector<SweepRow>& rows, const Options& o,
                        std::ostream& err) {
  // Warnings depend only on the conditions; collect them once per pile-up.
  std::vector<std::string> warnings;
  std::set<double> seen;
  for (const auto& r : rows) {
    if (!seen.insert(r.pileup).second) continue;
    ExperimentConditions c = m.scenario.conditions;
    c.pileup = r.pileup;
    apply_conditions(m.graph, c, &warnings);
  }
  check_warnings(warnings, o, err);
}

unsigned job_count(const Options& o) {
  if (o.jobs > 0) return o.jobs;
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Model trigger and data-acquisition pipelines as flow graphs"};
  app.require_subcommand(1);
  Options o;

  auto* validate = app.add_subcommand("validate", "check a config and its graph");
  add_common(validate, o, false);
  auto* run = app.add_subcommand("run", "evaluate one operating point");
  add_common(run, o, true);
  add_point(run, o);
  auto* sweep_cmd = app.add_subcommand("sweep", "evaluate the config's sweep grid");
  add_common(sweep_cmd, o, true);
  sweep_cmd->add_option("--jobs", o.jobs, "worker threads (default: all cores)");
  auto* costs = app.add_subcommand("costs", "energy cost of each classification outcome");
  add_common(costs, o, false);
  add_point(costs, o);
  auto* report = app.add_subcommand("report", "evaluate the config's report rows");
  add_common(report, o, true);
  report->add_option("--jobs", o.jobs, "worker threads (default: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    const Model model = build_model(load_config(o.config), o.seed);
    if (validate->parsed()) {
      std::vector<std::string> warnings;
      validate_graph(apply_conditions(model.graph, model.scenario.conditions, &warnings));
      check_warnings(warnings, o, err);
      out << "ok: " << model.graph.nodes.size() << " nodes, " << model.graph.links.size()
          << " links\n";
    } else if (run->parsed()) {
      Scenario s = point_scenario(model, o);
      Evaluation ev = evaluate(model.graph, s);
      check_warnings(ev.warnings, o, err);
      if (o.format == "json") {
        emit("run", "json", evaluation_to_json(ev), o, out, err);
      } else {
        SweepRow r{s.conditions.pileup, s.conditions.l1_reduction, s.skill, s.variants.label(),
                   ev.score, ""};
        emit("run", "csv", rows_to_csv({r}), o, out, err);
      }
    } else if (costs->parsed()) {
      Evaluation ev = evaluate(model.graph, point_scenario(model, o));
      check_warnings(ev.warnings, o, err);
      emit("costs", "json", costs_to_json(ev.costs), o, out, err);
    } else if (sweep_cmd->parsed()) {
      auto rows = sweep(model.graph, model.scenario, model.config.sweep, job_count(o));
      check_row_warnings(model, rows, o, err);
      emit("sweep", o.format, o.format == "json" ? rows_to_json(rows) : rows_to_csv(rows), o, out,
           err);
    } else if (report->parsed()) {
      if (model.config.report.empty()) throw ConfigError("report", "config has no report rows");
      auto rows = run_report(model, job_count(o));
      std::vector<std::string> labels;
      for (const auto& r : model.config.report) labels.push_back(r.label);
      check_row_warnings(model, rows, o, err);
      emit("report", o.format,
           o.format == "json" ? rows_to_json(rows, &labels) : rows_to_csv(rows, &labels), o, out,
           err);
    }
  } catch (const ConfigError& e) {
    for (const auto& issue : e.issues()) err << "config error: " << issue.to_string() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitModelError;
  }
  return kExitOk;
}

}  // namespace systemflow
