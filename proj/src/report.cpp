#include "systemflow/report.hpp"

#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <sstream>

#include "systemflow/units.hpp"

namespace systemflow {

using nlohmann::json;

const std::vector<std::string>& sweep_columns() {
  static const std::vector<std::string> cols = {
      "pileup", "reduction_ratio", "skill", "variant", "power_w", "precision", "recall",
      "f1", "output_rate_hz", "productivity_per_kj", "error"};
  return cols;
}

namespace {

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

std::string rows_to_csv(const std::vector<SweepRow>& rows, const std::vector<std::string>* labels) {
  std::ostringstream os;
  if (labels) os << "label,";
  const auto& cols = sweep_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << "\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    if (labels) os << csv_cell(labels->at(i)) << ",";
    os << format_number(r.pileup) << "," << format_ratio(r.reduction) << ","
       << format_number(r.skill) << "," << csv_cell(r.variant) << ",";
    if (r.score) {
      const SystemScore& s = *r.score;
      os << format_number(s.total_power) << "," << format_number(s.precision) << ","
         << format_number(s.recall) << "," << format_number(s.f1) << ","
         << format_number(s.output_rate) << "," << format_number(s.productivity_per_kj()) << ",";
    } else {
      os << ",,,,,,";
    }
    os << csv_cell(r.error) << "\n";
  }
  return os.str();
}

std::string rows_to_json(const std::vector<SweepRow>& rows, const std::vector<std::string>* labels) {
  json out = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& r = rows[i];
    json j;
    if (labels) j["label"] = labels->at(i);
    j["pileup"] = r.pileup;
    j["reduction_ratio"] = format_ratio(r.reduction);
    j["reduction"] = r.reduction;
    j["skill"] = r.skill;
    j["variant"] = r.variant;
    if (r.score) {
      const SystemScore& s = *r.score;
      j["power_w"] = number_or_null(s.total_power);
      j["precision"] = number_or_null(s.precision);
      j["recall"] = number_or_null(s.recall);
      j["f1"] = number_or_null(s.f1);
      j["output_rate_hz"] = number_or_null(s.output_rate);
      j["productivity_per_kj"] = number_or_null(s.productivity_per_kj());
      j["degenerate"] = s.degenerate;
    }
    j["error"] = r.error;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string evaluation_to_json(const Evaluation& ev) {
  json edges = json::array();
  for (const auto& e : ev.flows.edges)
    edges.push_back({{"edge", e.id},
                     {"rate_hz", e.flow.rate},
                     {"size_bits", e.flow.size},
                     {"n_true_hz", e.flow.n_true},
                     {"n_false_hz", e.flow.n_false},
                     {"power_w", e.power}});
  json nodes = json::array();
  for (const auto& n : ev.flows.nodes) {
    json j = {{"node", n.id},
              {"power_w", n.power},
              {"rate_in_hz", n.incoming.rate},
              {"rate_out_hz", n.outgoing.rate},
              {"size_out_bits", n.outgoing.size}};
    if (n.confusion)
      j["confusion"] = {{"tp", n.confusion->tp},
                        {"fp", n.confusion->fp},
                        {"tn", n.confusion->tn},
                        {"fn", n.confusion->fn},
                        {"threshold", n.confusion->threshold}};
    nodes.push_back(std::move(j));
  }
  const SystemScore& s = ev.score;
  json out = {{"edges", edges},
              {"nodes", nodes},
              {"output", ev.flows.output_id},
              {"storage_rate_bps", ev.flows.storage_rate},
              {"score",
               {{"tp", s.tp},
                {"fp", s.fp},
                {"tn", s.tn},
                {"fn", s.fn},
                {"precision", s.precision},
                {"recall", s.recall},
                {"f1", s.f1},
                {"output_rate_hz", s.output_rate},
                {"power_w", s.total_power},
                {"productivity_per_kj", s.productivity_per_kj()},
                {"degenerate", s.degenerate}}},
              {"warnings", ev.warnings}};
  return out.dump(2) + "\n";
}

std::string costs_to_json(const ErrorCosts& c) {
  json out = {{"e_tp_j", c.e_tp}, {"e_tn_j", c.e_tn}, {"e_fp_j", c.e_fp}};
  out["e_fn_j"] = c.e_fn ? json(*c.e_fn) : json(nullptr);
  out["tn_tp_ratio"] = c.tn_tp_ratio ? json(*c.tn_tp_ratio) : json(nullptr);
  return out.dump(2) + "\n";
}

std::vector<SweepRow> run_report(const Model& model, unsigned jobs) {
  std::vector<SweepRow> rows;
  for (const auto& r : model.config.report) {
    SweepAxes axes;
    axes.pileup = {r.pileup};
    axes.reduction = {r.reduction};
    axes.skill = {r.skill};
    axes.variants = {r.variants};
    auto one = sweep(model.graph, model.scenario, axes, jobs);
    rows.push_back(one.front());
  }
  return rows;
}

}  // namespace systemflow
