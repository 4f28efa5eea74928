#include "systemflow/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "systemflow/error.hpp"

namespace systemflow {

std::string VariantConfig::label() const {
  std::string out;
  auto add = [&](bool on, const char* name) {
    if (!on) return;
    if (!out.empty()) out += "+";
    out += name;
  };
  add(gpu_hlt.enabled, "gpu_hlt");
  add(l1_tracks.enabled, "l1_tracks");
  add(smart_pixels.enabled, "smart_pixels");
  return out.empty() ? "baseline" : out;
}

VariantConfig VariantConfig::from_label(const std::string& label, const VariantConfig& parameters) {
  VariantConfig v = parameters;
  v.gpu_hlt.enabled = v.l1_tracks.enabled = v.smart_pixels.enabled = false;
  if (label == "baseline" || label.empty()) return v;
  std::stringstream ss(label);
  std::string flag;
  while (std::getline(ss, flag, '+')) {
    if (flag == "gpu_hlt")
      v.gpu_hlt.enabled = true;
    else if (flag == "l1_tracks")
      v.l1_tracks.enabled = true;
    else if (flag == "smart_pixels")
      v.smart_pixels.enabled = true;
    else
      throw std::invalid_argument("unknown variant flag '" + flag +
                                  "' (expected gpu_hlt, l1_tracks, smart_pixels or baseline)");
  }
  return v;
}

namespace {

// Drops the given nodes, then any non-sensor node left without inputs, with their links.
void remove_nodes(PipelineGraph& g, std::set<std::string> doomed,
                  std::vector<std::string>* warnings) {
  while (!doomed.empty()) {
    for (const auto& id : doomed)
      if (warnings) warnings->push_back("node '" + id + "' removed under these conditions");
    std::erase_if(g.nodes, [&](const Node& n) { return doomed.count(node_id(n)) > 0; });
    std::erase_if(g.links, [&](const CommLink& l) {
      return doomed.count(l.source) > 0 || doomed.count(l.target) > 0;
    });
    doomed.clear();
    for (const auto& n : g.nodes) {
      if (std::holds_alternative<SensorNode>(n)) continue;
      if (g.incoming_links(node_id(n)).empty()) doomed.insert(node_id(n));
    }
  }
}

void set_reduction(PipelineGraph& g, const std::string& role, double reduction) {
  if (role.empty()) return;
  auto idx = g.node_index(role);
  if (!idx) return;
  if (auto* p = std::get_if<ProcessNode>(&g.nodes[*idx]))
    if (p->classifier) p->reduction_target = reduction;
}

}  // namespace

PipelineGraph apply_conditions(const PipelineGraph& graph, const ExperimentConditions& c,
                               std::vector<std::string>* warnings) {
  if (!(c.pileup > 0)) throw std::invalid_argument("pile-up must be positive");
  if (!(c.l1_reduction > 1) || !(c.hlt_reduction > 1))
    throw std::invalid_argument("reductions must exceed 1");
  PipelineGraph g = graph;

  std::set<std::string> absent;
  for (const auto& n : g.nodes)
    if (auto* s = std::get_if<SensorNode>(&n); s && c.pileup < s->min_pileup) absent.insert(s->id);
  remove_nodes(g, absent, warnings);

  double relevant = 0;
  if (c.relevance == RelevanceMode::matched) relevant = 1.0 / (c.l1_reduction * c.hlt_reduction);
  if (c.relevance == RelevanceMode::fixed) relevant = c.relevant_fraction;
  for (auto& n : g.nodes) {
    auto* s = std::get_if<SensorNode>(&n);
    if (!s) continue;
    if (warnings && !s->pileup_scaling.in_domain(c.pileup))
      warnings->push_back("sensor '" + s->id + "': pile-up " + std::to_string(c.pileup) +
                          " outside its scaling table; clamped");
    s->pileup_multiplier = s->pileup_scaling(c.pileup);
    if (c.bunch_rate) s->sample_rate = *c.bunch_rate;
    if (c.relevance != RelevanceMode::as_configured) s->relevant_fraction = relevant;
  }
  set_reduction(g, g.roles.l1t, c.l1_reduction);
  set_reduction(g, g.roles.hlt, c.hlt_reduction);
  return g;
}

PipelineGraph apply_era(const PipelineGraph& graph, const TechnologyEra& era) {
  if (!(era.efficiency_factor >= 1)) throw std::invalid_argument("efficiency factor must be >= 1");
  PipelineGraph g = graph;
  for (auto& n : g.nodes)
    if (auto* p = std::get_if<ProcessNode>(&n)) p->efficiency_divisor *= era.efficiency_factor;
  if (era.apply_to_links)
    for (auto& l : g.links) l.efficiency_divisor *= era.efficiency_factor;
  return g;
}

namespace {

ProcessNode& role_process(PipelineGraph& g, const std::string& role, const char* role_name,
                          const char* variant) {
  std::string field = std::string("roles.") + role_name;
  if (role.empty()) throw ConfigError(field, std::string(variant) + " needs the " + role_name + " role");
  auto idx = g.node_index(role);
  auto* p = idx ? std::get_if<ProcessNode>(&g.nodes[*idx]) : nullptr;
  if (!p) throw ConfigError(field, std::string(variant) + ": no process node '" + role + "'");
  return *p;
}

}  // namespace

PipelineGraph apply_variant(const PipelineGraph& graph, const VariantConfig& v) {
  PipelineGraph g = graph;
  if (v.gpu_hlt.enabled) {
    ProcessNode& hlt = role_process(g, g.roles.hlt, "hlt", "gpu_hlt");
    if (!(v.gpu_hlt.throughput_gain > 0))
      throw ConfigError("variants.gpu_hlt.throughput_gain", "must be positive");
    if (!(hlt.device_power > 0))
      throw ConfigError("nodes." + hlt.id + ".device_power",
                        "gpu_hlt needs the installed device power of the HLT node");
    hlt.ops_factor /= 1.0 + v.gpu_hlt.throughput_gain;
    hlt.energy_scale *= v.gpu_hlt.unit_power / hlt.device_power;
  }
  if (v.l1_tracks.enabled) {
    ProcessNode& l1 = role_process(g, g.roles.l1t, "l1t", "l1_tracks");
    if (!l1.classifier) throw ConfigError("nodes." + l1.id, "l1_tracks needs an L1T classifier");
    l1.classifier = std::make_shared<const ClassifierModel>(
        apply_skill(*l1.classifier, v.l1_tracks.skill_factor));
  }
  if (v.smart_pixels.enabled) {
    const std::string& id = g.roles.pixel_sensor;
    if (id.empty()) throw ConfigError("roles.pixel_sensor", "smart_pixels needs the pixel_sensor role");
    auto idx = g.node_index(id);
    auto* s = idx ? std::get_if<SensorNode>(&g.nodes[*idx]) : nullptr;
    if (!s) throw ConfigError("roles.pixel_sensor", "smart_pixels: no sensor node '" + id + "'");
    const double r = v.smart_pixels.data_reduction;
    if (!(r >= 0 && r < 1))
      throw ConfigError("variants.smart_pixels.data_reduction", "must lie in [0, 1)");
    s->size_factor *= 1.0 - r;
    s->constant_power += v.smart_pixels.frontend_power();
  }
  return g;
}

PipelineGraph apply_l1_skill(const PipelineGraph& graph, double skill_factor) {
  if (skill_factor == 1.0) return graph;
  PipelineGraph g = graph;
  ProcessNode& l1 = role_process(g, g.roles.l1t, "l1t", "skill");
  if (!l1.classifier) throw ConfigError("nodes." + l1.id, "skill needs an L1T classifier");
  l1.classifier = std::make_shared<const ClassifierModel>(apply_skill(*l1.classifier, skill_factor));
  return g;
}

PipelineGraph calibrate_energy(const PipelineGraph& graph, const ExperimentConditions& conditions) {
  PipelineGraph g = graph;
  const PipelineGraph ref = apply_conditions(graph, conditions.reference());
  auto report = validate_graph(ref);
  if (!report.ok()) throw ModelError("invalid graph at reference conditions:\n" + report.to_string());
  const auto flows = structural_flows(ref);
  for (auto& n : g.nodes) {
    auto* p = std::get_if<ProcessNode>(&n);
    if (!p || !p->power_at_reference) continue;
    auto idx = ref.node_index(p->id);
    if (!idx) throw ModelError("node '" + p->id + "' is absent at reference conditions");
    const auto& f = flows[*idx];
    const double ops_rate = f.rate_in * p->complexity(f.size_in) * p->ops_factor;
    const double target = *p->power_at_reference - p->constant_power;
    if (!(ops_rate > 0) || target < 0)
      throw ModelError("node '" + p->id + "': cannot calibrate energy per op (ops rate " +
                       std::to_string(ops_rate) + " op/s)");
    p->energy_per_op = target * p->efficiency_divisor / (ops_rate * p->energy_scale);
  }
  return g;
}

Evaluation evaluate(const PipelineGraph& base, const Scenario& s) {
  Evaluation ev;
  PipelineGraph g = apply_conditions(base, s.conditions, &ev.warnings);
  g = apply_era(g, s.era);
  g = apply_variant(g, s.variants);
  g = apply_l1_skill(g, s.skill);
  ev.flows = propagate(g);
  ev.score = score_system(g, ev.flows);
  ev.costs = error_costs(g, build_ledger(g, ev.flows), ev.flows);
  ev.graph = std::move(g);
  return ev;
}

std::vector<SweepRow> sweep(const PipelineGraph& base, const Scenario& scenario,
                            const SweepAxes& axes, unsigned jobs) {
  auto or_default = [](std::vector<double> v, double d) {
    if (v.empty()) v.push_back(d);
    return v;
  };
  const auto pileups = or_default(axes.pileup, scenario.conditions.pileup);
  const auto reductions = or_default(axes.reduction, scenario.conditions.l1_reduction);
  const auto skills = or_default(axes.skill, scenario.skill);
  auto variants = axes.variants;
  if (variants.empty()) variants.push_back(scenario.variants.label());

  std::vector<SweepRow> rows;
  for (double pu : pileups)
    for (double red : reductions)
      for (double sk : skills)
        for (const auto& var : variants) {
          SweepRow r;
          r.pileup = pu;
          r.reduction = red;
          r.skill = sk;
          r.variant = var;
          rows.push_back(r);
        }

  auto run = [&](SweepRow& r) {
    try {
      Scenario s = scenario;
      s.conditions.pileup = r.pileup;
      s.conditions.l1_reduction = r.reduction;
      s.skill = r.skill;
      s.variants = VariantConfig::from_label(r.variant, scenario.variants);
      r.score = evaluate(base, s).score;
    } catch (const std::exception& e) {
      r.error = e.what();
    }
  };

  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(rows.size())));
  if (jobs == 1) {
    for (auto& r : rows) run(r);
    return rows;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < jobs; ++t)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < rows.size(); i = next++) run(rows[i]);
    });
  for (auto& th : pool) th.join();
  return rows;
}

}  // namespace systemflow
