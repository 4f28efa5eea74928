#include "systemflow/graph.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "systemflow/error.hpp"

namespace systemflow {

bool ProcessNode::operator==(const ProcessNode& o) const {
  bool same_classifier = classifier == o.classifier ||
                         (classifier && o.classifier && *classifier == *o.classifier);
  return same_classifier && id == o.id && complexity == o.complexity &&
         energy_per_op == o.energy_per_op && output_size == o.output_size &&
         reduction_target == o.reduction_target && merge == o.merge &&
         ops_factor == o.ops_factor && efficiency_divisor == o.efficiency_divisor &&
         energy_scale == o.energy_scale && constant_power == o.constant_power &&
         device_power == o.device_power && power_at_reference == o.power_at_reference;
}

const std::string& node_id(const Node& n) {
  return std::visit([](const auto& v) -> const std::string& { return v.id; }, n);
}

std::optional<std::size_t> PipelineGraph::node_index(const std::string& id) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (node_id(nodes[i]) == id) return i;
  return std::nullopt;
}

std::optional<std::size_t> PipelineGraph::link_index(const std::string& id) const {
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].id == id) return i;
  return std::nullopt;
}

namespace {
template <class T, class G>
auto& find_kind(G& graph, const std::string& id, const char* kind) {
  auto idx = graph.node_index(id);
  if (!idx) throw UnknownIdError("no node '" + id + "'");
  auto* p = std::get_if<T>(&graph.nodes[*idx]);
  if (!p) throw UnknownIdError("node '" + id + "' is not a " + kind + " node");
  return *p;
}
}  // namespace

const SensorNode& PipelineGraph::sensor(const std::string& id) const {
  return find_kind<SensorNode>(*this, id, "sensor");
}
SensorNode& PipelineGraph::sensor(const std::string& id) {
  return find_kind<SensorNode>(*this, id, "sensor");
}
const ProcessNode& PipelineGraph::process(const std::string& id) const {
  return find_kind<ProcessNode>(*this, id, "process");
}
ProcessNode& PipelineGraph::process(const std::string& id) {
  return find_kind<ProcessNode>(*this, id, "process");
}

std::vector<std::size_t> PipelineGraph::incoming_links(const std::string& id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].target == id) out.push_back(i);
  return out;
}

std::vector<std::size_t> PipelineGraph::outgoing_links(const std::string& id) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < links.size(); ++i)
    if (links[i].source == id) out.push_back(i);
  return out;
}

std::string violation_kind_name(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::duplicate_id: return "duplicate_id";
    case Violation::Kind::dangling_reference: return "dangling_reference";
    case Violation::Kind::cycle: return "cycle";
    case Violation::Kind::missing_output: return "missing_output";
    case Violation::Kind::multiple_outputs: return "multiple_outputs";
    case Violation::Kind::orphan: return "orphan";
    case Violation::Kind::missing_predecessor: return "missing_predecessor";
    case Violation::Kind::sensor_with_predecessor: return "sensor_with_predecessor";
    case Violation::Kind::output_with_successor: return "output_with_successor";
    case Violation::Kind::classifier_without_reduction: return "classifier_without_reduction";
    case Violation::Kind::reduction_without_classifier: return "reduction_without_classifier";
    case Violation::Kind::rate_mismatch: return "rate_mismatch";
    case Violation::Kind::invalid_parameter: return "invalid_parameter";
    case Violation::Kind::unknown_role: return "unknown_role";
  }
  return "?";
}

bool ValidationReport::has(Violation::Kind k) const {
  return std::any_of(violations.begin(), violations.end(),
                     [k](const Violation& v) { return v.kind == k; });
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  for (const auto& v : violations)
    os << violation_kind_name(v.kind) << " [" << v.subject << "]: " << v.message << "\n";
  for (const auto& w : warnings) os << "warning: " << w << "\n";
  return os.str();
}

namespace {

// Kahn ordering restricted to links whose endpoints exist. Returns the order
// and whether every node was placed.
std::pair<std::vector<std::size_t>, bool> kahn(const PipelineGraph& g) {
  const std::size_t n = g.nodes.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) index.emplace(node_id(g.nodes[i]), i);
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<std::size_t> indeg(n, 0);
  for (const auto& l : g.links) {
    auto s = index.find(l.source), t = index.find(l.target);
    if (s == index.end() || t == index.end()) continue;
    succ[s->second].push_back(t->second);
    ++indeg[t->second];
  }
  std::set<std::pair<std::string, std::size_t>> ready;
  for (std::size_t i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.emplace(node_id(g.nodes[i]), i);
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto [id, i] = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(i);
    for (std::size_t j : succ[i])
      if (--indeg[j] == 0) ready.emplace(node_id(g.nodes[j]), j);
  }
  return {order, order.size() == n};
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0; }

}  // namespace

std::vector<std::size_t> topological_order(const PipelineGraph& graph) {
  auto [order, complete] = kahn(graph);
  if (!complete) throw ModelError("graph contains a cycle");
  return order;
}

std::vector<StructuralFlow> structural_flows(const PipelineGraph& graph) {
  auto order = topological_order(graph);
  std::vector<StructuralFlow> out(graph.nodes.size());
  for (std::size_t i : order) {
    const Node& node = graph.nodes[i];
    StructuralFlow& f = out[i];
    if (auto* s = std::get_if<SensorNode>(&node)) {
      f.rate_in = f.rate_out = s->sample_rate;
      f.size_in = f.size_out = s->effective_size();
      continue;
    }
    MergeMode merge = std::holds_alternative<ProcessNode>(node)
                          ? std::get<ProcessNode>(node).merge
                          : std::get<OutputNode>(node).merge;
    double rate_sum = 0, rate_max = 0, size_sum = 0, bits = 0;
    for (std::size_t li : graph.incoming_links(node_id(node))) {
      auto src = graph.node_index(graph.links[li].source);
      if (!src) continue;
      const auto& p = out[*src];
      rate_sum += p.rate_out;
      rate_max = std::max(rate_max, p.rate_out);
      size_sum += p.size_out;
      bits += p.rate_out * p.size_out;
    }
    if (merge == MergeMode::event_building) {
      f.rate_in = rate_max;
      f.size_in = size_sum;
    } else {
      f.rate_in = rate_sum;
      f.size_in = rate_sum > 0 ? bits / rate_sum : 0;
    }
    f.rate_out = f.rate_in;
    f.size_out = f.size_in;
    if (auto* p = std::get_if<ProcessNode>(&node)) {
      f.size_out = p->output_size(f.size_in);
      if (p->classifier && p->reduction_target) f.rate_out = f.rate_in / *p->reduction_target;
    }
  }
  return out;
}

ValidationReport validate_graph(const PipelineGraph& graph) {
  ValidationReport r;
  using K = Violation::Kind;
  auto add = [&](K k, std::string subject, std::string msg) {
    r.violations.push_back({k, std::move(subject), std::move(msg)});
  };

  std::set<std::string> ids;
  for (const auto& n : graph.nodes)
    if (!ids.insert(node_id(n)).second) add(K::duplicate_id, node_id(n), "duplicate node id");
  std::set<std::string> link_ids;
  for (const auto& l : graph.links) {
    if (!link_ids.insert(l.id).second) add(K::duplicate_id, l.id, "duplicate link id");
    if (!ids.count(l.source))
      add(K::dangling_reference, l.id, "link source '" + l.source + "' is not a node");
    if (!ids.count(l.target))
      add(K::dangling_reference, l.id, "link target '" + l.target + "' is not a node");
    if (!(l.energy_per_bit >= 0)) add(K::invalid_parameter, l.id, "energy_per_bit must be >= 0");
    if (!positive_finite(l.bandwidth_per_channel))
      add(K::invalid_parameter, l.id, "bandwidth_per_channel must be > 0");
  }

  std::size_t outputs = 0;
  for (const auto& n : graph.nodes) {
    const std::string& id = node_id(n);
    auto in = graph.incoming_links(id);
    auto out = graph.outgoing_links(id);
    if (auto* s = std::get_if<SensorNode>(&n)) {
      if (!in.empty()) add(K::sensor_with_predecessor, id, "sensor has incoming links");
      if (!positive_finite(s->sample_size)) add(K::invalid_parameter, id, "sample_size must be > 0");
      if (!positive_finite(s->sample_rate)) add(K::invalid_parameter, id, "sample_rate must be > 0");
      if (!(s->relevant_fraction >= 0 && s->relevant_fraction <= 1))
        add(K::invalid_parameter, id, "relevant_fraction must lie in [0, 1]");
      if (!(s->size_factor >= 0 && s->size_factor <= 1))
        add(K::invalid_parameter, id, "size_factor must lie in [0, 1]");
      if (!(s->constant_power >= 0)) add(K::invalid_parameter, id, "constant_power must be >= 0");
    } else {
      if (in.empty()) add(K::missing_predecessor, id, "node has no incoming links");
    }
    if (auto* p = std::get_if<ProcessNode>(&n)) {
      if (p->classifier && !p->reduction_target)
        add(K::classifier_without_reduction, id, "classifier present but no reduction_target");
      if (!p->classifier && p->reduction_target)
        add(K::reduction_without_classifier, id, "reduction_target present but no classifier");
      if (p->reduction_target && !(*p->reduction_target > 1))
        add(K::invalid_parameter, id, "reduction_target must exceed 1");
      if (!(p->energy_per_op >= 0)) add(K::invalid_parameter, id, "energy_per_op must be >= 0");
      if (!(p->ops_factor > 0)) add(K::invalid_parameter, id, "ops_factor must be > 0");
      if (!(p->constant_power >= 0)) add(K::invalid_parameter, id, "constant_power must be >= 0");
      if (!p->complexity.nonnegative_nondecreasing(0, 1e300))
        add(K::invalid_parameter, id, "complexity must be nonnegative and nondecreasing");
      if (!p->output_size.nonnegative_nondecreasing(0, 1e300))
        add(K::invalid_parameter, id, "output_size must be nonnegative and nondecreasing");
    }
    if (std::holds_alternative<OutputNode>(n)) {
      ++outputs;
      if (!out.empty()) add(K::output_with_successor, id, "output node has outgoing links");
    }
  }
  if (outputs == 0) add(K::missing_output, "", "graph has no output node");
  if (outputs > 1) add(K::multiple_outputs, "", "graph has " + std::to_string(outputs) + " output nodes");

  auto [order, acyclic] = kahn(graph);
  if (!acyclic) {
    std::set<std::size_t> placed(order.begin(), order.end());
    std::string members;
    for (std::size_t i = 0; i < graph.nodes.size(); ++i)
      if (!placed.count(i)) members += (members.empty() ? "" : ", ") + node_id(graph.nodes[i]);
    add(K::cycle, members, "nodes on or behind a cycle: " + members);
  }

  // Every node must reach the output.
  if (outputs >= 1) {
    std::set<std::string> reaches;
    for (const auto& n : graph.nodes)
      if (std::holds_alternative<OutputNode>(n)) reaches.insert(node_id(n));
    bool grew = true;
    while (grew) {
      grew = false;
      for (const auto& l : graph.links)
        if (reaches.count(l.target) && reaches.insert(l.source).second) grew = true;
    }
    for (const auto& n : graph.nodes)
      if (!reaches.count(node_id(n)))
        add(K::orphan, node_id(n), "node has no path to the output");
  }

  for (const auto* role : {&graph.roles.l1t, &graph.roles.hlt}) {
    if (!role->empty() && !(ids.count(*role) &&
                            std::holds_alternative<ProcessNode>(graph.nodes[*graph.node_index(*role)])))
      add(K::unknown_role, *role, "role names no process node '" + *role + "'");
  }
  if (!graph.roles.pixel_sensor.empty() &&
      !(ids.count(graph.roles.pixel_sensor) &&
        std::holds_alternative<SensorNode>(graph.nodes[*graph.node_index(graph.roles.pixel_sensor)])))
    add(K::unknown_role, graph.roles.pixel_sensor,
        "role names no sensor node '" + graph.roles.pixel_sensor + "'");

  // Event-building merges need synchronised arrivals.
  if (acyclic && r.violations.empty()) {
    auto flows = structural_flows(graph);
    for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
      const Node& n = graph.nodes[i];
      MergeMode merge = MergeMode::stream;
      if (auto* p = std::get_if<ProcessNode>(&n)) merge = p->merge;
      if (auto* o = std::get_if<OutputNode>(&n)) merge = o->merge;
      if (merge != MergeMode::event_building) continue;
      auto in = graph.incoming_links(node_id(n));
      if (in.size() < 2) continue;
      double lo = INFINITY, hi = 0;
      for (std::size_t li : in) {
        double rate = flows[*graph.node_index(graph.links[li].source)].rate_out;
        lo = std::min(lo, rate);
        hi = std::max(hi, rate);
      }
      if (hi - lo > kMergeRateTolerance * hi) {
        std::ostringstream os;
        os << "event-building merge receives unequal rates (" << lo << " Hz to " << hi << " Hz)";
        add(K::rate_mismatch, node_id(n), os.str());
      }
    }
  }
  return r;
}

}  // namespace systemflow
