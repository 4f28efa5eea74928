#include "systemflow/propagate.hpp"

#include <cmath>

#include "systemflow/error.hpp"
#include "systemflow/scenario.hpp"

namespace systemflow {

const NodeFlow& FlowAssignment::node(const std::string& id) const {
  for (const auto& n : nodes)
    if (n.id == id) return n;
  throw UnknownIdError("no node '" + id + "' in flow assignment");
}

const EdgeFlow& FlowAssignment::edge(const std::string& id) const {
  for (const auto& e : edges)
    if (e.id == id) return e;
  throw UnknownIdError("no link '" + id + "' in flow assignment");
}

namespace {

MessageFlow merge_flows(const std::vector<const MessageFlow*>& in, MergeMode mode) {
  if (in.size() == 1) return *in.front();
  MessageFlow m;
  if (in.empty()) return m;
  double rate_sum = 0, true_sum = 0, false_sum = 0, bits = 0, size_sum = 0, rate_max = 0;
  for (const MessageFlow* f : in) {
    rate_sum += f->rate;
    true_sum += f->n_true;
    false_sum += f->n_false;
    bits += f->rate * f->size;
    size_sum += f->size;
    rate_max = std::max(rate_max, f->rate);
  }
  if (mode == MergeMode::stream) {
    m.rate = rate_sum;
    m.size = rate_sum > 0 ? bits / rate_sum : 0;
    m.n_true = true_sum;
    m.n_false = false_sum;
  } else {
    // One fragment per event from each source: the event is relevant in the
    // averaged proportion of its fragments.
    const double frac = rate_sum > 0 ? true_sum / rate_sum : 0;
    m.rate = rate_max;
    m.size = size_sum;
    m.n_true = rate_max * frac;
    m.n_false = rate_max * (1.0 - frac);
  }
  return m;
}

}  // namespace

FlowAssignment propagate(const PipelineGraph& graph) {
  auto report = validate_graph(graph);
  if (!report.ok()) throw ModelError("invalid graph:\n" + report.to_string());
  const auto order = topological_order(graph);

  FlowAssignment fa;
  fa.nodes.resize(graph.nodes.size());
  fa.edges.resize(graph.links.size());
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) fa.nodes[i].id = node_id(graph.nodes[i]);
  for (std::size_t i = 0; i < graph.links.size(); ++i) fa.edges[i].id = graph.links[i].id;

  for (std::size_t i : order) {
    const Node& node = graph.nodes[i];
    NodeFlow& nf = fa.nodes[i];
    const auto in_links = graph.incoming_links(nf.id);

    if (auto* s = std::get_if<SensorNode>(&node)) {
      nf.incoming.rate = s->sample_rate;
      nf.incoming.size = s->effective_size();
      nf.incoming.n_true = s->sample_rate * s->relevant_fraction;
      nf.incoming.n_false = s->sample_rate * (1.0 - s->relevant_fraction);
      nf.outgoing = nf.incoming;
      nf.power = s->constant_power;
    } else {
      std::vector<const MessageFlow*> in;
      for (std::size_t li : in_links) in.push_back(&fa.edges[li].flow);
      if (auto* p = std::get_if<ProcessNode>(&node)) {
        nf.incoming = merge_flows(in, p->merge);
        nf.outgoing = nf.incoming;
        nf.outgoing.size = p->output_size(nf.incoming.size);
        if (p->classifier) {
          if (nf.incoming.rate > 0) {
            ConfusionMatrix cm;
            try {
              cm = operating_point(*p->classifier, nf.incoming, *p->reduction_target);
            } catch (const OperatingPointError& e) {
              throw e.with_node(nf.id);
            }
            nf.confusion = cm;
            nf.outgoing.n_true = cm.tp;
            nf.outgoing.n_false = cm.fp;
            nf.outgoing.rate = nf.incoming.rate / *p->reduction_target;
          } else {
            nf.confusion = ConfusionMatrix{};
          }
        }
        nf.power = nf.incoming.rate * p->complexity(nf.incoming.size) * p->ops_factor *
                       p->effective_energy_per_op() +
                   p->constant_power;
      } else {
        const auto& o = std::get<OutputNode>(node);
        nf.incoming = merge_flows(in, o.merge);
        nf.outgoing = nf.incoming;
        fa.output_id = nf.id;
        fa.storage_rate = 0;
        for (const MessageFlow* f : in) fa.storage_rate += f->rate * f->size;
        fa.output_tp = nf.incoming.n_true;
        fa.output_fp = nf.incoming.n_false;
      }
    }
    for (std::size_t li : graph.outgoing_links(nf.id)) {
      EdgeFlow& e = fa.edges[li];
      e.flow = nf.outgoing;
      e.power = e.flow.rate * e.flow.size * graph.links[li].effective_energy_per_bit();
    }
  }
  return fa;
}

FlowAssignment propagate(const PipelineGraph& graph, const ExperimentConditions& conditions) {
  return propagate(apply_conditions(graph, conditions));
}

double node_power(const PipelineGraph& graph, const FlowAssignment& flows, const std::string& id) {
  if (!graph.node_index(id)) throw UnknownIdError("no node '" + id + "'");
  return flows.node(id).power;
}

double link_power(const PipelineGraph& graph, const FlowAssignment& flows, const std::string& id) {
  if (!graph.link_index(id)) throw UnknownIdError("no link '" + id + "'");
  return flows.edge(id).power;
}

double total_power(const PipelineGraph& graph, const FlowAssignment& flows) {
  (void)graph;
  double sum = 0;
  for (const auto& n : flows.nodes) sum += n.power;
  for (const auto& e : flows.edges) sum += e.power;
  return sum;
}

long long required_channels(const CommLink& link, const MessageFlow& flow) {
  const double demand = flow.rate * flow.size / link.bandwidth_per_channel;
  if (!(demand > 0)) return 0;
  const double nearest = std::round(demand);
  if (std::abs(demand - nearest) <= 1e-12 * nearest) return static_cast<long long>(nearest);
  return static_cast<long long>(std::ceil(demand));
}

}  // namespace systemflow
