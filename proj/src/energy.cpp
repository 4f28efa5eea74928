#include "systemflow/energy.hpp"

#include <functional>

#include "systemflow/error.hpp"

namespace systemflow {

EnergyLedger build_ledger(const PipelineGraph& graph, const FlowAssignment& flows) {
  const std::size_t nn = graph.nodes.size(), nl = graph.links.size();
  if (flows.nodes.size() != nn || flows.edges.size() != nl)
    throw ModelError("flow assignment does not match the graph");
  EnergyLedger led;
  led.node_energy.assign(nn, 0.0);
  led.arrivals.assign(nn, 0.0);
  led.link_energy.assign(nl, 0.0);
  led.link_weight.assign(nl, 1.0);

  for (std::size_t l = 0; l < nl; ++l)
    led.link_energy[l] = flows.edges[l].flow.size * graph.links[l].effective_energy_per_bit();

  for (std::size_t i = 0; i < nn; ++i) {
    const Node& node = graph.nodes[i];
    const NodeFlow& nf = flows.nodes[i];
    const double n_in = nf.incoming.rate;
    led.arrivals[i] = n_in;
    double own = 0;
    MergeMode merge = MergeMode::event_building;
    if (auto* s = std::get_if<SensorNode>(&node)) {
      own = n_in > 0 ? s->constant_power / n_in : 0.0;
    } else if (auto* p = std::get_if<ProcessNode>(&node)) {
      own = p->complexity(nf.incoming.size) * p->ops_factor * p->effective_energy_per_op();
      if (n_in > 0) own += p->constant_power / n_in;
      merge = p->merge;
    } else {
      merge = std::get<OutputNode>(node).merge;
    }
    const auto in = graph.incoming_links(nf.id);
    double in_rate = 0;
    for (std::size_t l : in) in_rate += flows.edges[l].flow.rate;
    double folded = 0;
    for (std::size_t l : in) {
      if (merge == MergeMode::stream && in.size() > 1)
        led.link_weight[l] = in_rate > 0 ? flows.edges[l].flow.rate / in_rate : 0.0;
      folded += led.link_weight[l] * led.link_energy[l];
    }
    led.node_energy[i] = own + folded;
  }
  return led;
}

namespace {

double recurse(const PipelineGraph& graph, const EnergyLedger& ledger, const std::string& id,
               bool weighted) {
  std::vector<std::optional<double>> memo(graph.nodes.size());
  std::function<double(std::size_t)> go = [&](std::size_t i) -> double {
    if (memo[i]) return *memo[i];
    double value = ledger.node_energy[i];
    for (std::size_t l : graph.incoming_links(node_id(graph.nodes[i]))) {
      auto src = graph.node_index(graph.links[l].source);
      if (!src) throw UnknownIdError("link '" + graph.links[l].id + "' has no source node");
      value += (weighted ? ledger.link_weight[l] : 1.0) * go(*src);
    }
    memo[i] = value;
    return value;
  };
  auto idx = graph.node_index(id);
  if (!idx) throw UnknownIdError("no node '" + id + "'");
  if (ledger.node_energy.size() != graph.nodes.size())
    throw ModelError("energy ledger does not match the graph");
  return go(*idx);
}

}  // namespace

double total_energy(const PipelineGraph& graph, const EnergyLedger& ledger, const std::string& id) {
  return recurse(graph, ledger, id, false);
}

double mean_total_energy(const PipelineGraph& graph, const EnergyLedger& ledger,
                         const std::string& id) {
  return recurse(graph, ledger, id, true);
}

ErrorCosts error_costs(const PipelineGraph& graph, const EnergyLedger& ledger,
                       const FlowAssignment& flows) {
  ErrorCosts c;
  c.e_tp = mean_total_energy(graph, ledger, flows.output_id);
  double discards = 0, weighted = 0, tn = 0;
  for (std::size_t i = 0; i < graph.nodes.size(); ++i) {
    const auto& cm = flows.nodes[i].confusion;
    if (!cm) continue;
    const double d = cm->tn + cm->fn;
    tn += cm->tn;
    if (d > 0) {
      discards += d;
      weighted += d * mean_total_energy(graph, ledger, flows.nodes[i].id);
    }
  }
  c.e_tn = discards > 0 ? weighted / discards : 0.0;
  c.e_fp = c.e_tp - c.e_tn;
  if (flows.output_tp > 0) {
    c.tn_tp_ratio = tn / flows.output_tp;
    c.e_fn = c.e_tn + *c.tn_tp_ratio * c.e_tn + c.e_tp;
  }
  return c;
}

}  // namespace systemflow
