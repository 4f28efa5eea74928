#include "systemflow/metrics.hpp"

namespace systemflow {

SystemConfusion system_confusion(const PipelineGraph& graph, const FlowAssignment& flows) {
  (void)graph;
  SystemConfusion c;
  for (const auto& n : flows.nodes) {
    if (!n.confusion) continue;
    c.tn += n.confusion->tn;
    c.fn += n.confusion->fn;
  }
  c.tp = flows.output_tp;
  c.fp = flows.output_fp;
  return c;
}

SystemScore make_score(const SystemConfusion& c, double output_rate, double total_power) {
  SystemScore s;
  s.tp = c.tp;
  s.fp = c.fp;
  s.tn = c.tn;
  s.fn = c.fn;
  s.output_rate = output_rate;
  s.total_power = total_power;
  if (!(c.tp > 0)) {
    s.degenerate = true;
    return s;
  }
  s.precision = c.tp / (c.tp + c.fp);
  s.recall = c.tp / (c.tp + c.fn);
  s.f1 = 2.0 * s.precision * s.recall / (s.precision + s.recall);
  if (!(total_power > 0)) {
    s.degenerate = true;
    return s;
  }
  s.productivity = output_rate / total_power * s.f1;
  return s;
}

SystemScore score_system(const PipelineGraph& graph, const FlowAssignment& flows) {
  return make_score(system_confusion(graph, flows), flows.node(flows.output_id).incoming.rate,
                    total_power(graph, flows));
}

}  // namespace systemflow
