#pragma once

#include <optional>
#include <string>
#include <vector>

#include "systemflow/classifier.hpp"
#include "systemflow/conditions.hpp"
#include "systemflow/flow.hpp"
#include "systemflow/graph.hpp"

namespace systemflow {

struct NodeFlow {
  std::string id;
  MessageFlow incoming;  // merged arrivals; a sensor's own emission
  MessageFlow outgoing;
  double power = 0;  // W
  std::optional<ConfusionMatrix> confusion;

  bool operator==(const NodeFlow&) const = default;
};

struct EdgeFlow {
  std::string id;
  MessageFlow flow;
  double power = 0;  // W

  bool operator==(const EdgeFlow&) const = default;
};

/// Result of propagation. Entries follow the graph's node and link order.
struct FlowAssignment {
  std::vector<NodeFlow> nodes;
  std::vector<EdgeFlow> edges;
  std::string output_id;
  double storage_rate = 0;  // bit/s into the output
  double output_tp = 0;     // relevant messages/s stored
  double output_fp = 0;     // irrelevant messages/s stored

  const NodeFlow& node(const std::string& id) const;
  const EdgeFlow& edge(const std::string& id) const;

  bool operator==(const FlowAssignment&) const = default;
};

/// Propagates flow statistics in topological order. The graph must already
/// carry its conditions (see apply_conditions). Throws ModelError when the
/// graph is invalid and OperatingPointError naming the node when a
/// threshold cannot be solved.
FlowAssignment propagate(const PipelineGraph& graph);

/// apply_conditions followed by propagate.
FlowAssignment propagate(const PipelineGraph& graph, const ExperimentConditions& conditions);

double node_power(const PipelineGraph& graph, const FlowAssignment& flows, const std::string& id);
double link_power(const PipelineGraph& graph, const FlowAssignment& flows, const std::string& id);
double total_power(const PipelineGraph& graph, const FlowAssignment& flows);

/// ceil(rate * size / bandwidth_per_channel); demands within 1e-12 relative
/// of a whole number of channels do not round up.
long long required_channels(const CommLink& link, const MessageFlow& flow);

}  // namespace systemflow
