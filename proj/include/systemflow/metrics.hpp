#pragma once

#include "systemflow/graph.hpp"
#include "systemflow/propagate.hpp"

namespace systemflow {

struct SystemConfusion {
  double tp = 0, fp = 0, tn = 0, fn = 0;  // messages/s

  bool operator==(const SystemConfusion&) const = default;
};

/// tn and fn summed over every classifier's discards; tp and fp as stored at the output.
SystemConfusion system_confusion(const PipelineGraph& graph, const FlowAssignment& flows);

struct SystemScore {
  double tp = 0, fp = 0, tn = 0, fn = 0;
  double precision = 0, recall = 0, f1 = 0;
  double output_rate = 0;   // messages/s
  double total_power = 0;   // W
  double productivity = 0;  // 1/J
  /// Set when tp = 0 or power <= 0; the ratios above are then reported as 0.
  bool degenerate = false;

  double productivity_per_kj() const { return productivity * 1e3; }

  bool operator==(const SystemScore&) const = default;
};

/// productivity = output_rate / total_power * f1.
SystemScore make_score(const SystemConfusion& c, double output_rate, double total_power);

SystemScore score_system(const PipelineGraph& graph, const FlowAssignment& flows);

}  // namespace systemflow
