#pragma once

#include <optional>
#include <string>
#include <vector>

#include "systemflow/graph.hpp"
#include "systemflow/propagate.hpp"

namespace systemflow {

/// Per-message energies, in graph node and link order.
///
/// E_n = processing energy per arriving message (including constant power
/// spread over arrivals) plus the weighted energy of the links entering n.
/// An event-building merge weighs every incoming link by 1 (each event
/// carries all fragments); a stream merge weighs link l by N_l / sum N.
struct EnergyLedger {
  std::vector<double> node_energy;  // E_n, J/message
  std::vector<double> link_energy;  // J/message over each link
  std::vector<double> link_weight;  // weight of each link at its target
  std::vector<double> arrivals;     // N_n, messages/s arriving at each node
};

EnergyLedger build_ledger(const PipelineGraph& graph, const FlowAssignment& flows);

/// TE(n) = E_n + sum over predecessors p of TE(p).
double total_energy(const PipelineGraph& graph, const EnergyLedger& ledger, const std::string& id);

/// MTE(n) = E_n + sum over incoming links l of w_l * MTE(source(l)); the
/// expected energy already spent on one message arriving at n.
double mean_total_energy(const PipelineGraph& graph, const EnergyLedger& ledger,
                         const std::string& id);

struct ErrorCosts {
  double e_tp = 0;  // J
  double e_tn = 0;  // J; 0 when nothing is discarded
  double e_fp = 0;  // J
  std::optional<double> e_fn;         // undefined when the output has no true positives
  std::optional<double> tn_tp_ratio;  // system TN / output TP

  bool operator==(const ErrorCosts&) const = default;
};

/// E_TP = MTE(output); E_TN = discard-weighted mean of MTE over classifier
/// nodes; E_FP = E_TP - E_TN; E_FN = E_TN + (TN/TP) * E_TN + E_TP with TN
/// summed over every classifier and TP taken at the output.
ErrorCosts error_costs(const PipelineGraph& graph, const EnergyLedger& ledger,
                       const FlowAssignment& flows);

}  // namespace systemflow
