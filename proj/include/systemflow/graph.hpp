#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "systemflow/classifier.hpp"
#include "systemflow/functions.hpp"

namespace systemflow {

/// How a node combines several incoming edges.
enum class MergeMode {
  event_building,  // synchronous fragments of one event: sizes add, rates must agree
  stream,          // independent message streams: rates add
};

struct SensorNode {
  std::string id;
  double sample_size = 0;  // bits per sample at the reference pile-up
  double sample_rate = 0;  // Hz
  double relevant_fraction = 0;
  /// pile-up -> size multiplier, exactly 1 at the reference pile-up.
  ScalarFunction pileup_scaling = ScalarFunction::constant(1.0);
  double pileup_multiplier = 1.0;  // pileup_scaling at the current pile-up
  double size_factor = 1.0;        // in-sensor data reduction
  double constant_power = 0;       // W dissipated by front-end logic
  double min_pileup = 0;           // sensor exists only at or above this pile-up

  double effective_size() const { return sample_size * pileup_multiplier * size_factor; }

  bool operator==(const SensorNode&) const = default;
};

struct ProcessNode {
  std::string id;
  ScalarFunction complexity = ScalarFunction::constant(0.0);  // input bits -> ops
  double energy_per_op = 0;                                   // J/op
  ScalarFunction output_size = ScalarFunction::identity();    // input bits -> output bits
  std::shared_ptr<const ClassifierModel> classifier;
  std::optional<double> reduction_target;  // messages in : messages out
  MergeMode merge = MergeMode::event_building;
  double ops_factor = 1.0;          // multiplier on ops per message
  double efficiency_divisor = 1.0;  // technology era
  double energy_scale = 1.0;        // device power normalisation
  double constant_power = 0;        // W
  /// Device power of the installed hardware; the ratio of a replacement
  /// device's power to this value rescales energy per op.
  double device_power = 0;
  /// When set, energy_per_op is calibrated so the node draws this power
  /// under the reference conditions.
  std::optional<double> power_at_reference;

  double effective_energy_per_op() const {
    return energy_per_op * energy_scale / efficiency_divisor;
  }

  bool operator==(const ProcessNode& o) const;
};

struct OutputNode {
  std::string id;
  MergeMode merge = MergeMode::event_building;

  bool operator==(const OutputNode&) const = default;
};

using Node = std::variant<SensorNode, ProcessNode, OutputNode>;

const std::string& node_id(const Node& n);

struct CommLink {
  std::string id;
  std::string source, target;
  double energy_per_bit = 0;         // J/bit
  double bandwidth_per_channel = 1;  // bit/s per channel
  double latency = 0;                // s, carried only
  double shoreline = 0;              // m/channel, carried only
  double efficiency_divisor = 1.0;   // technology era, when applied to links

  double effective_energy_per_bit() const { return energy_per_bit / efficiency_divisor; }

  bool operator==(const CommLink&) const = default;
};

/// Nodes that scenario transforms address by role.
struct Roles {
  std::string l1t;
  std::string hlt;
  std::string pixel_sensor;

  bool operator==(const Roles&) const = default;
};

struct PipelineGraph {
  std::vector<Node> nodes;
  std::vector<CommLink> links;
  Roles roles;

  std::optional<std::size_t> node_index(const std::string& id) const;
  std::optional<std::size_t> link_index(const std::string& id) const;

  /// Throws UnknownIdError when absent or of another kind.
  const SensorNode& sensor(const std::string& id) const;
  SensorNode& sensor(const std::string& id);
  const ProcessNode& process(const std::string& id) const;
  ProcessNode& process(const std::string& id);

  /// Indices of links entering / leaving node `id`, in link order.
  std::vector<std::size_t> incoming_links(const std::string& id) const;
  std::vector<std::size_t> outgoing_links(const std::string& id) const;

  bool operator==(const PipelineGraph&) const = default;
};

struct Violation {
  enum class Kind {
    duplicate_id,
    dangling_reference,
    cycle,
    missing_output,
    multiple_outputs,
    orphan,
    missing_predecessor,
    sensor_with_predecessor,
    output_with_successor,
    classifier_without_reduction,
    reduction_without_classifier,
    rate_mismatch,
    invalid_parameter,
    unknown_role,
  };
  Kind kind;
  std::string subject;  // node or link id
  std::string message;
};

std::string violation_kind_name(Violation::Kind k);

struct ValidationReport {
  std::vector<Violation> violations;
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  bool has(Violation::Kind k) const;
  std::string to_string() const;
};

ValidationReport validate_graph(const PipelineGraph& graph);

/// Kahn ordering; among ready nodes the smallest id goes first.
/// Throws ModelError on a cycle.
std::vector<std::size_t> topological_order(const PipelineGraph& graph);

/// Rates and sizes determined by structure alone (reduction targets, output
/// sizes and merges), before any classifier is consulted.
struct StructuralFlow {
  double rate_in = 0, size_in = 0;
  double rate_out = 0, size_out = 0;
};
std::vector<StructuralFlow> structural_flows(const PipelineGraph& graph);

/// Relative tolerance on equal arrival rates at event-building merges.
inline constexpr double kMergeRateTolerance = 1e-6;

}  // namespace systemflow
