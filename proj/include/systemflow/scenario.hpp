#pragma once

#include <optional>
#include <string>
#include <vector>

#include "systemflow/conditions.hpp"
#include "systemflow/energy.hpp"
#include "systemflow/graph.hpp"
#include "systemflow/metrics.hpp"
#include "systemflow/propagate.hpp"

namespace systemflow {

struct TechnologyEra {
  int year = 2024;
  int baseline_year = 2024;
  double efficiency_factor = 1.0;  // energy-per-op divisor relative to the baseline year
  bool apply_to_links = false;

  bool operator==(const TechnologyEra&) const = default;
};

struct GpuHltVariant {
  bool enabled = false;
  double throughput_gain = 0.5;  // ops per message divided by 1 + gain
  double unit_power = 400;       // W per accelerator

  bool operator==(const GpuHltVariant&) const = default;
};

struct L1TracksVariant {
  bool enabled = false;
  double skill_factor = 1.4;

  bool operator==(const L1TracksVariant&) const = default;
};

struct SmartPixelsVariant {
  bool enabled = false;
  double data_reduction = 0.54;
  /// Front-end power either as a total or from per-group figures.
  std::optional<double> detector_power;  // W
  double group_power = 300e-6;           // W per pixel group
  double pixels_per_group = 256;
  double pixel_count = 2e9;

  double frontend_power() const {
    return detector_power ? *detector_power : group_power * pixel_count / pixels_per_group;
  }

  bool operator==(const SmartPixelsVariant&) const = default;
};

struct VariantConfig {
  GpuHltVariant gpu_hlt;
  L1TracksVariant l1_tracks;
  SmartPixelsVariant smart_pixels;

  /// "baseline" or enabled flags joined by '+', e.g. "gpu_hlt+smart_pixels".
  std::string label() const;
  /// Copy of `parameters` with exactly the flags named in `label` enabled.
  /// Throws std::invalid_argument on an unknown flag.
  static VariantConfig from_label(const std::string& label, const VariantConfig& parameters);

  bool operator==(const VariantConfig&) const = default;
};

/// Sets sensor sizes from pile-up, removes sensors below their minimum
/// pile-up (and process nodes left without inputs), sets the role nodes'
/// reduction targets, sensor rates and relevant fractions. Pile-ups outside
/// a scaling table's domain are clamped and reported in `warnings`.
PipelineGraph apply_conditions(const PipelineGraph& graph, const ExperimentConditions& conditions,
                               std::vector<std::string>* warnings = nullptr);

/// Divides process energy per op (and link energy per bit when requested) by the factor.
PipelineGraph apply_era(const PipelineGraph& graph, const TechnologyEra& era);

/// Applies the enabled variants to the role nodes. Throws ConfigError when a
/// required role node is missing.
PipelineGraph apply_variant(const PipelineGraph& graph, const VariantConfig& variant);

/// apply_skill on the L1T role classifier.
PipelineGraph apply_l1_skill(const PipelineGraph& graph, double skill_factor);

/// Sets energy_per_op of every process node with power_at_reference so it
/// draws that power under conditions.reference().
PipelineGraph calibrate_energy(const PipelineGraph& graph, const ExperimentConditions& conditions);

struct Scenario {
  ExperimentConditions conditions;
  TechnologyEra era;
  VariantConfig variants;
  double skill = 1.0;  // extra L1T skill on top of any variant

  bool operator==(const Scenario&) const = default;
};

struct Evaluation {
  PipelineGraph graph;  // after every transform
  FlowAssignment flows;
  SystemScore score;
  ErrorCosts costs;
  std::vector<std::string> warnings;
};

/// conditions -> era -> variants -> skill, then propagate, score and cost.
Evaluation evaluate(const PipelineGraph& base, const Scenario& scenario);

struct SweepAxes {
  std::vector<double> pileup;
  std::vector<double> reduction;  // L1T reduction ratios
  std::vector<double> skill;
  std::vector<std::string> variants;

  bool operator==(const SweepAxes&) const = default;
};

struct SweepRow {
  double pileup = 0;
  double reduction = 0;
  double skill = 1;
  std::string variant;
  std::optional<SystemScore> score;
  std::string error;  // set when the point failed
};

/// Cartesian product in the order pileup, reduction, skill, variant (last
/// varies fastest). Points run on up to `jobs` threads; a failing point
/// records its error and the sweep continues.
std::vector<SweepRow> sweep(const PipelineGraph& base, const Scenario& scenario,
                            const SweepAxes& axes, unsigned jobs = 1);

}  // namespace systemflow
