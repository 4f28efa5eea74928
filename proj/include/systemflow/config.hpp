#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "systemflow/calibration.hpp"
#include "systemflow/conditions.hpp"
#include "systemflow/functions.hpp"
#include "systemflow/graph.hpp"
#include "systemflow/scenario.hpp"

namespace systemflow {

inline constexpr const char* kSchemaVersion = "systemflow/1";

struct SensorDecl {
  std::string id;
  std::optional<double> sample_size;  // bits; defaults to pileup_scaling(reference pile-up)
  double sample_rate = 0;             // Hz
  double relevant_fraction = 0;
  std::optional<ScalarFunction> pileup_scaling;  // pile-up -> bits
  double min_pileup = 0;
  double constant_power = 0;  // W

  bool operator==(const SensorDecl&) const = default;
};

struct ProcessDecl {
  std::string id;
  ScalarFunction complexity = ScalarFunction::constant(0.0);
  std::optional<double> energy_per_op;       // J/op
  std::optional<double> power_at_reference;  // W
  ScalarFunction output_size = ScalarFunction::identity();
  std::string classifier;  // name in `calibration` or `classifiers`
  std::optional<double> reduction_target;
  MergeMode merge = MergeMode::event_building;
  double ops_factor = 1;
  double constant_power = 0;  // W
  double device_power = 0;    // W

  bool operator==(const ProcessDecl&) const = default;
};

struct OutputDecl {
  std::string id;
  MergeMode merge = MergeMode::event_building;

  bool operator==(const OutputDecl&) const = default;
};

using NodeDecl = std::variant<SensorDecl, ProcessDecl, OutputDecl>;

struct DistributionDecl {
  std::string family;  // normal | logistic | uniform | empirical
  std::vector<double> parameters;
  std::string file;  // empirical: absolute path to a text or .bin file

  bool operator==(const DistributionDecl&) const = default;
};

struct ClassifierDecl {
  DistributionDecl positive;
  DistributionDecl negative;

  bool operator==(const ClassifierDecl&) const = default;
};

struct ReportRow {
  std::string label;
  double pileup = 60;
  double reduction = 400;
  std::string variants = "baseline";
  double skill = 1;

  bool operator==(const ReportRow&) const = default;
};

struct ModelConfig {
  std::string schema_version = kSchemaVersion;
  Roles roles;
  std::vector<NodeDecl> nodes;
  std::vector<CommLink> links;
  std::map<std::string, CalibrationSpec> calibration;
  std::map<std::string, ClassifierDecl> classifiers;
  ExperimentConditions conditions;
  TechnologyEra era;
  VariantConfig variants;
  SweepAxes sweep;
  std::map<std::string, std::uint64_t> seeds;
  std::vector<ReportRow> report;

  bool operator==(const ModelConfig&) const = default;
};

/// Parses YAML text. `base_dir` resolves `extends:` and score files.
/// Every problem found is reported in one ConfigError.
ModelConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ModelConfig load_config(const std::string& path);

/// Canonical YAML; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ModelConfig& config);

/// Reads one score per line ('#' starts a comment) or, for a ".bin" file,
/// little-endian IEEE-754 doubles.
std::vector<double> read_scores(const std::string& path);

/// Everything needed to evaluate scenarios from one config.
struct Model {
  ModelConfig config;
  PipelineGraph graph;  // classifiers attached, energy calibrated
  Scenario scenario;
  std::uint64_t seed = 0;
  std::map<std::string, std::shared_ptr<const ClassifierModel>> classifiers;
};

inline constexpr std::uint64_t kDefaultSeed = 20240101;

/// Builds classifiers, the graph and the energy calibration. Graph
/// violations at the configured conditions become ConfigError issues.
Model build_model(const ModelConfig& config, std::optional<std::uint64_t> seed = std::nullopt);

}  // namespace systemflow
