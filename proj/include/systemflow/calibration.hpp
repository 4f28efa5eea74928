#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "systemflow/classifier.hpp"

namespace systemflow {

/// Trigger turn-on curve: plateau / (1 + exp(-(p - threshold) / width)).
/// A zero width is the step plateau * [p >= threshold].
struct EfficiencyCurve {
  std::string object_name;
  double threshold = 0;  // GeV
  double width = 0;      // GeV
  double plateau = 1;

  double operator()(double p) const;
  bool operator==(const EfficiencyCurve&) const = default;
};

/// Exponential momentum spectrum lambda * exp(-lambda * p), p > 0.
struct MomentumDistribution {
  double lambda = 1;  // 1/GeV

  double pdf(double p) const;
  /// P(p > x)
  double survival(double x) const;
  bool operator==(const MomentumDistribution&) const = default;
};

struct TriggerPath {
  std::string name;
  EfficiencyCurve curve;
  MomentumDistribution momentum;
  double empirical_rate = 0;  // Hz
  double input_rate = 0;      // Hz
  /// Relative momentum resolution of the trigger's own measurement: a score
  /// is efficiency(p * exp(resolution * N(0,1))). Zero scores the true momentum.
  double resolution = 0;

  bool operator==(const TriggerPath&) const = default;
};

/// input_rate * integral_0^inf efficiency(p) * pdf(lambda, p) dp, by adaptive
/// Gauss-Kronrod quadrature split at the threshold. Throws NumericalError if
/// the error estimate exceeds 1e-7 of the result.
double trigger_rate(const TriggerPath& path, double lambda);

inline constexpr double kLambdaMin = 1e-6;  // 1/GeV
inline constexpr double kLambdaMax = 10.0;  // 1/GeV

/// Bisection in log(lambda) on [kLambdaMin, kLambdaMax] until the bracket is
/// exhausted. Throws FitInfeasibleError when the empirical rate lies outside
/// the attainable range.
MomentumDistribution fit_lambda(const TriggerPath& path);

enum class ScoreMode { summed, one_at_a_time };

struct ScorePopulations {
  ScoreDistribution negative;
  ScoreDistribution positive;
};

/// Draws n negative and n positive samples.
///
/// summed: each sample holds one object per path and its score is the sum of
/// the per-path efficiencies. Negatives have every object at or below its
/// threshold; positives have at least one above. Positives are drawn exactly
/// from that conditional law: the first path above threshold is chosen with
/// probability proportional to q_i * prod_{j<i} (1 - q_j), q = P(p > T).
///
/// one_at_a_time: n is split evenly over the paths and each path contributes
/// single-object scores below (negative) or above (positive) its threshold.
///
/// Each path draws from its own substreams tagged "<name>/neg", "<name>/pos",
/// "<name>/smear-neg" and "<name>/smear-pos", so one path yields identical
/// populations in both modes.
ScorePopulations sample_scores(const std::vector<TriggerPath>& paths, ScoreMode mode,
                               std::size_t n, std::uint64_t seed);

struct CalibrationSpec {
  ScoreMode mode = ScoreMode::summed;
  std::size_t samples = 50000;
  std::vector<TriggerPath> paths;

  bool operator==(const CalibrationSpec&) const = default;
};

/// Fits every path, samples scores and returns a classifier at skill 1.
ClassifierModel build_classifier(const CalibrationSpec& spec, std::uint64_t seed);
/// build_classifier requiring summed mode.
ClassifierModel build_l1t(const CalibrationSpec& spec, std::uint64_t seed);
/// build_classifier requiring one-at-a-time mode.
ClassifierModel build_hlt(const CalibrationSpec& spec, std::uint64_t seed);

/// Paths with their fitted momentum distributions.
std::vector<TriggerPath> fit_paths(const std::vector<TriggerPath>& paths);

}  // namespace systemflow
