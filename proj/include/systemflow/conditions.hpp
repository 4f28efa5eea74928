#pragma once

#include <optional>

namespace systemflow {

/// How sensors' relevant fractions are set under a set of conditions.
enum class RelevanceMode {
  as_configured,  // keep each sensor's own relevant_fraction
  fixed,          // every sensor gets `relevant_fraction`
  matched,        // 1 / (l1_reduction * hlt_reduction): relevant rate equals output rate
};

struct ExperimentConditions {
  double pileup = 60;
  double reference_pileup = 60;
  std::optional<double> bunch_rate;  // Hz; overrides sensor sample rates when set
  double l1_reduction = 400;
  double hlt_reduction = 100;
  double reference_l1_reduction = 400;
  double reference_hlt_reduction = 100;
  RelevanceMode relevance = RelevanceMode::as_configured;
  double relevant_fraction = 0;  // used when relevance == fixed

  /// Same conditions moved to the reference pile-up and reductions.
  ExperimentConditions reference() const {
    ExperimentConditions c = *this;
    c.pileup = reference_pileup;
    c.l1_reduction = reference_l1_reduction;
    c.hlt_reduction = reference_hlt_reduction;
    return c;
  }

  bool operator==(const ExperimentConditions&) const = default;
};

}  // namespace systemflow
