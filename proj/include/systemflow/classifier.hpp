#pragma once

#include <vector>

#include "systemflow/distribution.hpp"
#include "systemflow/flow.hpp"

namespace systemflow {

struct ConfusionMatrix {
  double tp = 0, fp = 0, tn = 0, fn = 0;  // messages/s
  double threshold = 0;

  bool operator==(const ConfusionMatrix&) const = default;
};

/// Scores of the relevant (positive) and irrelevant (negative) populations.
class ClassifierModel {
 public:
  ClassifierModel(ScoreDistribution positive, ScoreDistribution negative);

  const ScoreDistribution& positive() const { return positive_; }
  const ScoreDistribution& negative() const { return negative_; }
  double skill_factor() const { return skill_; }
  /// Distance between the population means at skill 1.
  double base_separation() const { return base_separation_; }

  bool operator==(const ClassifierModel& o) const;

 private:
  friend ClassifierModel apply_skill(const ClassifierModel&, double);

  ScoreDistribution base_positive_;
  ScoreDistribution positive_;
  ScoreDistribution negative_;
  double skill_ = 1.0;
  double base_separation_ = 0.0;
};

double weighted_cdf(const ClassifierModel& model, double n_true, double n_false, double z);

/// Smallest z whose weighted CDF reaches `rejection_fraction`. Bisection runs
/// until the bracket cannot shrink. Throws OperatingPointError if the CDF
/// jumps across the target.
double solve_threshold(const ClassifierModel& model, const MessageFlow& flow,
                       double rejection_fraction);

ConfusionMatrix confusion_at_threshold(const ClassifierModel& model, const MessageFlow& flow,
                                       double z_t);

/// Solves for rejection 1 - 1/reduction and returns the resulting matrix.
ConfusionMatrix operating_point(const ClassifierModel& model, const MessageFlow& flow,
                                double reduction);

/// Multiplies the mean separation by `skill_factor` by shifting the positive
/// scores. Skill factors compose multiplicatively.
ClassifierModel apply_skill(const ClassifierModel& model, double skill_factor);

struct RocPoint {
  double threshold;
  double fpr;
  double tpr;
};

/// Operating points from the highest to the lowest threshold. Empirical
/// breakpoints are used when present, otherwise `grid` evenly spaced thresholds.
std::vector<RocPoint> roc(const ClassifierModel& model, int grid = 2001);

/// Area under the ROC curve; for two empirical populations this is the exact
/// Mann-Whitney statistic of the samples.
double auc(const ClassifierModel& model);

}  // namespace systemflow
