#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace systemflow {

/// Distribution of classifier scores for one population.
///
/// Parametric families are normal(mean, sigma), logistic(location, scale) and
/// uniform(lo, hi). The empirical form keeps the sorted samples; its CDF is 0
/// below the smallest sample, equals count(<= v)/n at each distinct sample v
/// and is linear between neighbouring distinct samples.
class ScoreDistribution {
 public:
  enum class Family { normal, logistic, uniform, empirical };

  static constexpr std::size_t kMinEmpiricalSamples = 1000;

  static ScoreDistribution normal(double mean, double sigma);
  static ScoreDistribution logistic(double location, double scale);
  static ScoreDistribution uniform(double lo, double hi);
  static ScoreDistribution empirical(std::vector<double> samples,
                                     std::size_t min_samples = kMinEmpiricalSamples);

  double cdf(double z) const;
  double mean() const;

  /// Interval outside which the CDF is 0 or 1 to double precision.
  double support_lo() const;
  double support_hi() const;

  /// Same distribution moved by `delta` along the score axis.
  ScoreDistribution shifted(double delta) const;

  Family family() const { return family_; }
  static std::string family_name(Family f);
  /// Parametric parameters, unshifted: {mean, sigma}, {location, scale} or {lo, hi}.
  const std::vector<double>& parameters() const { return params_; }
  double shift() const { return shift_; }

  /// Sorted samples, unshifted. Empty for parametric families.
  const std::vector<double>& samples() const;
  std::size_t sample_count() const { return samples().size(); }

  /// Score values where the CDF has a breakpoint (shifted); empty for parametric families.
  std::vector<double> breakpoints() const;

  friend bool operator==(const ScoreDistribution& a, const ScoreDistribution& b);

 private:
  struct Empirical {
    std::vector<double> sorted;
    std::vector<double> distinct;
    std::vector<double> cumulative;  // F at each distinct value
    double mean = 0;
  };

  ScoreDistribution() = default;

  Family family_ = Family::normal;
  std::vector<double> params_;
  double shift_ = 0;
  std::shared_ptr<const Empirical> empirical_;
};

}  // namespace systemflow
