#include "systemflow/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace systemflow {

namespace {
// CDF of the standard normal at +-12 sigma is below 2e-33.
constexpr double kNormalReach = 12.0;
// Logistic CDF at +-80 scales is below 2e-35.
constexpr double kLogisticReach = 80.0;

const std::vector<double>& empty_vector() {
  static const std::vector<double> v;
  return v;
}
}  // namespace

ScoreDistribution ScoreDistribution::normal(double mean, double sigma) {
  if (!(sigma > 0) || !std::isfinite(mean)) throw std::invalid_argument("normal needs sigma > 0");
  ScoreDistribution d;
  d.family_ = Family::normal;
  d.params_ = {mean, sigma};
  return d;
}

ScoreDistribution ScoreDistribution::logistic(double location, double scale) {
  if (!(scale > 0) || !std::isfinite(location))
    throw std::invalid_argument("logistic needs scale > 0");
  ScoreDistribution d;
  d.family_ = Family::logistic;
  d.params_ = {location, scale};
  return d;
}

ScoreDistribution ScoreDistribution::uniform(double lo, double hi) {
  if (!(hi > lo)) throw std::invalid_argument("uniform needs hi > lo");
  ScoreDistribution d;
  d.family_ = Family::uniform;
  d.params_ = {lo, hi};
  return d;
}

ScoreDistribution ScoreDistribution::empirical(std::vector<double> samples,
                                               std::size_t min_samples) {
  if (samples.size() < min_samples)
    throw std::invalid_argument("empirical distribution needs at least " +
                                std::to_string(min_samples) + " samples, got " +
                                std::to_string(samples.size()));
  if (samples.empty()) throw std::invalid_argument("empirical distribution has no samples");
  for (double v : samples)
    if (!std::isfinite(v)) throw std::invalid_argument("empirical sample is not finite");
  auto e = std::make_shared<Empirical>();
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (i + 1 < samples.size() && samples[i + 1] == samples[i]) continue;
    e->distinct.push_back(samples[i]);
    e->cumulative.push_back(static_cast<double>(i + 1) / n);
  }
  e->mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  e->sorted = std::move(samples);
  ScoreDistribution d;
  d.family_ = Family::empirical;
  d.empirical_ = std::move(e);
  return d;
}

double ScoreDistribution::cdf(double z) const {
  const double x = z - shift_;
  switch (family_) {
    case Family::normal:
      return 0.5 * std::erfc(-(x - params_[0]) / (params_[1] * std::sqrt(2.0)));
    case Family::logistic:
      return 1.0 / (1.0 + std::exp(-(x - params_[0]) / params_[1]));
    case Family::uniform:
      if (x <= params_[0]) return 0.0;
      if (x >= params_[1]) return 1.0;
      return (x - params_[0]) / (params_[1] - params_[0]);
    case Family::empirical: {
      const auto& u = empirical_->distinct;
      const auto& f = empirical_->cumulative;
      if (x < u.front()) return 0.0;
      if (x >= u.back()) return 1.0;
      std::size_t j = static_cast<std::size_t>(std::upper_bound(u.begin(), u.end(), x) - u.begin()) - 1;
      double t = (x - u[j]) / (u[j + 1] - u[j]);
      return f[j] + t * (f[j + 1] - f[j]);
    }
  }
  return 0.0;
}

double ScoreDistribution::mean() const {
  switch (family_) {
    case Family::normal:
    case Family::logistic: return params_[0] + shift_;
    case Family::uniform: return 0.5 * (params_[0] + params_[1]) + shift_;
    case Family::empirical: return empirical_->mean + shift_;
  }
  return 0.0;
}

double ScoreDistribution::support_lo() const {
  switch (family_) {
    case Family::normal: return params_[0] - kNormalReach * params_[1] + shift_;
    case Family::logistic: return params_[0] - kLogisticReach * params_[1] + shift_;
    case Family::uniform: return params_[0] + shift_;
    case Family::empirical: return empirical_->sorted.front() + shift_;
  }
  return 0.0;
}

double ScoreDistribution::support_hi() const {
  switch (family_) {
    case Family::normal: return params_[0] + kNormalReach * params_[1] + shift_;
    case Family::logistic: return params_[0] + kLogisticReach * params_[1] + shift_;
    case Family::uniform: return params_[1] + shift_;
    case Family::empirical: return empirical_->sorted.back() + shift_;
  }
  return 0.0;
}

ScoreDistribution ScoreDistribution::shifted(double delta) const {
  ScoreDistribution d = *this;
  d.shift_ += delta;
  return d;
}

std::string ScoreDistribution::family_name(Family f) {
  switch (f) {
    case Family::normal: return "normal";
    case Family::logistic: return "logistic";
    case Family::uniform: return "uniform";
    case Family::empirical: return "empirical";
  }
  return "?";
}

const std::vector<double>& ScoreDistribution::samples() const {
  return empirical_ ? empirical_->sorted : empty_vector();
}

std::vector<double> ScoreDistribution::breakpoints() const {
  if (!empirical_) return {};
  std::vector<double> out = empirical_->distinct;
  for (double& v : out) v += shift_;
  return out;
}

bool operator==(const ScoreDistribution& a, const ScoreDistribution& b) {
  if (a.family_ != b.family_ || a.params_ != b.params_ || a.shift_ != b.shift_) return false;
  if (a.empirical_ == b.empirical_) return true;
  return a.empirical_ && b.empirical_ && a.empirical_->sorted == b.empirical_->sorted;
}

}  // namespace systemflow
