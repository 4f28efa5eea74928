#include "systemflow/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "systemflow/error.hpp"

namespace systemflow {

ClassifierModel::ClassifierModel(ScoreDistribution positive, ScoreDistribution negative)
    : base_positive_(positive),
      positive_(std::move(positive)),
      negative_(std::move(negative)),
      base_separation_(positive_.mean() - negative_.mean()) {}

bool ClassifierModel::operator==(const ClassifierModel& o) const {
  return skill_ == o.skill_ && base_positive_ == o.base_positive_ && negative_ == o.negative_;
}

double weighted_cdf(const ClassifierModel& model, double n_true, double n_false, double z) {
  if (n_true < 0 || n_false < 0) throw std::invalid_argument("negative population rate");
  const double total = n_true + n_false;
  if (!(total > 0)) throw DegeneratePopulationError("weighted CDF of an empty population");
  double value = 0;
  if (n_true > 0) value += n_true * model.positive().cdf(z);
  if (n_false > 0) value += n_false * model.negative().cdf(z);
  return value / total;
}

double solve_threshold(const ClassifierModel& model, const MessageFlow& flow,
                       double rejection_fraction) {
  if (!(rejection_fraction > 0 && rejection_fraction < 1))
    throw std::invalid_argument("rejection fraction must lie strictly inside (0, 1)");
  const double nt = flow.n_true, nf = flow.n_false;
  auto g = [&](double z) { return weighted_cdf(model, nt, nf, z); };

  double lo = std::min(model.positive().support_lo(), model.negative().support_lo());
  double hi = std::max(model.positive().support_hi(), model.negative().support_hi());
  // Step just below the lowest score so that g(lo) = 0 for empirical forms.
  lo -= 1.0 + std::abs(lo);
  if (g(lo) >= rejection_fraction) return lo;
  if (g(hi) < rejection_fraction) {
    throw OperatingPointError("", rejection_fraction, g(hi), 1.0);
  }
  // Invariant: g(lo) < target <= g(hi).
  while (true) {
    double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (g(mid) >= rejection_fraction)
      hi = mid;
    else
      lo = mid;
  }
  const double reached = g(hi);
  const double tolerance = 1e-9 * (1.0 - rejection_fraction) + 1e-15;
  if (reached - rejection_fraction > tolerance)
    throw OperatingPointError("", rejection_fraction, g(lo), reached);
  return hi;
}

ConfusionMatrix confusion_at_threshold(const ClassifierModel& model, const MessageFlow& flow,
                                       double z_t) {
  const double cf = model.negative().cdf(z_t);
  const double ct = model.positive().cdf(z_t);
  ConfusionMatrix m;
  m.threshold = z_t;
  m.tn = flow.n_false * cf;
  m.fp = flow.n_false * (1.0 - cf);
  m.fn = flow.n_true * ct;
  m.tp = flow.n_true * (1.0 - ct);
  return m;
}

ConfusionMatrix operating_point(const ClassifierModel& model, const MessageFlow& flow,
                                double reduction) {
  if (!(reduction > 1)) throw std::invalid_argument("reduction must exceed 1");
  double z = solve_threshold(model, flow, 1.0 - 1.0 / reduction);
  ConfusionMatrix cm = confusion_at_threshold(model, flow, z);
  // The solver stops within rounding of the target; rescale the accepted
  // counts so the node emits exactly rate / reduction.
  const double accepted = cm.tp + cm.fp;
  const double target = (flow.n_true + flow.n_false) / reduction;
  if (accepted > 0) {
    cm.tp *= target / accepted;
    cm.fp *= target / accepted;
    cm.fn = flow.n_true - cm.tp;
    cm.tn = flow.n_false - cm.fp;
  }
  return cm;
}

ClassifierModel apply_skill(const ClassifierModel& model, double skill_factor) {
  if (!(skill_factor >= 0)) throw std::invalid_argument("skill factor must be nonnegative");
  ClassifierModel out = model;
  out.skill_ = model.skill_ * skill_factor;
  out.positive_ = model.base_positive_.shifted((out.skill_ - 1.0) * model.base_separation_);
  return out;
}

std::vector<RocPoint> roc(const ClassifierModel& model, int grid) {
  std::vector<double> zs = model.positive().breakpoints();
  auto neg = model.negative().breakpoints();
  zs.insert(zs.end(), neg.begin(), neg.end());
  const double lo = std::min(model.positive().support_lo(), model.negative().support_lo());
  const double hi = std::max(model.positive().support_hi(), model.negative().support_hi());
  if (zs.empty()) {
    for (int i = 0; i < grid; ++i) zs.push_back(lo + (hi - lo) * i / (grid - 1));
  }
  zs.push_back(lo - 1.0 - std::abs(lo));
  zs.push_back(hi + 1.0 + std::abs(hi));
  std::sort(zs.begin(), zs.end(), std::greater<>());
  zs.erase(std::unique(zs.begin(), zs.end()), zs.end());
  std::vector<RocPoint> out;
  out.reserve(zs.size());
  for (double z : zs)
    out.push_back({z, 1.0 - model.negative().cdf(z), 1.0 - model.positive().cdf(z)});
  return out;
}

double auc(const ClassifierModel& model) {
  const auto& p = model.positive();
  const auto& n = model.negative();
  if (p.family() == ScoreDistribution::Family::empirical &&
      n.family() == ScoreDistribution::Family::empirical) {
    // P(pos > neg) + P(pos == neg)/2 by a merge over the sorted samples.
    const auto& ps = p.samples();
    const auto& ns = n.samples();
    const double dp = p.shift(), dn = n.shift();
    double wins = 0;
    std::size_t below = 0, at_or_below = 0;
    for (double v : ps) {
      const double x = v + dp;
      while (below < ns.size() && ns[below] + dn < x) ++below;
      if (at_or_below < below) at_or_below = below;
      while (at_or_below < ns.size() && ns[at_or_below] + dn <= x) ++at_or_below;
      wins += static_cast<double>(below) + 0.5 * static_cast<double>(at_or_below - below);
    }
    return wins / (static_cast<double>(ps.size()) * static_cast<double>(ns.size()));
  }
  auto pts = roc(model, 20001);
  double area = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    area += 0.5 * (pts[i].fpr - pts[i - 1].fpr) * (pts[i].tpr + pts[i - 1].tpr);
  return area;
}

}  // namespace systemflow
