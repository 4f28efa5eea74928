#include "systemflow/calibration.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "systemflow/error.hpp"
#include "systemflow/random.hpp"

namespace systemflow {

double EfficiencyCurve::operator()(double p) const {
  if (width <= 0) return p >= threshold ? plateau : 0.0;
  return plateau / (1.0 + std::exp(-(p - threshold) / width));
}

double MomentumDistribution::pdf(double p) const {
  return p > 0 ? lambda * std::exp(-lambda * p) : 0.0;
}

double MomentumDistribution::survival(double x) const {
  return x > 0 ? std::exp(-lambda * x) : 1.0;
}

double trigger_rate(const TriggerPath& path, double lambda) {
  if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
  const EfficiencyCurve& eff = path.curve;
  if (eff.width <= 0) return path.input_rate * eff.plateau * std::exp(-lambda * eff.threshold);

  // Piecewise in p around the turn-on and the exponential decay scale; past
  // U the tail uses s = exp(-lambda (p - U)), which maps it onto [0, 1].
  const double t = eff.threshold, w = eff.width;
  const double a = std::max(0.0, t - 40 * w), u = t + 40 * w;
  std::vector<double> cuts = {0.0, a, std::min(a + 30 / lambda, t), t,
                              std::min(t + 30 / lambda, u), u};
  std::sort(cuts.begin(), cuts.end());
  // Slivers much narrower than the turn-on only cost adaptive refinement.
  cuts.erase(std::unique(cuts.begin(), cuts.end(),
                         [&](double x, double y) { return y - x <= 1e-3 * w; }),
             cuts.end());
  auto f = [&](double p) { return eff(p) * lambda * std::exp(-lambda * p); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double total = 0, err = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double e = 0;
    total += GK::integrate(f, cuts[i], cuts[i + 1], 20, 1e-12, &e);
    err += e;
  }
  const double tail_weight = std::exp(-lambda * u);
  if (tail_weight > 0) {
    auto g = [&](double s) { return s <= 0 ? eff.plateau : eff(u - std::log(s) / lambda); };
    double e = 0;
    total += tail_weight * GK::integrate(g, 0.0, 1.0, 20, 1e-12, &e);
    err += tail_weight * e;
  }
  // The integrand integrates to at most 1, so 1e-13 is an absolute floor.
  if (!std::isfinite(total) || err > 1e-7 * total + 1e-13) {
    std::ostringstream os;
    os << "quadrature did not converge for path '" << path.name << "' at lambda " << lambda
       << ": integral " << total << ", error estimate " << err;
    throw NumericalError(os.str());
  }
  return path.input_rate * total;
}

MomentumDistribution fit_lambda(const TriggerPath& path) {
  const double target = path.empirical_rate;
  if (!(target > 0) || !(target <= path.input_rate))
    throw std::invalid_argument("path '" + path.name +
                                "': empirical rate must lie in (0, input_rate]");
  double lo = kLambdaMin, hi = kLambdaMax;
  const double rate_max = trigger_rate(path, lo);
  const double rate_min = trigger_rate(path, hi);
  if (target > rate_max || target < rate_min)
    throw FitInfeasibleError(path.name, target, rate_min, rate_max);
  // rate is decreasing in lambda: keep rate(lo) >= target > rate(hi).
  double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (mid <= log_lo || mid >= log_hi) break;
    if (trigger_rate(path, std::exp(mid)) >= target)
      log_lo = mid;
    else
      log_hi = mid;
  }
  const double r_lo = trigger_rate(path, std::exp(log_lo));
  const double r_hi = trigger_rate(path, std::exp(log_hi));
  return {std::abs(r_lo - target) <= std::abs(r_hi - target) ? std::exp(log_lo)
                                                              : std::exp(log_hi)};
}

std::vector<TriggerPath> fit_paths(const std::vector<TriggerPath>& paths) {
  std::vector<TriggerPath> out = paths;
  for (auto& p : out) p.momentum = fit_lambda(p);
  return out;
}

namespace {

struct PathStreams {
  RandomStream draw;
  RandomStream smear;
};

// Momentum in [0, T] from the truncated exponential.
double draw_below(RandomStream& rs, double lambda, double t) {
  const double mass = -std::expm1(-lambda * t);
  return -std::log1p(-rs.uniform() * mass) / lambda;
}

double draw_above(RandomStream& rs, double lambda, double t) {
  return t - std::log1p(-rs.uniform()) / lambda;
}

double draw_any(RandomStream& rs, double lambda) { return -std::log1p(-rs.uniform()) / lambda; }

double score(const TriggerPath& path, double p, RandomStream& smear) {
  if (path.resolution > 0) p *= std::exp(path.resolution * smear.normal());
  return path.curve(p);
}

}  // namespace

ScorePopulations sample_scores(const std::vector<TriggerPath>& paths, ScoreMode mode,
                               std::size_t n, std::uint64_t seed) {
  if (n < ScoreDistribution::kMinEmpiricalSamples)
    throw std::invalid_argument("sample_scores needs n >= " +
                                std::to_string(ScoreDistribution::kMinEmpiricalSamples));
  if (paths.empty()) throw std::invalid_argument("sample_scores needs at least one path");
  const std::size_t np = paths.size();
  std::vector<PathStreams> neg, pos;
  for (const auto& p : paths) {
    if (!(p.momentum.lambda > 0))
      throw std::invalid_argument("path '" + p.name + "' has no fitted momentum distribution");
    neg.push_back({substream(seed, p.name + "/neg"), substream(seed, p.name + "/smear-neg")});
    pos.push_back({substream(seed, p.name + "/pos"), substream(seed, p.name + "/smear-pos")});
  }

  std::vector<double> negatives, positives;
  negatives.reserve(n);
  positives.reserve(n);

  if (mode == ScoreMode::one_at_a_time) {
    for (std::size_t k = 0; k < np; ++k) {
      const TriggerPath& path = paths[k];
      const double lambda = path.momentum.lambda, t = path.curve.threshold;
      const std::size_t count = n / np + (k < n % np ? 1 : 0);
      for (std::size_t i = 0; i < count; ++i)
        negatives.push_back(score(path, draw_below(neg[k].draw, lambda, t), neg[k].smear));
      for (std::size_t i = 0; i < count; ++i)
        positives.push_back(score(path, draw_above(pos[k].draw, lambda, t), pos[k].smear));
    }
  } else {
    // Weights of "path i is the first above threshold".
    std::vector<double> cumulative(np);
    double none_before = 1.0, total = 0.0;
    for (std::size_t k = 0; k < np; ++k) {
      const double q = paths[k].momentum.survival(paths[k].curve.threshold);
      total += q * none_before;
      cumulative[k] = total;
      none_before *= 1.0 - q;
    }
    RandomStream choice = substream(seed, "summed/choice");
    for (std::size_t i = 0; i < n; ++i) {
      double s = 0;
      for (std::size_t k = 0; k < np; ++k) {
        const TriggerPath& path = paths[k];
        s += score(path, draw_below(neg[k].draw, path.momentum.lambda, path.curve.threshold),
                   neg[k].smear);
      }
      negatives.push_back(s);
    }
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t first = 0;
      if (np > 1) {
        const double u = choice.uniform() * total;
        while (first + 1 < np && cumulative[first] <= u) ++first;
      }
      double s = 0;
      for (std::size_t k = 0; k < np; ++k) {
        const TriggerPath& path = paths[k];
        const double lambda = path.momentum.lambda, t = path.curve.threshold;
        double p;
        if (k < first)
          p = draw_below(pos[k].draw, lambda, t);
        else if (k == first)
          p = draw_above(pos[k].draw, lambda, t);
        else
          p = draw_any(pos[k].draw, lambda);
        s += score(path, p, pos[k].smear);
      }
      positives.push_back(s);
    }
  }
  return {ScoreDistribution::empirical(std::move(negatives)),
          ScoreDistribution::empirical(std::move(positives))};
}

ClassifierModel build_classifier(const CalibrationSpec& spec, std::uint64_t seed) {
  auto fitted = fit_paths(spec.paths);
  auto pops = sample_scores(fitted, spec.mode, spec.samples, seed);
  return ClassifierModel(std::move(pops.positive), std::move(pops.negative));
}

ClassifierModel build_l1t(const CalibrationSpec& spec, std::uint64_t seed) {
  if (spec.mode != ScoreMode::summed) throw std::invalid_argument("L1T calibration uses summed scores");
  return build_classifier(spec, seed);
}

ClassifierModel build_hlt(const CalibrationSpec& spec, std::uint64_t seed) {
  if (spec.mode != ScoreMode::one_at_a_time)
    throw std::invalid_argument("HLT calibration uses one-at-a-time scores");
  return build_classifier(spec, seed);
}

}  // namespace systemflow
