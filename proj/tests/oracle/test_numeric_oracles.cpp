#include <doctest.h>

#include <cmath>
#include <functional>
#include <random>

#include "builders.hpp"

using namespace sft;

namespace {

// Fixed-grid trapezoid of efficiency * lambda exp(-lambda p) over [0, pmax].
double trapezoid_rate(const EfficiencyCurve& eff, double lambda, double input, int n = 2000000) {
  const double pmax = eff.threshold + 40 * eff.width + 60 / lambda;
  const double h = pmax / n;
  double sum = 0;
  for (int i = 0; i <= n; ++i) {
    const double p = i * h;
    const double f = eff(p) * lambda * std::exp(-lambda * p);
    sum += (i == 0 || i == n) ? 0.5 * f : f;
  }
  return input * sum * h;
}

double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

TriggerPath sigmoid_path(double t, double w, double plateau, double empirical, double input) {
  TriggerPath p;
  p.name = "p";
  p.curve = {"p", t, w, plateau};
  p.empirical_rate = empirical;
  p.input_rate = input;
  return p;
}

}  // namespace

TEST_SUITE("numeric") {
  TEST_CASE("trigger rate against a dense trapezoid") {
    struct Case {
      double t, w, plateau, lambda;
    };
    for (Case c : {Case{30, 2, 1, 0.1}, Case{30, 2, 0.95, 0.05}, Case{22, 1.1, 0.95, 0.3},
                   Case{320, 16, 0.95, 0.02}, Case{500, 25, 0.9, 0.004}}) {
      CAPTURE(c.t);
      CAPTURE(c.lambda);
      auto path = sigmoid_path(c.t, c.w, c.plateau, 1, 40e6);
      const double oracle = trapezoid_rate(path.curve, c.lambda, 40e6);
      CHECK(std::abs(trigger_rate(path, c.lambda) / oracle - 1) <= 1e-5);
    }
  }

  TEST_CASE("lambda fit against a grid scan") {
    // 10^4 log-spaced points in [1e-3, 1]; the oracle picks the point whose
    // trapezoid rate is closest to the target.
    auto path = sigmoid_path(30, 2, 0.95, 10e3, 40e6);
    double best = 0, best_gap = INFINITY;
    const int n = 10000;
    for (int i = 0; i < n; ++i) {
      const double lambda = std::pow(10.0, -3.0 + 3.0 * i / (n - 1));
      const double gap = std::abs(trapezoid_rate(path.curve, lambda, 40e6, 4000) - 10e3);
      if (gap < best_gap) {
        best_gap = gap;
        best = lambda;
      }
    }
    CHECK(std::abs(fit_lambda(path).lambda / best - 1) <= 1e-3);
  }

  TEST_CASE("mixture median by bisection") {
    ClassifierModel m(ScoreDistribution::normal(1, 1), ScoreDistribution::normal(0, 1));
    for (auto [n_true, n_false] : {std::pair{1.0, 1.0}, {1.0, 3.0}, {1.0, 9.0}}) {
      auto mix = [&](double z) { return (n_true * phi(z - 1) + n_false * phi(z)) / (n_true + n_false); };
      double lo = -10, hi = 10;
      for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mix(mid) < 0.5 ? lo : hi) = mid;
      }
      MessageFlow f{n_true + n_false, 1, n_true, n_false};
      CHECK(solve_threshold(m, f, 0.5) == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-9));
    }
  }

  TEST_CASE("total energy equals the path enumeration") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 10.0);
    for (int trial = 0; trial < 30; ++trial) {
      // Random DAG over 6 nodes: each node links to some later nodes.
      PipelineGraph g;
      const int n = 6;
      for (int i = 0; i < n; ++i) g.nodes.push_back(make_process("n" + std::to_string(i)));
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          if (rng() % 2) g.links.push_back(make_link("n" + std::to_string(i), "n" + std::to_string(j)));
      EnergyLedger led;
      for (int i = 0; i < n; ++i) led.node_energy.push_back(u(rng));
      led.link_weight.assign(g.links.size(), 1.0);
      led.link_energy.assign(g.links.size(), 0.0);
      led.arrivals.assign(n, 1.0);

      // Sum E over every vertex of every path ending at the target.
      std::function<double(int, int)> paths_from = [&](int v, int target) -> double {
        if (v == target) return 1.0;
        double count = 0;
        for (std::size_t l : g.outgoing_links("n" + std::to_string(v)))
          count += paths_from(std::stoi(g.links[l].target.substr(1)), target);
        return count;
      };
      for (int t = 0; t < n; ++t) {
        double oracle = 0;
        for (int v = 0; v < n; ++v) oracle += led.node_energy[v] * paths_from(v, t);
        CHECK(total_energy(g, led, "n" + std::to_string(t)) == doctest::Approx(oracle).epsilon(1e-12));
      }
    }
  }

  TEST_CASE("summed scores follow the conditional law") {
    // Independent rejection sampler: draw every path's momentum from its full
    // exponential and keep samples with none (negatives) or at least one
    // (positives) above threshold.
    std::vector<TriggerPath> paths = {sigmoid_path(30, 1.5, 0.95, 20e3, 40e6),
                                      sigmoid_path(22, 1.1, 0.95, 20e3, 40e6),
                                      sigmoid_path(38, 1.9, 0.95, 20e3, 40e6)};
    for (std::size_t i = 0; i < paths.size(); ++i) paths[i].name = "p" + std::to_string(i);
    paths = fit_paths(paths);
    auto pops = sample_scores(paths, ScoreMode::summed, 40000, 5);

    std::mt19937_64 rng(99);
    std::vector<double> neg, pos;
    while (neg.size() < 40000 || pos.size() < 40000) {
      double s = 0;
      bool above = false;
      for (const auto& p : paths) {
        const double mom = std::exponential_distribution<double>(p.momentum.lambda)(rng);
        above = above || mom > p.curve.threshold;
        s += p.curve(mom);
      }
      auto& bucket = above ? pos : neg;
      if (bucket.size() < 40000) bucket.push_back(s);
    }
    auto mean_se = [](const std::vector<double>& v) {
      double m = 0, ss = 0;
      for (double x : v) m += x;
      m /= v.size();
      for (double x : v) ss += (x - m) * (x - m);
      return std::pair{m, std::sqrt(ss / (v.size() - 1) / v.size())};
    };
    auto [mp, sp] = mean_se(pops.positive.samples());
    auto [op, so] = mean_se(pos);
    CHECK(std::abs(mp - op) <= 3 * std::hypot(sp, so));
    auto [mn, sn] = mean_se(pops.negative.samples());
    auto [on, son] = mean_se(neg);
    CHECK(std::abs(mn - on) <= 3 * std::hypot(sn, son));
  }

  TEST_CASE("conditional efficiency of positives by quadrature") {
    auto path = sigmoid_path(30, 2, 0.95, 1, 1);
    path.momentum.lambda = 0.05;
    // E[eff(p) | p > T] with p - T ~ Exp(lambda).
    const int n = 400000;
    const double span = 60 / 0.05, h = span / n;
    double sum = 0;
    for (int i = 0; i <= n; ++i) {
      const double x = i * h;
      const double f = path.curve(30 + x) * 0.05 * std::exp(-0.05 * x);
      sum += (i == 0 || i == n) ? 0.5 * f : f;
    }
    const double oracle = sum * h;
    CHECK(oracle == doctest::Approx(0.8911895726812405437).epsilon(1e-7));
    auto pops = sample_scores({path}, ScoreMode::summed, 100000, 17);
    const auto& v = pops.positive.samples();
    double m = 0, ss = 0;
    for (double x : v) m += x;
    m /= v.size();
    for (double x : v) ss += (x - m) * (x - m);
    CHECK(std::abs(m - oracle) <= 3 * std::sqrt(ss / (v.size() - 1) / v.size()));
  }
}
