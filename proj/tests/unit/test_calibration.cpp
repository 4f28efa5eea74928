#include <doctest.h>

#include <cmath>
#include <numeric>

#include "builders.hpp"

using namespace sft;

namespace {

TriggerPath path(const std::string& name, double threshold, double width, double plateau,
                 double empirical, double input, double lambda = 1.0) {
  TriggerPath p;
  p.name = name;
  p.curve = {name, threshold, width, plateau};
  p.empirical_rate = empirical;
  p.input_rate = input;
  p.momentum.lambda = lambda;
  return p;
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stderr_of_mean(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

}  // namespace

TEST_SUITE("calibration") {
  TEST_CASE("efficiency curve") {
    EfficiencyCurve c{"e", 30, 1.5, 0.95};
    CHECK(c(30) == doctest::Approx(0.475).epsilon(1e-15));
    CHECK(c(1e6) == doctest::Approx(0.95).epsilon(1e-15));
    CHECK(c(0) >= 0.0);
    EfficiencyCurve step{"s", 30, 0, 1};
    CHECK(step(29.999) == 0.0);
    CHECK(step(30) == 1.0);
  }

  TEST_CASE("trigger rate") {
    // Step at T: input * exp(-lambda T).
    auto step = path("step", 30, 0, 1, 1, 40e6);
    CHECK(trigger_rate(step, 0.1) == doctest::Approx(40e6 * std::exp(-3.0)).epsilon(1e-14));
    // Efficiency 1 everywhere.
    auto all = path("all", 0, 0, 1, 1, 40e6);
    for (double lambda : {1e-3, 0.1, 5.0}) CHECK(trigger_rate(all, lambda) == 40e6);
    // Sigmoid T = 30, w = 2, plateau 1, lambda 0.1, 40 MHz; 30-digit quadrature.
    auto sig = path("sig", 30, 2, 1, 1, 40e6);
    CHECK(trigger_rate(sig, 0.1) == doctest::Approx(2128810.994997423040).epsilon(1e-9));
    CHECK_THROWS_AS(trigger_rate(sig, 0.0), std::invalid_argument);
  }

  TEST_CASE("trigger rate converges across the fitting bracket") {
    for (double t : {22.0, 30.0, 38.0, 320.0, 500.0})
      for (double lambda : {kLambdaMin, 1e-3, 0.1, 1.0, kLambdaMax}) {
        auto p = path("p", t, 0.05 * t, 0.95, 1, 1e5);
        double r = trigger_rate(p, lambda);
        CHECK(r >= 0.0);
        CHECK(r <= 1e5);
      }
  }

  TEST_CASE("lambda fit") {
    auto step = path("step", 30, 0, 1, 20e3, 40e6);
    const double closed = std::log(40e6 / 20e3) / 30;
    CHECK(std::abs(fit_lambda(step).lambda / closed - 1) <= 1e-6);
    auto half = path("half", 30, 0, 1, 20e6, 40e6);
    CHECK(fit_lambda(half).lambda == doctest::Approx(std::log(2.0) / 30).epsilon(1e-9));
    CHECK(fit_lambda(half).lambda == doctest::Approx(0.0231049).epsilon(1e-5));

    // Sigmoid (T 30, w 2, plateau 0.95), 10 kHz of 40 MHz; 30-digit root.
    auto sig = path("sig", 30, 2, 0.95, 10e3, 40e6);
    auto fitted = fit_lambda(sig);
    CHECK(fitted.lambda == doctest::Approx(0.2969661969481454041).epsilon(1e-6));
    CHECK(std::abs(trigger_rate(sig, fitted.lambda) - 10e3) / 10e3 <= 1e-4);
  }

  TEST_CASE("unattainable rates are reported with the attainable range") {
    auto p = path("p", 30, 1.5, 0.5, 30e6, 40e6);  // plateau caps the rate at 20 MHz
    try {
      fit_lambda(p);
      FAIL("expected FitInfeasibleError");
    } catch (const FitInfeasibleError& e) {
      CHECK(e.max_rate() <= 20e6);
      CHECK(e.min_rate() >= 0.0);
    }
  }

  TEST_CASE("lambda round trip over [1e-3, 1]") {
    for (double l0 : {1e-3, 3e-3, 0.01, 0.03, 0.1, 0.3, 1.0}) {
      auto p = path("p", 30, 1.5, 0.95, 1, 40e6);
      p.empirical_rate = trigger_rate(p, l0);
      CHECK(std::abs(fit_lambda(p).lambda / l0 - 1) <= 1e-3);
    }
  }

  TEST_CASE("step path separates perfectly") {
    auto p = path("step", 30, 0, 1, 1, 1, 0.05);
    auto pops = sample_scores({p}, ScoreMode::summed, 5000, 7);
    for (double s : pops.negative.samples()) CHECK(s == 0.0);
    for (double s : pops.positive.samples()) CHECK(s == 1.0);
  }

  TEST_CASE("positive and negative means match conditional expectations") {
    // T 30, w 2, plateau 0.95, lambda 0.05. E[eff | p > T] and E[eff | p < T]
    // by 30-digit quadrature.
    auto p = path("sig", 30, 2, 0.95, 1, 1, 0.05);
    auto pops = sample_scores({p}, ScoreMode::summed, 50000, 2024);
    const auto& pos = pops.positive.samples();
    const auto& neg = pops.negative.samples();
    CHECK(std::abs(mean(pos) - 0.8911895726812405437) <= 3 * stderr_of_mean(pos));
    CHECK(std::abs(mean(neg) - 0.0214318345604268415) <= 3 * stderr_of_mean(neg));
  }

  TEST_CASE("seeded sampling is bit-identical and single paths agree across modes") {
    auto paths = fit_paths({path("a", 30, 1.5, 0.95, 20e3, 40e6), path("b", 22, 1.1, 0.95, 20e3, 40e6)});
    paths[0].resolution = 0.3;
    auto x = sample_scores(paths, ScoreMode::summed, 5000, 99);
    auto y = sample_scores(paths, ScoreMode::summed, 5000, 99);
    CHECK(x.positive.samples() == y.positive.samples());
    CHECK(x.negative.samples() == y.negative.samples());
    auto z = sample_scores(paths, ScoreMode::summed, 5000, 100);
    CHECK(x.positive.samples() != z.positive.samples());

    std::vector<TriggerPath> one = {paths[0]};
    auto s = sample_scores(one, ScoreMode::summed, 5000, 5);
    auto o = sample_scores(one, ScoreMode::one_at_a_time, 5000, 5);
    CHECK(s.positive == o.positive);
    CHECK(s.negative == o.negative);
  }

  TEST_CASE("sharper turn-on never lowers the AUC") {
    const double n = 50000;
    double last = 0;
    for (double width : {6.0, 3.0, 1.5, 0.5, 0.0}) {
      auto p = path("p", 30, width, 0.95, 1, 1, 0.05);
      auto pops = sample_scores({p}, ScoreMode::summed, 50000, 31);
      double a = auc(ClassifierModel(pops.positive, pops.negative));
      CHECK(a >= last - 1.0 / std::sqrt(n));
      last = a;
    }
  }

  TEST_CASE("single step path gives precision = recall = 1") {
    CalibrationSpec spec;
    spec.mode = ScoreMode::summed;
    spec.samples = 5000;
    spec.paths = {path("step", 30, 0, 1, 1e3, 1e5)};
    auto m = std::make_shared<const ClassifierModel>(build_l1t(spec, 3));
    MessageFlow f{1e5, 1, 1e3, 99e3};
    auto cm = operating_point(*m, f, 100);
    CHECK(cm.tp == doctest::Approx(1e3).epsilon(1e-12));
    CHECK(cm.fp == doctest::Approx(0).epsilon(1e-12));
    CHECK(cm.fn == doctest::Approx(0).epsilon(1e-12));
    CHECK_THROWS_AS(build_hlt(spec, 3), std::invalid_argument);
  }

  TEST_CASE("sample count floor") {
    auto p = path("p", 30, 1, 1, 1, 1, 0.1);
    CHECK_THROWS_AS(sample_scores({p}, ScoreMode::summed, 999, 1), std::invalid_argument);
  }

  TEST_CASE("random streams") {
    // splitmix64 reference values of the published algorithm.
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
    auto a = substream(1, "x"), b = substream(1, "x"), c = substream(1, "y");
    double ua = a.uniform(), ub = b.uniform(), uc = c.uniform();
    CHECK(ua == ub);
    CHECK(ua != uc);
    CHECK(ua >= 0.0);
    CHECK(ua < 1.0);
  }
}
