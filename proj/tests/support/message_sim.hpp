#pragma once

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "builders.hpp"

namespace sft {

/// Message-level simulation of a pipeline graph, used as an oracle for
/// propagate, system_confusion and error_costs.
///
/// Every sensor emits rate * window messages per batch with independent
/// relevance labels. Each message carries its bits and the energy spent on
/// it so far. Stream merges pass messages through; event-building merges
/// join the i-th message of every input into one event whose label is that
/// of a uniformly chosen fragment. A classifier draws a score from the
/// population of the message's label and keeps it when the score exceeds
/// the threshold reported by the analytic operating point.
///
/// Requirements: graphs are in-trees (one outgoing link per node),
/// event-building inputs carry equal message counts, and no classifier sees
/// a stream whose sources differ in relevant fraction.
struct SimulatedBatch {
  struct Edge {
    double rate = 0, n_true = 0, n_false = 0, bits = 0;
  };
  std::map<std::string, Edge> edges;
  std::map<std::string, ConfusionMatrix> confusion;
  double out_tp = 0, out_fp = 0, sys_tn = 0, sys_fn = 0;
  double e_tp = 0, e_tn = 0;
  bool has_discards = false;
  double energy_rate = 0;  // W: energy of every terminated message / window
};

namespace detail {

struct Message {
  bool relevant;
  double bits;
  double energy;
};

inline double draw_score(const ScoreDistribution& d, std::mt19937_64& rng) {
  const auto& p = d.parameters();
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  switch (d.family()) {
    case ScoreDistribution::Family::normal:
      return std::normal_distribution<double>(p[0], p[1])(rng) + d.shift();
    case ScoreDistribution::Family::logistic: {
      double u = u01(rng);
      while (u <= 0.0) u = u01(rng);
      return p[0] + p[1] * std::log(u / (1.0 - u)) + d.shift();
    }
    case ScoreDistribution::Family::uniform:
      return p[0] + (p[1] - p[0]) * u01(rng) + d.shift();
    case ScoreDistribution::Family::empirical:
      break;
  }
  throw std::invalid_argument("simulator handles parametric scores only");
}

}  // namespace detail

/// One batch over `window` seconds. `flows` supplies the classifier thresholds.
inline SimulatedBatch simulate_batch(const PipelineGraph& g, const FlowAssignment& flows,
                                     double window, std::mt19937_64& rng) {
  using detail::Message;
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  SimulatedBatch out;
  std::map<std::string, std::vector<std::vector<Message>>> inbox;  // per node, per incoming link
  double terminated_energy = 0, discarded_energy = 0, discarded = 0, stored_energy = 0;

  auto send = [&](const std::string& from, std::vector<Message> msgs) {
    auto links = g.outgoing_links(from);
    if (links.empty()) return;
    const CommLink& l = g.links[links.front()];
    auto& e = out.edges[l.id];
    for (auto& m : msgs) {
      m.energy += m.bits * l.effective_energy_per_bit();
      e.rate += 1;
      (m.relevant ? e.n_true : e.n_false) += 1;
      e.bits += m.bits;
    }
    inbox[l.target].push_back(std::move(msgs));
  };

  for (std::size_t i : topological_order(g)) {
    const Node& node = g.nodes[i];
    const std::string& id = node_id(node);
    if (auto* s = std::get_if<SensorNode>(&node)) {
      const long count = std::lround(s->sample_rate * window);
      std::vector<Message> msgs(count);
      for (auto& m : msgs) {
        m.relevant = u01(rng) < s->relevant_fraction;
        m.bits = s->effective_size();
        m.energy = s->constant_power / s->sample_rate;
      }
      send(id, std::move(msgs));
      continue;
    }
    const MergeMode merge = std::holds_alternative<ProcessNode>(node)
                                ? std::get<ProcessNode>(node).merge
                                : std::get<OutputNode>(node).merge;
    auto& inputs = inbox[id];
    std::vector<Message> arrived;
    if (merge == MergeMode::stream || inputs.size() == 1) {
      for (auto& in : inputs) arrived.insert(arrived.end(), in.begin(), in.end());
    } else {
      const std::size_t n = inputs.front().size();
      for (const auto& in : inputs)
        if (in.size() != n) throw std::logic_error("event-building inputs differ in count");
      std::uniform_int_distribution<std::size_t> pick(0, inputs.size() - 1);
      for (std::size_t k = 0; k < n; ++k) {
        Message ev{inputs[pick(rng)][k].relevant, 0.0, 0.0};
        for (const auto& in : inputs) {
          ev.bits += in[k].bits;
          ev.energy += in[k].energy;
        }
        arrived.push_back(ev);
      }
    }

    if (auto* p = std::get_if<ProcessNode>(&node)) {
      const double arrival_rate = static_cast<double>(arrived.size()) / window;
      for (auto& m : arrived)
        m.energy += p->complexity(m.bits) * p->ops_factor * p->effective_energy_per_op() +
                    p->constant_power / arrival_rate;
      std::vector<Message> kept;
      if (p->classifier) {
        ConfusionMatrix cm;
        const double z = flows.node(id).confusion->threshold;
        for (auto& m : arrived) {
          const auto& dist = m.relevant ? p->classifier->positive() : p->classifier->negative();
          const bool keep = detail::draw_score(dist, rng) > z;
          if (keep) {
            (m.relevant ? cm.tp : cm.fp) += 1;
            kept.push_back(m);
          } else {
            (m.relevant ? cm.fn : cm.tn) += 1;
            discarded += 1;
            discarded_energy += m.energy;
            terminated_energy += m.energy;
          }
        }
        out.sys_tn += cm.tn;
        out.sys_fn += cm.fn;
        out.confusion[id] = cm;
      } else {
        kept = std::move(arrived);
      }
      for (auto& m : kept) m.bits = p->output_size(m.bits);
      send(id, std::move(kept));
    } else {
      for (const auto& m : arrived) {
        (m.relevant ? out.out_tp : out.out_fp) += 1;
        stored_energy += m.energy;
        terminated_energy += m.energy;
      }
      out.e_tp = arrived.empty() ? 0.0 : stored_energy / static_cast<double>(arrived.size());
    }
  }

  out.has_discards = discarded > 0;
  out.e_tn = discarded > 0 ? discarded_energy / discarded : 0.0;
  for (auto& [k, e] : out.edges) {
    e.bits = e.rate > 0 ? e.bits / e.rate : 0.0;  // mean size
    e.rate /= window;
    e.n_true /= window;
    e.n_false /= window;
  }
  for (auto& [k, c] : out.confusion) {
    c.tp /= window;
    c.fp /= window;
    c.tn /= window;
    c.fn /= window;
  }
  out.out_tp /= window;
  out.out_fp /= window;
  out.sys_tn /= window;
  out.sys_fn /= window;
  out.energy_rate = terminated_energy / window;
  return out;
}

/// Mean and standard error of a statistic over batches.
struct Estimate {
  double mean = 0, se = 0;
};

inline Estimate estimate(const std::vector<double>& v) {
  Estimate e;
  const double n = static_cast<double>(v.size());
  for (double x : v) e.mean += x;
  e.mean /= n;
  double ss = 0;
  for (double x : v) ss += (x - e.mean) * (x - e.mean);
  e.se = n > 1 ? std::sqrt(ss / (n - 1) / n) : 0.0;
  return e;
}

/// |estimate - expected| in standard errors, with a floor for quantities
/// the simulation reproduces without sampling noise.
inline double z_score(const Estimate& e, double expected) {
  const double floor = 1e-9 * std::max(1.0, std::abs(expected));
  return std::abs(e.mean - expected) / std::max(e.se, floor);
}

struct Comparison {
  std::string quantity;
  double simulated = 0, standard_error = 0, analytic = 0, z = 0;
};

struct SimulationReport {
  std::vector<Comparison> comparisons;
  double energy_balance_error = 0;  // |simulated power - total_power| / total_power
  double worst_z() const {
    double w = 0;
    for (const auto& c : comparisons) w = std::max(w, c.z);
    return w;
  }
};

/// Simulates `batches` windows and compares every edge flow, classifier
/// confusion count, the system confusion and the four error costs with the
/// analytic model.
inline SimulationReport compare_with_simulation(const PipelineGraph& g, int batches, double window,
                                                std::mt19937_64& rng) {
  const FlowAssignment flows = propagate(g);
  const ErrorCosts costs = error_costs(g, build_ledger(g, flows), flows);
  const SystemConfusion sys = system_confusion(g, flows);
  std::map<std::string, std::vector<double>> samples;
  std::vector<double> energy;
  for (int b = 0; b < batches; ++b) {
    SimulatedBatch s = simulate_batch(g, flows, window, rng);
    for (const auto& [id, e] : s.edges) {
      samples[id + ".rate"].push_back(e.rate);
      samples[id + ".n_true"].push_back(e.n_true);
      samples[id + ".n_false"].push_back(e.n_false);
      samples[id + ".size"].push_back(e.bits);
    }
    for (const auto& [id, c] : s.confusion) {
      samples[id + ".tp"].push_back(c.tp);
      samples[id + ".fp"].push_back(c.fp);
      samples[id + ".tn"].push_back(c.tn);
      samples[id + ".fn"].push_back(c.fn);
    }
    samples["system.tp"].push_back(s.out_tp);
    samples["system.fp"].push_back(s.out_fp);
    samples["system.tn"].push_back(s.sys_tn);
    samples["system.fn"].push_back(s.sys_fn);
    samples["E_TP"].push_back(s.e_tp);
    samples["E_TN"].push_back(s.e_tn);
    samples["E_FP"].push_back(s.e_tp - s.e_tn);
    if (s.out_tp > 0)
      samples["E_FN"].push_back(s.e_tn * (1.0 + s.sys_tn / s.out_tp) + s.e_tp);
    energy.push_back(s.energy_rate);
  }

  std::map<std::string, double> analytic;
  for (const auto& e : flows.edges) {
    analytic[e.id + ".rate"] = e.flow.rate;
    analytic[e.id + ".n_true"] = e.flow.n_true;
    analytic[e.id + ".n_false"] = e.flow.n_false;
    analytic[e.id + ".size"] = e.flow.size;
  }
  for (const auto& n : flows.nodes)
    if (n.confusion) {
      analytic[n.id + ".tp"] = n.confusion->tp;
      analytic[n.id + ".fp"] = n.confusion->fp;
      analytic[n.id + ".tn"] = n.confusion->tn;
      analytic[n.id + ".fn"] = n.confusion->fn;
    }
  analytic["system.tp"] = sys.tp;
  analytic["system.fp"] = sys.fp;
  analytic["system.tn"] = sys.tn;
  analytic["system.fn"] = sys.fn;
  analytic["E_TP"] = costs.e_tp;
  analytic["E_TN"] = costs.e_tn;
  analytic["E_FP"] = costs.e_fp;
  if (costs.e_fn) analytic["E_FN"] = *costs.e_fn;

  SimulationReport r;
  for (const auto& [name, expected] : analytic) {
    auto it = samples.find(name);
    if (it == samples.end() || static_cast<int>(it->second.size()) != batches) {
      r.comparisons.push_back({name, NAN, 0, expected, INFINITY});
      continue;
    }
    Estimate e = estimate(it->second);
    r.comparisons.push_back({name, e.mean, e.se, expected, z_score(e, expected)});
  }
  const double power = total_power(g, flows);
  r.energy_balance_error = std::abs(estimate(energy).mean - power) / power;
  return r;
}

/// Random in-tree of at most five nodes: one or two sensors, one or two
/// process nodes (each a classifier with probability 0.6) and an output.
inline PipelineGraph random_graph(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * u01(rng); };
  auto coin = [&](double p) { return u01(rng) < p; };

  const int ns = coin(0.5) ? 2 : 1;
  const int np = coin(0.5) ? 2 : 1;
  const double relevant = uniform(0.05, 0.5);
  const bool equal_rates = ns == 2 && coin(0.5);
  const double r0 = equal_rates ? 25000.0 : std::round(uniform(10000, 40000));

  PipelineGraph g;
  for (int i = 0; i < ns; ++i) {
    auto s = make_sensor("s" + std::to_string(i), i == 0 ? r0 : 50000.0 - r0,
                         std::round(uniform(1000, 20000)), relevant);
    if (ns == 1) s.sample_rate = 50000;
    s.constant_power = uniform(0, 5);
    g.nodes.push_back(s);
  }
  for (int i = 0; i < np; ++i) {
    auto p = make_process("p" + std::to_string(i), uniform(0.5, 5), uniform(1e-9, 1e-8));
    p.output_size = ScalarFunction::linear(coin(0.5) ? 1.0 : uniform(0.2, 1.0));
    if (coin(0.6)) {
      const double sep = uniform(0.5, 3.0);
      p.classifier = coin(0.5) ? normal_model(sep, 0.0, 1.0)
                               : std::make_shared<const ClassifierModel>(
                                     ScoreDistribution::logistic(sep, 0.6),
                                     ScoreDistribution::logistic(0.0, 0.6));
      p.reduction_target = uniform(1.5, 8);
    }
    g.nodes.push_back(p);
  }
  g.nodes.push_back(OutputNode{"out"});

  auto link = [&](const std::string& a, const std::string& b) {
    g.links.push_back(make_link(a, b, uniform(1e-12, 1e-10)));
  };
  const bool chain = np == 2 && coin(0.5);
  link("s0", "p0");
  if (ns == 2) link("s1", np == 2 && coin(0.5) ? "p1" : "p0");
  if (np == 1) {
    link("p0", "out");
  } else if (chain) {
    link("p0", "p1");
    link("p1", "out");
  } else {
    link("p0", "out");
    link("p1", "out");
    if (g.incoming_links("p1").empty()) {
      // p1 needs a source: move s1 there, or add nothing and drop p1.
      if (ns == 2) {
        g.links[1].target = "p1";
        g.links[1].id = "s1->p1";
      } else {
        g.nodes.erase(g.nodes.begin() + ns + 1);
        g.links.pop_back();
      }
    }
  }

  // The flow model carries mean message statistics, which assumes size and
  // energy are independent of relevance. A classifier fed by a stream that
  // mixes a filtered input with a raw one breaks that, so keep p1 plain then.
  if (chain && ns == 2 && g.links[1].target == "p1") {
    auto& p0 = std::get<ProcessNode>(g.nodes[ns]);
    auto& p1 = std::get<ProcessNode>(g.nodes[ns + 1]);
    if (p0.classifier) {
      p1.classifier.reset();
      p1.reduction_target.reset();
    }
  }

  // Event building only where every input comes straight from a sensor at a
  // common rate; streams elsewhere.
  for (auto& n : g.nodes) {
    MergeMode* merge = nullptr;
    if (auto* p = std::get_if<ProcessNode>(&n)) merge = &p->merge;
    if (auto* o = std::get_if<OutputNode>(&n)) merge = &o->merge;
    if (!merge) continue;
    auto in = g.incoming_links(node_id(n));
    bool sensors_only = in.size() > 1;
    for (std::size_t l : in) {
      auto idx = g.node_index(g.links[l].source);
      sensors_only = sensors_only && std::holds_alternative<SensorNode>(g.nodes[*idx]);
    }
    *merge = sensors_only && equal_rates && coin(0.7) ? MergeMode::event_building
                                                      : MergeMode::stream;
  }
  return g;
}

}  // namespace sft
