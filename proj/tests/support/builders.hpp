#pragma once

#include <memory>
#include <string>

#include "systemflow/systemflow.hpp"

namespace sft {

using namespace systemflow;

inline SensorNode make_sensor(const std::string& id, double rate, double size,
                              double relevant_fraction = 0.0) {
  SensorNode s;
  s.id = id;
  s.sample_rate = rate;
  s.sample_size = size;
  s.relevant_fraction = relevant_fraction;
  return s;
}

inline ProcessNode make_process(const std::string& id, double ops_per_bit = 0.0,
                                double energy_per_op = 0.0) {
  ProcessNode p;
  p.id = id;
  p.complexity = ScalarFunction::linear(ops_per_bit);
  p.energy_per_op = energy_per_op;
  return p;
}

inline ProcessNode make_classifier_node(const std::string& id,
                                        std::shared_ptr<const ClassifierModel> model,
                                        double reduction) {
  ProcessNode p = make_process(id);
  p.classifier = std::move(model);
  p.reduction_target = reduction;
  return p;
}

inline CommLink make_link(const std::string& source, const std::string& target,
                          double energy_per_bit = 0.0, double bandwidth = 1e12) {
  CommLink l;
  l.id = source + "->" + target;
  l.source = source;
  l.target = target;
  l.energy_per_bit = energy_per_bit;
  l.bandwidth_per_channel = bandwidth;
  return l;
}

inline std::shared_ptr<const ClassifierModel> normal_model(double mean_pos, double mean_neg,
                                                           double sigma = 1.0) {
  return std::make_shared<const ClassifierModel>(ScoreDistribution::normal(mean_pos, sigma),
                                                 ScoreDistribution::normal(mean_neg, sigma));
}

/// sensor -> process -> output
inline PipelineGraph chain_graph(double rate, double size, double relevant = 0.0) {
  PipelineGraph g;
  g.nodes.push_back(make_sensor("s", rate, size, relevant));
  g.nodes.push_back(make_process("p"));
  g.nodes.push_back(OutputNode{"out"});
  g.links.push_back(make_link("s", "p"));
  g.links.push_back(make_link("p", "out"));
  return g;
}

inline std::string config_path(const std::string& name) {
  return std::string(SYSTEMFLOW_CONFIG_DIR) + "/" + name;
}

}  // namespace sft
