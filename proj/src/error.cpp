#include "systemflow/error.hpp"

#include <sstream>

namespace systemflow {

namespace {

std::string operating_point_message(const std::string& node, double requested, double below,
                                    double above) {
  std::ostringstream os;
  os.precision(10);
  os << "node '" << node << "': rejection fraction " << requested
     << " is not attainable; nearest attainable fractions are " << below << " and " << above;
  return os.str();
}

std::string fit_message(const std::string& path, double target, double lo, double hi) {
  std::ostringstream os;
  os.precision(10);
  os << "trigger path '" << path << "': target rate " << target
     << " Hz is outside the attainable range [" << lo << ", " << hi << "] Hz";
  return os.str();
}

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "\n";
    out += issue.to_string();
  }
  return out;
}

}  // namespace

OperatingPointError::OperatingPointError(std::string node, double requested,
                                         double attainable_below, double attainable_above)
    : ModelError(operating_point_message(node, requested, attainable_below, attainable_above)),
      node_(std::move(node)),
      requested_(requested),
      below_(attainable_below),
      above_(attainable_above) {}

FitInfeasibleError::FitInfeasibleError(std::string path, double target, double min_rate,
                                       double max_rate)
    : ModelError(fit_message(path, target, min_rate, max_rate)),
      min_rate_(min_rate),
      max_rate_(max_rate) {}

std::string ConfigIssue::to_string() const {
  std::string out;
  if (line > 0) {
    out += "line " + std::to_string(line);
    if (column > 0) out += ":" + std::to_string(column);
    out += ": ";
  }
  if (!field.empty()) out += field + ": ";
  out += message;
  return out;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

ConfigError::ConfigError(std::string field, std::string message)
    : ConfigError(std::vector<ConfigIssue>{ConfigIssue{std::move(field), -1, -1, std::move(message)}}) {}

}  // namespace systemflow
