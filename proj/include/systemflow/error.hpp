#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace systemflow {

/// Failure of the model itself: an operating point, fit or integral that
/// cannot be produced from otherwise well-formed inputs.
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A classifier cannot reach the requested rejection fraction.
class OperatingPointError : public ModelError {
 public:
  OperatingPointError(std::string node, double requested, double attainable_below,
                      double attainable_above);

  const std::string& node() const { return node_; }
  double requested() const { return requested_; }
  /// Nearest attainable rejection fractions on either side of the request.
  double attainable_below() const { return below_; }
  double attainable_above() const { return above_; }

  OperatingPointError with_node(std::string node) const {
    return OperatingPointError(std::move(node), requested_, below_, above_);
  }

 private:
  std::string node_;
  double requested_;
  double below_;
  double above_;
};

class FitInfeasibleError : public ModelError {
 public:
  FitInfeasibleError(std::string path, double target, double min_rate, double max_rate);

  double min_rate() const { return min_rate_; }
  double max_rate() const { return max_rate_; }

 private:
  double min_rate_;
  double max_rate_;
};

class DegeneratePopulationError : public ModelError {
 public:
  using ModelError::ModelError;
};

class NumericalError : public ModelError {
 public:
  using ModelError::ModelError;
};

class UnknownIdError : public ModelError {
 public:
  using ModelError::ModelError;
};

struct ConfigIssue {
  std::string field;  // dotted path, e.g. "links[2].target"
  int line = -1;      // 1-based; -1 when unknown
  int column = -1;
  std::string message;

  std::string to_string() const;
};

/// Configuration could not be turned into a model. Carries every issue found.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  ConfigError(std::string field, std::string message);

  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  std::vector<ConfigIssue> issues_;
};

}  // namespace systemflow
