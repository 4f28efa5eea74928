#include "systemflow/functions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace systemflow {

ScalarFunction::ScalarFunction() : form_(Form::identity) {}

ScalarFunction ScalarFunction::constant(double value) {
  ScalarFunction f;
  f.form_ = Form::constant;
  f.params_ = {value};
  return f;
}

ScalarFunction ScalarFunction::identity() { return ScalarFunction(); }

ScalarFunction ScalarFunction::linear(double slope, double intercept) {
  ScalarFunction f;
  f.form_ = Form::linear;
  f.params_ = {slope, intercept};
  return f;
}

ScalarFunction ScalarFunction::power_law(double coefficient, double exponent, double reference) {
  if (!(reference > 0)) throw std::invalid_argument("power_law reference must be positive");
  ScalarFunction f;
  f.form_ = Form::power_law;
  f.params_ = {coefficient, exponent, reference};
  return f;
}

ScalarFunction ScalarFunction::table(std::vector<double> xs, std::vector<double> ys) {
  if (xs.size() != ys.size()) throw std::invalid_argument("table xs and ys differ in length");
  if (xs.empty()) throw std::invalid_argument("table needs at least one point");
  for (size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1])) throw std::invalid_argument("table xs must be strictly increasing");
  ScalarFunction f;
  f.form_ = Form::table;
  f.xs_ = std::move(xs);
  f.ys_ = std::move(ys);
  return f;
}

ScalarFunction ScalarFunction::scaled(const ScalarFunction& inner, double factor, double divisor) {
  if (divisor == 0) throw std::invalid_argument("scaled divisor must be nonzero");
  ScalarFunction f;
  f.form_ = Form::scaled;
  f.params_ = {factor, divisor};
  f.inner_ = std::make_shared<const ScalarFunction>(inner);
  return f;
}

double ScalarFunction::operator()(double x) const {
  switch (form_) {
    case Form::constant: return params_[0];
    case Form::identity: return x;
    case Form::linear: return params_[0] * x + params_[1];
    case Form::power_law: {
      double u = x / params_[2];
      if (u <= 0) return params_[1] > 0 ? 0.0 : params_[0];
      return params_[0] * std::pow(u, params_[1]);
    }
    case Form::table: {
      if (x <= xs_.front()) return ys_.front();
      if (x >= xs_.back()) return ys_.back();
      auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
      size_t i = static_cast<size_t>(it - xs_.begin());
      double t = (x - xs_[i - 1]) / (xs_[i] - xs_[i - 1]);
      return ys_[i - 1] + t * (ys_[i] - ys_[i - 1]);
    }
    case Form::scaled: return (*inner_)(x)*params_[0] / params_[1];
  }
  return 0.0;
}

bool ScalarFunction::in_domain(double x) const {
  switch (form_) {
    case Form::table: return x >= xs_.front() && x <= xs_.back();
    case Form::scaled: return inner_->in_domain(x);
    default: return true;
  }
}

bool ScalarFunction::nonnegative_nondecreasing(double lo, double hi) const {
  switch (form_) {
    case Form::constant: return params_[0] >= 0;
    case Form::identity: return lo >= 0;
    case Form::linear: return params_[0] >= 0 && params_[0] * lo + params_[1] >= 0;
    case Form::power_law: return params_[0] >= 0 && params_[1] >= 0;
    case Form::table: {
      for (size_t i = 0; i < ys_.size(); ++i) {
        if (ys_[i] < 0) return false;
        if (i > 0 && ys_[i] < ys_[i - 1]) return false;
      }
      return true;
    }
    case Form::scaled: {
      double k = params_[0] / params_[1];
      return k >= 0 && inner_->nonnegative_nondecreasing(lo, hi);
    }
  }
  return false;
}

std::string ScalarFunction::describe() const {
  std::ostringstream os;
  os.precision(6);
  switch (form_) {
    case Form::constant: os << "constant(" << params_[0] << ")"; break;
    case Form::identity: os << "identity"; break;
    case Form::linear: os << "linear(" << params_[0] << "*x + " << params_[1] << ")"; break;
    case Form::power_law:
      os << "power_law(" << params_[0] << "*(x/" << params_[2] << ")^" << params_[1] << ")";
      break;
    case Form::table: os << "table(" << xs_.size() << " points)"; break;
    case Form::scaled:
      os << "scaled(" << inner_->describe() << " * " << params_[0] << " / " << params_[1] << ")";
      break;
  }
  return os.str();
}

bool operator==(const ScalarFunction& a, const ScalarFunction& b) {
  if (a.form_ != b.form_ || a.params_ != b.params_ || a.xs_ != b.xs_ || a.ys_ != b.ys_)
    return false;
  if (a.inner_ && b.inner_) return *a.inner_ == *b.inner_;
  return !a.inner_ && !b.inner_;
}

}  // namespace systemflow
