#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace systemflow {

/// Scalar map used for complexity (bits -> ops), output size (bits -> bits)
/// and pile-up scaling (pile-up -> bits).
class ScalarFunction {
 public:
  enum class Form { constant, identity, linear, power_law, table, scaled };

  ScalarFunction();  // identity

  static ScalarFunction constant(double value);
  static ScalarFunction identity();
  /// slope * x + intercept
  static ScalarFunction linear(double slope, double intercept = 0.0);
  /// coefficient * (x / reference)^exponent; x <= 0 maps to 0 for positive exponents.
  static ScalarFunction power_law(double coefficient, double exponent, double reference = 1.0);
  /// Piecewise-linear through (xs, ys), clamped outside [xs.front(), xs.back()].
  static ScalarFunction table(std::vector<double> xs, std::vector<double> ys);
  /// inner(x) * factor / divisor. Dividing by inner(r) makes the result exactly 1 at r.
  static ScalarFunction scaled(const ScalarFunction& inner, double factor, double divisor = 1.0);

  double operator()(double x) const;

  Form form() const { return form_; }
  const std::vector<double>& params() const { return params_; }
  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }
  const ScalarFunction* inner() const { return inner_.get(); }

  /// False when x lies outside a table's domain (the value is then clamped).
  bool in_domain(double x) const;

  /// True when the function is nonnegative and nondecreasing on [lo, hi],
  /// checked exactly for the closed forms and on breakpoints for tables.
  bool nonnegative_nondecreasing(double lo, double hi) const;

  std::string describe() const;

  friend bool operator==(const ScalarFunction& a, const ScalarFunction& b);

 private:
  Form form_;
  std::vector<double> params_;
  std::vector<double> xs_, ys_;
  std::shared_ptr<const ScalarFunction> inner_;
};

}  // namespace systemflow
