#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace orliczlab {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Domain or precondition violation in one of the operations.
struct PreconditionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct GaugeOptions {
  double overflow_threshold = 1e300;
  /// When false, eval(0) may be positive (constant test gauges).
  bool require_zero_at_zero = true;
};

/**
 * A non-decreasing gauge on [0, inf).  The log-domain evaluator
 * log_at_log(L) = log phi(e^L) carries the function far beyond the range of
 * doubles, eval() saturates to +inf above the overflow threshold.
 */
class OrliczFunction {
 public:
  using Scalar = std::function<double(double)>;

  OrliczFunction() = default;
  OrliczFunction(std::string description, Scalar eval, Scalar log_at_log, GaugeOptions options = {});

  double operator()(double t) const;
  double eval(double t) const { return (*this)(t); }
  /// log phi(t); -inf where phi vanishes.
  double log_eval(double t) const;
  double log_at_log(double log_t) const;

  bool monotone() const { return monotone_; }
  bool convex() const { return convex_; }
  bool zero_at_zero() const { return zero_at_zero_; }
  const std::string& description() const { return description_; }
  double overflow_threshold() const { return options_.overflow_threshold; }
  const GaugeOptions& options() const { return options_; }

  static OrliczFunction power(double p);
  static OrliczFunction power_log(double p, double s);
  /// e^{t^a} - 1
  static OrliczFunction exponential(double a);
  /// e^{t^a}; not zero at zero.
  static OrliczFunction exponential_raw(double a);
  /// e^{e^t}; not zero at zero.
  static OrliczFunction double_exponential();
  static OrliczFunction constant(double c);
  /// min(t, c)
  static OrliczFunction capped_linear(double c);
  static OrliczFunction from_table(std::vector<double> t, std::vector<double> values, std::string description);
  static OrliczFunction from_csv(const std::string& path);

 private:
  void validate();

  std::string description_;
  Scalar eval_;
  Scalar log_at_log_;
  GaugeOptions options_;
  bool monotone_ = true;
  bool convex_ = false;
  bool zero_at_zero_ = true;
};

/// inf{t : Phi(t) >= tau}, +inf when the set is empty.
double eval_inverse(const OrliczFunction& Phi, double tau);
/// inf{t : log Phi(t) >= eta}, for thresholds far beyond the double range of Phi.
double eval_inverse_log(const OrliczFunction& Phi, double eta);

OrliczFunction clamp_below_one(const OrliczFunction& phi);
OrliczFunction shift_normalize(const OrliczFunction& phi, double c);

/// H_p = log Phi_p with the convention H_p' = 0 where Phi_p vanishes.
struct LogGauge {
  OrliczFunction phi_p;
  double operator()(double t) const { return phi_p.log_eval(t); }
  double derivative(double t) const;
};

struct PowerComposition {
  OrliczFunction phi_p;
  LogGauge h_p;
};

PowerComposition power_compose(const OrliczFunction& Phi, double p);

/// Parse a family spec string such as "pow:p=3", "powlog:p=2,s=2", "exp:a=1", "table:<path>".
OrliczFunction parse_gauge(const std::string& spec);

}  // namespace orliczlab
