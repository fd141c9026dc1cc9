#pragma once

#include <functional>
#include <string>
#include <vector>

#include "orliczlab/orlicz.hpp"
#include "orliczlab/report.hpp"
#include "orliczlab/weight.hpp"

namespace orliczlab {

enum class Classification { Convergent, Divergent, Inconclusive };

std::string to_string(Classification c);

struct ClassifierOptions {
  double cutoff = 1e12;
  double margin = 0.05;
  /// 0 fits a power of t, 1 adds a power of log t, 2 a power of log log t.
  int max_stage = 2;
  double rel_tol = 1e-10;
};

struct ConvergenceVerdict {
  std::string condition;
  Classification classification = Classification::Inconclusive;
  /// Integral up to the cutoff; +inf for a non-integrable finite endpoint, NaN on quadrature failure.
  double partial_value = 0.0;
  /// Fitted local exponent at the deciding scale (power of t, log t, or log log t).
  double tail_exponent_estimate = 0.0;
  double threshold = -1.0;
  int stage = 0;
  double cutoff = 0.0;
  double margin = 0.0;
  /// Extrapolated integral beyond the cutoff (convergent verdicts only).
  double tail_estimate = 0.0;
  std::string evidence;
};

nlohmann::json to_json(const ConvergenceVerdict& v);

/// Report row asserting a classification; lhs is the fitted exponent, rhs the threshold.
VerificationReport verdict_check(std::string id, std::string anchor, const ConvergenceVerdict& v,
                                 Classification expected);

using Integrand = std::function<double(double)>;

/// Classifies the integral of g over [lower, inf).
ConvergenceVerdict classify_at_infinity(const Integrand& g, double lower, const ClassifierOptions& opts = {},
                                        std::string name = "integral");
/// Classifies the integral of g over (0, upper]; opts.cutoff bounds 1/r.
ConvergenceVerdict classify_at_zero(const Integrand& g, double upper, const ClassifierOptions& opts = {},
                                    std::string name = "integral");

ConvergenceVerdict calderon_condition(const OrliczFunction& phi, int k, const ClassifierOptions& opts = {});
double a_star(const OrliczFunction& phi, int k, const ClassifierOptions& opts = {});

struct EquivalenceReport {
  std::vector<ConvergenceVerdict> forms;
  bool convex = false;
  bool agree = false;
  double t0 = 0.0;
};

/// The six equivalent forms: "derivative", "stieltjes", "log-over-square", "reciprocal-argument",
/// "inverse-log", "inverse-gauge".
EquivalenceReport condition_equivalence_report(const OrliczFunction& Phi, double p, double delta,
                                               const ClassifierOptions& opts = {});

ConvergenceVerdict inverse_tail_condition(const OrliczFunction& Phi, double p, double delta0,
                                          const ClassifierOptions& opts = {});

ConvergenceVerdict lehto_integral(const RadialWeight& w, double p, double r_max = 1.0,
                                  const ClassifierOptions& opts = {});

struct InverseTailBoundOptions {
  double delta = 1e-6;
  double tau_max = 1e12;
  double tolerance = 1e-6;
};

/// Average of Phi(Q) over the unit ball around the weight center.
double ball_average(const RadialWeight& w, const OrliczFunction& Phi);

VerificationReport inverse_tail_bound_check(const RadialWeight& w, const OrliczFunction& Phi, double p,
                                       const InverseTailBoundOptions& opts = {});

ConvergenceVerdict boundary_criterion(const RadialWeight& w, double delta_max, const ClassifierOptions& opts = {});

}  // namespace orliczlab
