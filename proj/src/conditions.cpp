#include "orliczlab/conditions.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "orliczlab/numerics.hpp"

namespace orliczlab {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Convergent: return "CONVERGENT";
    case Classification::Divergent: return "DIVERGENT";
    case Classification::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

nlohmann::json to_json(const ConvergenceVerdict& v) {
  return {{"condition", v.condition},
          {"classification", to_string(v.classification)},
          {"partial_value", number(v.partial_value)},
          {"cutoff", number(v.cutoff)},
          {"tail_exponent", number(v.tail_exponent_estimate)},
          {"threshold", v.threshold},
          {"stage", v.stage},
          {"margin", v.margin},
          {"tail_estimate", number(v.tail_estimate)},
          {"evidence", v.evidence}};
}

VerificationReport verdict_check(std::string id, std::string anchor, const ConvergenceVerdict& v,
                                 Classification expected) {
  VerificationReport r;
  r.check_id = std::move(id);
  r.anchor = std::move(anchor);
  r.lhs = v.tail_exponent_estimate;
  r.rhs = v.threshold;
  r.relation = expected == Classification::Divergent ? Relation::GreaterEq : Relation::LessEq;
  r.margin = v.margin;
  r.samples = 33;
  r.note = to_string(v.classification) + ": " + v.evidence;
  if (v.classification == Classification::Inconclusive) r.status = Status::Inconclusive;
  else r.status = v.classification == expected ? Status::Pass : Status::Fail;
  r.slack = {{"partial_value", v.partial_value}, {"cutoff", v.cutoff}};
  return r;
}

namespace {

// l_0(t) = t, l_j = log l_{j-1}
double iterated_log(double t, int depth) {
  for (int i = 0; i < depth; ++i) t = std::log(t);
  return t;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct TailFit {
  Classification cls = Classification::Inconclusive;
  double slope = 0.0;
  int stage = 0;
  double tail = 0.0;
  std::string evidence;
};

const char* scale_name(int stage) {
  static const char* names[] = {"t", "log t", "log log t"};
  return names[std::clamp(stage, 0, 2)];
}

// Fits the local exponent of |G| near T against successively finer logarithmic scales.
TailFit fit_tail(const Integrand& G, double T, double margin, int max_stage) {
  TailFit fit;
  const double gT = G(T);
  if (std::isnan(gT)) {
    fit.evidence = "integrand undefined at the cutoff";
    return fit;
  }
  if (std::isinf(gT)) {
    fit.cls = Classification::Divergent;
    fit.slope = kInf;
    fit.evidence = "integrand infinite at the cutoff";
    return fit;
  }
  if (gT == 0.0) {
    fit.cls = Classification::Convergent;
    fit.slope = -kInf;
    fit.evidence = "integrand vanishes at the cutoff";
    return fit;
  }
  for (int stage = 0; stage <= max_stage; ++stage) {
    const double lo = stage == 0 ? T / 10.0 : std::pow(T, stage == 1 ? 0.5 : 0.25);
    if (stage > 0 && iterated_log(lo, stage) <= 1.0) {
      fit.evidence = "cutoff too small for a fit against " + std::string(scale_name(stage));
      return fit;
    }
    constexpr int m = 33;
    std::vector<double> xs, ys;
    for (int i = 0; i < m; ++i) {
      const double t = lo * std::pow(T / lo, double(i) / (m - 1));
      const double g = std::abs(G(t));
      if (std::isinf(g)) {
        fit.cls = Classification::Divergent;
        fit.slope = kInf;
        fit.evidence = "integrand infinite near the cutoff";
        return fit;
      }
      if (!(g > 0.0)) continue;
      double y = std::log(g);
      for (int j = 0; j < stage; ++j) y += std::log(iterated_log(t, j));
      xs.push_back(std::log(iterated_log(t, stage)));
      ys.push_back(y);
    }
    if (xs.size() < 8) {
      fit.evidence = "too few nonzero samples near the cutoff";
      return fit;
    }
    const double slope = fit_slope(xs, ys);
    fit.slope = slope;
    fit.stage = stage;
    bool consistent = true;
    if (stage > 0) {
      const std::size_t h = xs.size() / 2;
      const double s1 = fit_slope({xs.begin(), xs.begin() + h + 1}, {ys.begin(), ys.begin() + h + 1});
      const double s2 = fit_slope({xs.begin() + h, xs.end()}, {ys.begin() + h, ys.end()});
      const bool same_side = (s1 >= -1.0 + margin && s2 >= -1.0 + margin) || (s1 <= -1.0 - margin && s2 <= -1.0 - margin);
      // drifting away from the threshold does not undermine the verdict
      consistent = std::abs(s1 - s2) <= std::max(margin, 0.2 * std::max(std::abs(s1), std::abs(s2))) ||
                   (same_side && std::abs(s2 + 1.0) >= std::abs(s1 + 1.0));
    }
    const std::string where = "exponent " + fmt(slope) + " against " + scale_name(stage);
    if (slope >= -1.0 + margin || slope <= -1.0 - margin) {
      if (!consistent) {
        fit.evidence = where + " drifts across the fit range";
        return fit;
      }
      if (slope >= -1.0 + margin) {
        fit.cls = Classification::Divergent;
        fit.evidence = where;
      } else {
        fit.cls = Classification::Convergent;
        double scale = T * gT;
        for (int j = 1; j <= stage; ++j) scale *= iterated_log(T, j);
        fit.tail = scale / (-slope - 1.0);
        fit.evidence = where;
      }
      return fit;
    }
  }
  fit.evidence = "exponent within margin of -1 at every scale";
  return fit;
}

struct Head {
  double value = 0.0;
  bool ok = true;
  bool infinite = false;
  bool endpoint = false;
  double endpoint_slope = 0.0;
  std::string note;
};

bool endpoint_divergent(const Integrand& G, double a, double margin, double* slope) {
  Integrand E = [&G, a](double s) { return G(a + 1.0 / s) / (s * s); };
  auto fit = fit_tail(E, 1e10, margin, 2);
  *slope = fit.slope;
  return fit.cls == Classification::Divergent;
}

Head integrate_head(const Integrand& G, double a, double T, double rel_tol, double margin) {
  Head head;
  struct Seg {
    double lo, hi;
    bool log_scale;
  };
  std::vector<Seg> segs;
  if (a < 1.0) segs.push_back({a, std::min(1.0, T), false});
  const double u0 = std::log(std::max(a, 1.0)), uT = std::log(T);
  const double step = std::log(10.0);
  const int n = static_cast<int>(std::ceil((uT - u0) / step - 1e-9));
  for (int i = 0; i < n; ++i) segs.push_back({u0 + i * step, i + 1 == n ? uT : u0 + (i + 1) * step, true});
  for (std::size_t i = 0; i < segs.size(); ++i) {
    const auto& s = segs[i];
    Quadrature q = s.log_scale
                       ? integrate([&](double u) { const double t = std::exp(u); return G(t) * t; }, s.lo, s.hi, rel_tol)
                       : integrate(G, s.lo, s.hi, rel_tol);
    if (q.converged && std::isfinite(q.value)) {
      head.value += q.value;
      continue;
    }
    const double mid = s.log_scale ? std::exp(0.5 * (s.lo + s.hi)) : 0.5 * (s.lo + s.hi);
    if (std::isinf(G(mid))) {
      head.infinite = true;
      return head;
    }
    if (i == 0 && endpoint_divergent(G, a, margin, &head.endpoint_slope)) {
      head.endpoint = true;
      return head;
    }
    head.ok = false;
    head.note = "quadrature did not converge on a panel starting at " + fmt(s.log_scale ? std::exp(s.lo) : s.lo);
  }
  return head;
}

}  // namespace

ConvergenceVerdict classify_at_infinity(const Integrand& g, double lower, const ClassifierOptions& opts,
                                        std::string name) {
  ConvergenceVerdict v;
  v.condition = std::move(name);
  v.cutoff = opts.cutoff;
  v.margin = opts.margin;
  if (!(lower < opts.cutoff)) throw PreconditionError("classifier: lower limit beyond cutoff");
  Head head = integrate_head(g, lower, opts.cutoff, opts.rel_tol, opts.margin);
  if (head.infinite) {
    v.classification = Classification::Divergent;
    v.partial_value = kInf;
    v.tail_exponent_estimate = kInf;
    v.evidence = "integrand infinite on part of the range";
    return v;
  }
  if (head.endpoint) {
    v.classification = Classification::Divergent;
    v.partial_value = kInf;
    v.tail_exponent_estimate = head.endpoint_slope;
    v.evidence = "non-integrable singularity at the finite endpoint";
    return v;
  }
  TailFit fit = fit_tail(g, opts.cutoff, opts.margin, opts.max_stage);
  v.tail_exponent_estimate = fit.slope;
  v.stage = fit.stage;
  v.partial_value = head.ok ? head.value : std::nan("");
  if (!head.ok && fit.cls != Classification::Divergent) {
    v.classification = Classification::Inconclusive;
    v.evidence = head.note;
    return v;
  }
  v.classification = fit.cls;
  v.tail_estimate = fit.cls == Classification::Convergent ? fit.tail : 0.0;
  v.evidence = fit.evidence;
  return v;
}

ConvergenceVerdict classify_at_zero(const Integrand& g, double upper, const ClassifierOptions& opts,
                                    std::string name) {
  if (!(upper > 0)) throw PreconditionError("classifier: upper limit must be positive");
  Integrand G = [g](double t) {
    const double v = g(1.0 / t);
    return v == 0.0 ? 0.0 : v / (t * t);
  };
  return classify_at_infinity(G, 1.0 / upper, opts, std::move(name));
}

ConvergenceVerdict calderon_condition(const OrliczFunction& phi, int k, const ClassifierOptions& opts) {
  if (k < 2) throw PreconditionError("calderon_condition: k must be at least 2");
  if (!(phi(1.0) > 0.0)) throw PreconditionError("calderon_condition: phi vanishes at t = 1, integrand undefined");
  const double e = 1.0 / (k - 1.0);
  Integrand g = [&phi, e](double t) {
    const double L = std::log(t);
    return std::exp(e * (L - phi.log_at_log(L)));
  };
  return classify_at_infinity(g, 1.0, opts, "calderon");
}

double a_star(const OrliczFunction& phi, int k, const ClassifierOptions& opts) {
  const auto v = calderon_condition(phi, k, opts);
  if (v.classification != Classification::Convergent)
    throw PreconditionError("a_star: Calderon integral is " + to_string(v.classification));
  const double at_one = phi(1.0);
  return v.partial_value + v.tail_estimate + std::pow(1.0 / at_one, 1.0 / (k - 1.0));
}

namespace {

double zero_set_sup(const OrliczFunction& Phi) {
  if (Phi(0.0) > 0.0) return 0.0;
  double hi = 1.0;
  while (!(Phi(hi) > 0.0)) {
    hi *= 2.0;
    if (hi > 1e300) return kInf;
  }
  double lo = 0.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (Phi(mid) > 0.0) hi = mid; else lo = mid;
  }
  return lo;
}

ConvergenceVerdict stieltjes_form(const LogGauge& H, double delta, const ClassifierOptions& opts) {
  ConvergenceVerdict v;
  v.condition = "stieltjes";
  v.cutoff = opts.cutoff;
  v.margin = opts.margin;
  const double T = opts.cutoff;
  auto sum = [&](long n) {
    const double ratio = std::log(T / delta) / n;
    double s = 0.0, h_prev = H(delta), t_prev = delta;
    for (long i = 1; i <= n; ++i) {
      const double t = delta * std::exp(ratio * i);
      const double h = H(t);
      if (std::isinf(h)) return kInf;
      s += (h - h_prev) / std::sqrt(t * t_prev);
      h_prev = h;
      t_prev = t;
    }
    return s;
  };
  const long decades = std::max(1L, long(std::ceil(std::log10(T / delta))));
  long n = 256 * decades;
  double prev = sum(n);
  bool converged = false;
  double cur = prev;
  while (std::isfinite(prev) && n < (1L << 23)) {
    n *= 2;
    cur = sum(n);
    if (std::abs(cur - prev) <= 1e-6 * std::abs(cur) + 1e-300) {
      converged = true;
      break;
    }
    prev = cur;
  }
  if (!std::isfinite(cur)) {
    v.classification = Classification::Divergent;
    v.partial_value = kInf;
    v.tail_exponent_estimate = kInf;
    v.evidence = "measure dH carries infinite mass";
    return v;
  }
  Integrand density = [&H](double t) {
    const double eta = 1e-3;
    const double a = H(t), b = H(t * (1.0 + eta));
    if (std::isinf(b)) return kInf;
    return (b - a) / (eta * t * t);
  };
  TailFit fit = fit_tail(density, T, opts.margin, opts.max_stage);
  v.partial_value = converged ? cur : std::nan("");
  v.tail_exponent_estimate = fit.slope;
  v.stage = fit.stage;
  v.classification = converged || fit.cls == Classification::Divergent ? fit.cls : Classification::Inconclusive;
  v.evidence = converged ? fit.evidence : "Riemann-Stieltjes sums did not settle";
  return v;
}

}  // namespace

EquivalenceReport condition_equivalence_report(const OrliczFunction& Phi, double p, double delta,
                                               const ClassifierOptions& opts) {
  if (!Phi.monotone()) throw ValidationError("condition_equivalence_report: gauge not monotone");
  const auto comp = power_compose(Phi, p);
  EquivalenceReport rep;
  rep.convex = Phi.convex();
  rep.t0 = std::pow(zero_set_sup(Phi), 1.0 / p);
  if (!(delta > rep.t0)) throw PreconditionError("condition_equivalence_report: delta must exceed t0");
  const LogGauge& H = comp.h_p;
  const OrliczFunction& Phi_p = comp.phi_p;
  const double H0 = Phi_p.log_eval(0.0);

  rep.forms.push_back(classify_at_infinity([&H](double t) { return H.derivative(t) / t; }, delta, opts, "derivative"));
  rep.forms.push_back(stieltjes_form(H, delta, opts));
  rep.forms.push_back(classify_at_infinity(
      [&H](double t) {
        const double h = H(t);
        return h == -kInf ? 0.0 : h / (t * t);
      },
      delta, opts, "log-over-square"));
  rep.forms.push_back(classify_at_zero(
      [&H](double r) {
        const double h = H(1.0 / r);
        return h == -kInf ? 0.0 : h;
      },
      1.0 / delta, opts, "reciprocal-argument"));

  const double Hd = H(delta);
  const double eta_star = Hd > H0 ? Hd : H0 + 1.0;
  rep.forms.push_back(classify_at_infinity(
      [&Phi, p](double eta) {
        const double inv = eval_inverse_log(Phi, eta);
        return std::isinf(inv) ? 0.0 : 1.0 / std::pow(inv, 1.0 / p);
      },
      eta_star, opts, "inverse-log"));

  const double Pd = Phi_p(delta), P0 = Phi(0.0);
  const double tau_star = Pd > P0 ? Pd : P0 + 1.0;
  rep.forms.push_back(classify_at_infinity(
      [&Phi, p](double tau) {
        const double inv = eval_inverse(Phi, tau);
        return std::isinf(inv) ? 0.0 : 1.0 / (tau * std::pow(inv, 1.0 / p));
      },
      tau_star, opts, "inverse-gauge"));

  rep.agree = std::all_of(rep.forms.begin(), rep.forms.end(), [&](const ConvergenceVerdict& v) {
    return v.classification == rep.forms.front().classification;
  });
  return rep;
}

ConvergenceVerdict inverse_tail_condition(const OrliczFunction& Phi, double p, double delta0,
                                          const ClassifierOptions& opts) {
  if (!(p > 0)) throw PreconditionError("inverse_tail_condition: p must be positive");
  if (!(delta0 > Phi(0.0))) throw PreconditionError("inverse_tail_condition: delta0 must exceed Phi(0)");
  return classify_at_infinity(
      [&Phi, p](double tau) {
        const double inv = eval_inverse(Phi, tau);
        return std::isinf(inv) ? 0.0 : 1.0 / (tau * std::pow(inv, 1.0 / p));
      },
      delta0, opts, "inverse-tail");
}

ConvergenceVerdict lehto_integral(const RadialWeight& w, double p, double r_max, const ClassifierOptions& opts) {
  if (!(p > 0)) throw PreconditionError("lehto_integral: p must be positive");
  int zero_run = 0;
  for (int i = 0; i < 400; ++i) {
    const double r = r_max * std::pow(1e-12, 1.0 - i / 399.0) * (1.0 - 1e-9);
    zero_run = w.profile(r) > 0.0 ? 0 : zero_run + 1;
    if (zero_run >= 2) {
      ConvergenceVerdict v;
      v.condition = "lehto";
      v.classification = Classification::Divergent;
      v.partial_value = kInf;
      v.tail_exponent_estimate = kInf;
      v.cutoff = opts.cutoff;
      v.margin = opts.margin;
      v.evidence = "profile vanishes on a subinterval, integrand infinite there";
      return v;
    }
  }
  return classify_at_zero(
      [&w, p](double r) {
        const double q = w.profile(r);
        return q > 0.0 ? 1.0 / (r * std::pow(q, 1.0 / p)) : kInf;
      },
      r_max, opts, "lehto");
}

double ball_average(const RadialWeight& w, const OrliczFunction& Phi) {
  const int n = w.dimension();
  auto v = classify_at_zero(
      [&](double r) { return n * std::pow(r, n - 1.0) * w.sphere_mean_of(r, [&Phi](double q) { return Phi(q); }); },
      1.0, {}, "ball-average");
  if (v.classification == Classification::Divergent) return kInf;
  if (v.classification == Classification::Inconclusive) return std::nan("");
  return v.partial_value + v.tail_estimate;
}

VerificationReport inverse_tail_bound_check(const RadialWeight& w, const OrliczFunction& Phi, double p,
                                       const InverseTailBoundOptions& opts) {
  const std::string id = "ball-average-bound[" + w.description() + "," + Phi.description() + ",p=" + fmt(p) + "]";
  const std::string anchor = "lemma:log-integral-vs-inverse-tail";
  const int n = w.dimension();
  const double M = ball_average(w, Phi);
  if (std::isnan(M)) return inconclusive(id, anchor, "ball average of Phi(Q) not resolved");

  double rhs = 0.0;
  const double lower = std::exp(1.0) * M;
  if (std::isfinite(M) && lower < opts.tau_max) {
    if (!(lower > Phi(0.0))) return inconclusive(id, anchor, "e*M does not exceed Phi(0)");
    auto q = integrate(
        [&](double u) {
          const double inv = eval_inverse(Phi, std::exp(u));
          return std::isinf(inv) ? 0.0 : 1.0 / std::pow(inv, 1.0 / p);
        },
        std::log(lower), std::log(opts.tau_max), 1e-10, 20);
    if (!q.converged) return inconclusive(id, anchor, "right-hand quadrature did not converge");
    rhs = q.value / n;
  }

  ClassifierOptions co;
  co.cutoff = 1.0 / opts.delta;
  auto lv = classify_at_zero(
      [&w, p](double r) {
        const double q = w.profile(r);
        return q > 0.0 ? 1.0 / (r * std::pow(q, 1.0 / p)) : kInf;
      },
      1.0, co, "lemma-lhs");
  if (std::isnan(lv.partial_value)) return inconclusive(id, anchor, "left-hand quadrature did not converge");
  auto rep = make_check(id, anchor, lv.partial_value, Relation::GreaterEq, rhs, opts.tolerance,
                        "M=" + fmt(M) + (std::isinf(lv.partial_value) ? "; left side diverges at a finite endpoint" : ""));
  rep.slack = {{"delta", opts.delta}, {"tau_max", opts.tau_max}};
  rep.samples = 2;
  return rep;
}

ConvergenceVerdict boundary_criterion(const RadialWeight& w, double delta_max, const ClassifierOptions& opts) {
  int zero_run = 0;
  for (int i = 0; i < 200; ++i) {
    const double r = delta_max * std::pow(1e-12, 1.0 - i / 199.0);
    zero_run = w.sphere_norm(r) > 0.0 ? 0 : zero_run + 1;
    if (zero_run >= 2) {
      ConvergenceVerdict v;
      v.condition = "boundary-extension";
      v.classification = Classification::Divergent;
      v.partial_value = kInf;
      v.tail_exponent_estimate = kInf;
      v.cutoff = opts.cutoff;
      v.margin = opts.margin;
      v.evidence = "sphere norm vanishes on a set of positive length";
      return v;
    }
  }
  return classify_at_zero(
      [&w](double r) {
        const double nr = w.sphere_norm(r);
        return nr > 0.0 ? 1.0 / nr : kInf;
      },
      delta_max, opts, "boundary-extension");
}

}  // namespace orliczlab
