#include "orliczlab/orlicz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

// pchip.hpp in Boost 1.74 calls isnan unqualified
namespace boost::math::interpolators { using std::isnan; }
#include <boost/math/interpolators/pchip.hpp>

#include "orliczlab/numerics.hpp"
#include "orliczlab/report.hpp"

namespace orliczlab {

namespace {

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::vector<double> sample_grid() {
  std::vector<double> t{0.0};
  for (int i = 0; i <= 96; ++i) t.push_back(std::pow(10.0, -6.0 + i / 8.0));
  for (int i = 1; i <= 80; ++i) t.push_back(0.05 * i);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

}  // namespace

OrliczFunction::OrliczFunction(std::string description, Scalar eval, Scalar log_at_log, GaugeOptions options)
    : description_(std::move(description)), eval_(std::move(eval)), log_at_log_(std::move(log_at_log)),
      options_(options) {
  if (!log_at_log_) {
    auto e = eval_;
    log_at_log_ = [e](double L) { return std::log(e(std::exp(L))); };
  }
  validate();
}

void OrliczFunction::validate() {
  const auto grid = sample_grid();
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) v[i] = (*this)(grid[i]);
  zero_at_zero_ = v[0] == 0.0;
  if (options_.require_zero_at_zero && !zero_at_zero_)
    throw ValidationError(description_ + ": gauge must vanish at zero");
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (std::isnan(v[i]) || v[i] < 0.0) throw ValidationError(description_ + ": negative or undefined value");
    if (v[i + 1] < v[i] * (1.0 - 1e-14)) {
      monotone_ = false;
      throw ValidationError(description_ + ": not monotone near t=" + num(grid[i]));
    }
  }
  convex_ = true;
  for (std::size_t i = 0; i < grid.size() && convex_; ++i) {
    for (std::size_t step : {std::size_t{1}, std::size_t{4}}) {
      if (i + step >= grid.size()) continue;
      const double t1 = grid[i], t2 = grid[i + step];
      for (double lam : {0.25, 0.5, 0.75}) {
        double rhs = lam * v[i] + (1.0 - lam) * v[i + step];
        if (!std::isfinite(rhs)) continue;
        double lhs = (*this)(lam * t1 + (1.0 - lam) * t2);
        if (lhs > rhs * (1.0 + 1e-12) + 1e-300) convex_ = false;
      }
    }
  }
}

double OrliczFunction::operator()(double t) const {
  if (!(t >= 0.0)) throw PreconditionError(description_ + ": negative argument");
  double v = eval_(t);
  if (std::isnan(v) && t == kInf) return kInf;
  if (v > options_.overflow_threshold) return kInf;
  return v;
}

double OrliczFunction::log_eval(double t) const {
  if (!(t >= 0.0)) throw PreconditionError(description_ + ": negative argument");
  if (t == 0.0) return std::log(eval_(0.0));
  return log_at_log_(std::log(t));
}

double OrliczFunction::log_at_log(double log_t) const {
  if (log_t == -kInf) return std::log(eval_(0.0));
  return log_at_log_(log_t);
}

OrliczFunction OrliczFunction::power(double p) {
  if (!(p > 0)) throw ValidationError("pow: exponent must be positive");
  return {"pow:p=" + num(p), [p](double t) { return std::pow(t, p); }, [p](double L) { return p * L; }};
}

OrliczFunction OrliczFunction::power_log(double p, double s) {
  if (!(p > 0) || s < 0) throw ValidationError("powlog: need p>0, s>=0");
  return {"powlog:p=" + num(p) + ",s=" + num(s),
          [p, s](double t) { return std::pow(t, p) * std::pow(std::log(std::exp(1.0) + t), s); },
          [p, s](double L) {
            if (L == -kInf) return -kInf;
            return p * L + s * std::log(log_add_exp(1.0, L));
          }};
}

OrliczFunction OrliczFunction::exponential(double a) {
  if (!(a > 0)) throw ValidationError("exp: exponent must be positive");
  return {"exp:a=" + num(a), [a](double t) { return std::expm1(std::pow(t, a)); },
          [a](double L) {
            double x = std::exp(a * L);
            if (x == 0.0) return -kInf;
            if (x > 40.0) return x + std::log1p(-std::exp(-x));
            return std::log(std::expm1(x));
          }};
}

OrliczFunction OrliczFunction::exponential_raw(double a) {
  if (!(a > 0)) throw ValidationError("expraw: exponent must be positive");
  GaugeOptions o;
  o.require_zero_at_zero = false;
  return {"expraw:a=" + num(a), [a](double t) { return std::exp(std::pow(t, a)); },
          [a](double L) { return std::exp(a * L); }, o};
}

OrliczFunction OrliczFunction::double_exponential() {
  GaugeOptions o;
  o.require_zero_at_zero = false;
  return {"dexp", [](double t) { return std::exp(std::exp(t)); }, [](double L) { return std::exp(std::exp(L)); }, o};
}

OrliczFunction OrliczFunction::constant(double c) {
  if (!(c >= 0)) throw ValidationError("const: value must be nonnegative");
  GaugeOptions o;
  o.require_zero_at_zero = false;
  return {"const:c=" + num(c), [c](double) { return c; }, [c](double) { return std::log(c); }, o};
}

OrliczFunction OrliczFunction::capped_linear(double c) {
  if (!(c > 0)) throw ValidationError("cap: level must be positive");
  return {"cap:c=" + num(c), [c](double t) { return std::min(t, c); },
          [c](double L) { return std::min(L, std::log(c)); }};
}

OrliczFunction OrliczFunction::from_table(std::vector<double> t, std::vector<double> values, std::string description) {
  if (t.size() != values.size() || t.size() < 2) throw ValidationError("table: need at least two rows");
  for (std::size_t i = 0; i + 1 < t.size(); ++i)
    if (!(t[i + 1] > t[i])) throw ValidationError("table: t must be strictly increasing");
  if (t.front() < 0) throw ValidationError("table: negative t");
  if (t.front() > 0) {
    t.insert(t.begin(), 0.0);
    values.insert(values.begin(), 0.0);
  }
  const double t_last = t.back(), v_last = values.back();
  const double slope = (values[values.size() - 1] - values[values.size() - 2]) / (t[t.size() - 1] - t[t.size() - 2]);
  std::function<double(double)> inner;
  if (t.size() >= 4) {
    auto xs = t;
    auto ys = values;
    auto spline = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(xs), std::move(ys));
    inner = [spline](double x) { return (*spline)(x); };
  } else {
    inner = [t, values](double x) {
      std::size_t i = std::upper_bound(t.begin(), t.end(), x) - t.begin();
      i = std::clamp<std::size_t>(i, 1, t.size() - 1);
      double w = (x - t[i - 1]) / (t[i] - t[i - 1]);
      return values[i - 1] + w * (values[i] - values[i - 1]);
    };
  }
  auto eval = [inner, t_last, v_last, slope](double x) {
    if (x >= t_last) return v_last + slope * (x - t_last);
    return std::max(0.0, inner(x));
  };
  auto log_eval = [eval, t_last, v_last, slope](double L) {
    if (L > std::log(t_last) + 40.0) return slope > 0 ? std::log(slope) + L : std::log(v_last);
    return std::log(eval(std::exp(L)));
  };
  GaugeOptions o;
  o.require_zero_at_zero = false;
  return {std::move(description), eval, log_eval, o};
}

OrliczFunction OrliczFunction::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("table: cannot open " + path);
  std::vector<double> t, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double a, b;
    if (!(ss >> a >> b)) continue;  // header row
    t.push_back(a);
    v.push_back(b);
  }
  return from_table(std::move(t), std::move(v), "table:" + path);
}

double eval_inverse(const OrliczFunction& Phi, double tau) {
  if (!Phi.monotone()) throw ValidationError("eval_inverse: gauge is not monotone");
  if (!(tau >= 0)) throw PreconditionError("eval_inverse: negative level");
  if (Phi(0.0) >= tau) return 0.0;
  double lo = 0.0, hi = 1.0;
  if (Phi(hi) >= tau) {
    double probe = 0.5;
    while (probe > 1e-300 && Phi(probe) >= tau) {
      hi = probe;
      probe *= 0.5;
    }
    lo = Phi(probe) >= tau ? 0.0 : probe;
  } else {
    while (Phi(hi) < tau) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return kInf;
    }
  }
  while (hi - lo > 1e-12 * std::min(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (Phi(mid) >= tau) hi = mid; else lo = mid;
  }
  return hi;
}

double eval_inverse_log(const OrliczFunction& Phi, double eta) {
  if (!Phi.monotone()) throw ValidationError("eval_inverse_log: gauge is not monotone");
  if (std::isnan(eta)) throw PreconditionError("eval_inverse_log: undefined level");
  if (Phi.log_eval(0.0) >= eta) return 0.0;
  double lo = 0.0, hi = 1.0;
  if (Phi.log_eval(hi) >= eta) {
    double probe = 0.5;
    while (probe > 1e-300 && Phi.log_eval(probe) >= eta) {
      hi = probe;
      probe *= 0.5;
    }
    lo = Phi.log_eval(probe) >= eta ? 0.0 : probe;
  } else {
    while (Phi.log_eval(hi) < eta) {
      lo = hi;
      hi *= 2.0;
      if (hi > 1e300) return kInf;
    }
  }
  while (hi - lo > 1e-12 * std::min(1.0, hi)) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (Phi.log_eval(mid) >= eta) hi = mid; else lo = mid;
  }
  return hi;
}

OrliczFunction clamp_below_one(const OrliczFunction& phi) {
  const double at_one = phi(1.0);
  const double log_at_one = phi.log_at_log(0.0);
  return {"clamp(" + phi.description() + ")",
          [phi, at_one](double t) { return t == 0.0 ? 0.0 : (t < 1.0 ? at_one : phi(t)); },
          [phi, log_at_one](double L) {
            if (L == -kInf) return -kInf;
            return L < 0.0 ? log_at_one : phi.log_at_log(L);
          }};
}

OrliczFunction shift_normalize(const OrliczFunction& phi, double c) {
  if (!(c >= 0)) throw PreconditionError("shift_normalize: negative shift");
  const double base = phi(c);
  const double log_base = c == 0.0 ? phi.log_eval(0.0) : phi.log_at_log(std::log(c));
  GaugeOptions o = phi.options();
  o.require_zero_at_zero = true;
  auto eval = [phi, c, base](double t) {
    double v = phi(t + c);
    return v == kInf ? kInf : std::max(0.0, v - base);
  };
  auto log_eval = [phi, c, base, log_base, eval](double L) {
    if (L == -kInf) return -kInf;
    double a = phi.log_at_log(c == 0.0 ? L : log_add_exp(L, std::log(c)));
    if (a < 600.0) {
      double v = eval(std::exp(L));
      return v > 0.0 ? std::log(v) : -kInf;
    }
    return log_sub_exp(a, log_base);
  };
  return {"shift(" + phi.description() + ",c=" + num(c) + ")", eval, log_eval, o};
}

double LogGauge::derivative(double t) const {
  const double here = phi_p.log_eval(t);
  if (here == -kInf) return 0.0;
  if (here == kInf) return kInf;
  const double h = 1e-5 * std::max(t, 1e-300);
  const double up = phi_p.log_eval(t + h);
  const double down = t - h > 0.0 ? phi_p.log_eval(t - h) : -kInf;
  if (!std::isfinite(up)) return kInf;
  if (down == -kInf) return (up - here) / h;
  return (up - down) / (2.0 * h);
}

PowerComposition power_compose(const OrliczFunction& Phi, double p) {
  if (!(p > 0)) throw PreconditionError("power_compose: p must be positive");
  GaugeOptions o = Phi.options();
  o.require_zero_at_zero = false;
  OrliczFunction phi_p("compose(" + Phi.description() + ",p=" + num(p) + ")",
                       [Phi, p](double t) { return Phi(std::pow(t, p)); },
                       [Phi, p](double L) { return Phi.log_at_log(p * L); }, o);
  return {phi_p, LogGauge{phi_p}};
}

OrliczFunction parse_gauge(const std::string& spec) {
  Spec parsed;
  try {
    parsed = parse_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("gauge ") + e.what());
  }
  const std::string& name = parsed.name;
  if (name == "table") return OrliczFunction::from_csv(parsed.rest);
  auto get = [&](const std::string& key, double fallback) { return parsed.get(key, fallback); };
  if (name == "pow") return OrliczFunction::power(get("p", 1.0));
  if (name == "powlog") return OrliczFunction::power_log(get("p", 1.0), get("s", 1.0));
  if (name == "exp") return OrliczFunction::exponential(get("a", 1.0));
  if (name == "expraw") return OrliczFunction::exponential_raw(get("a", 1.0));
  if (name == "dexp") return OrliczFunction::double_exponential();
  if (name == "const") return OrliczFunction::constant(get("c", 1.0));
  if (name == "cap") return OrliczFunction::capped_linear(get("c", 1.0));
  throw ValidationError("unknown gauge family '" + name + "'");
}

}  // namespace orliczlab
