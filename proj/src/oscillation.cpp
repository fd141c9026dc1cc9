#include "orliczlab/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"

namespace orliczlab {

namespace {

const double kLn2 = std::log(2.0);

/// Nodes in the unit ball with weights summing to one.
struct BallRule {
  std::vector<Eigen::VectorXd> points;
  std::vector<double> weights;
};

const BallRule& ball_rule(int n, int radial, int angular) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int>, std::unique_ptr<BallRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{n, radial, angular}];
  if (slot) return *slot;
  auto rule = std::make_unique<BallRule>();
  std::vector<double> x, w;
  gauss_legendre(radial, 0.0, 1.0, x, w);
  if (n == 2) {
    for (int i = 0; i < radial; ++i)
      for (int j = 0; j < angular; ++j) {
        const double th = 2.0 * kPi * (j + 0.5) / angular;
        Eigen::VectorXd p(2);
        p << x[i] * std::cos(th), x[i] * std::sin(th);
        rule->points.push_back(p);
        rule->weights.push_back(2.0 * w[i] * x[i] / angular);
      }
  } else if (n == 3) {
    std::vector<double> c, cw;
    const int polar = std::max(2, angular / 4), azim = std::max(4, angular / 2);
    gauss_legendre(polar, -1.0, 1.0, c, cw);
    for (int i = 0; i < radial; ++i)
      for (int a = 0; a < polar; ++a)
        for (int b = 0; b < azim; ++b) {
          const double ph = 2.0 * kPi * (b + 0.5) / azim, s = std::sqrt(1.0 - c[a] * c[a]);
          Eigen::VectorXd p(3);
          p << x[i] * s * std::cos(ph), x[i] * s * std::sin(ph), x[i] * c[a];
          rule->points.push_back(p);
          // 3 r^2 dr * dcos/2 * dphi/(2 pi)
          rule->weights.push_back(3.0 * w[i] * x[i] * x[i] * cw[a] * 0.5 / azim);
        }
  } else {
    throw PreconditionError("ball quadrature: dimension must be 2 or 3");
  }
  long double total = 0.0L;
  for (double w : rule->weights) total += w;
  for (double& w : rule->weights) w = static_cast<double>(w / total);
  slot = std::move(rule);
  return *slot;
}

std::vector<double> sample_ball(const OscillationField& u, const Eigen::VectorXd& center, double radius,
                                const BallRule& rule) {
  std::vector<double> vals(rule.points.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = u(center + radius * rule.points[i]);
  return vals;
}

void check_ball(const OscillationField& u, const Eigen::VectorXd& center, double radius) {
  if (!(radius > 0.0)) throw PreconditionError("ball radius must be positive");
  if (radius > u.integrable_radius) throw PreconditionError("ball radius beyond the integrable radius of the field");
  if (center.size() != u.dimension) throw PreconditionError("center dimension does not match the field");
}

/// Evaluates stat on the full and the half grid and insists they agree.
template <typename Stat>
double refined(const OscillationField& u, const Eigen::VectorXd& center, double radius, const BallQuadrature& q,
               Stat stat, const char* what) {
  const auto& fine = ball_rule(u.dimension, q.radial, q.angular);
  const auto& coarse = ball_rule(u.dimension, std::max(2, q.radial / 2), std::max(4, q.angular / 2));
  const double a = stat(sample_ball(u, center, radius, coarse), coarse);
  const double b = stat(sample_ball(u, center, radius, fine), fine);
  if (!std::isfinite(b) || std::abs(a - b) > q.refinement_tol * std::max(1.0, std::abs(b))) {
    std::ostringstream os;
    os << what << ": quadrature not converged (nodes " << coarse.points.size() << ": " << a << ", nodes "
       << fine.points.size() << ": " << b << ")";
    throw NumericalError(os.str());
  }
  return b;
}

double weighted_mean(const std::vector<double>& v, const BallRule& r) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) s += r.weights[i] * v[i];
  return s;
}

double weighted_deviation(const std::vector<double>& v, const BallRule& r, double c) {
  long double s = 0.0L;
  for (std::size_t i = 0; i < v.size(); ++i) s += r.weights[i] * std::abs(v[i] - c);
  return s;
}

double bump_sum(const std::vector<Bump>& bumps, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (const auto& b : bumps) {
    const double d = std::hypot(x[0] - b.center[0], x[1] - b.center[1]);
    if (d < b.radius) s += std::exp(b.log_amplitude) * b.local_value(d / b.radius);
  }
  return s;
}

OscillationField bump_field(std::vector<Bump> bumps, std::string description) {
  OscillationField f;
  f.dimension = 2;
  f.description = std::move(description);
  f.integrable_radius = 1.0;
  f.bumps = bumps;
  f.eval = [bumps](const Eigen::VectorXd& x) { return bump_sum(bumps, x); };
  return f;
}

/// Integral of amplitude^power * profile^power over the part of the bump inside |z| < eps.
double bump_integral(const Bump& b, double power, double eps, const BallRule& rule) {
  double s = 0.0;
  for (std::size_t i = 0; i < rule.points.size(); ++i) {
    const auto& w = rule.points[i];
    const double zx = b.center[0] + b.radius * w[0], zy = b.center[1] + b.radius * w[1];
    if (std::hypot(zx, zy) >= eps) continue;
    s += rule.weights[i] * std::pow(b.local_value(w.norm()), power);
  }
  return std::exp(power * b.log_amplitude + 2.0 * std::log(b.radius)) * kPi * s;
}

double bump0(double w) { return w < 1.0 ? std::exp(1.0 / (w * w - 1.0)) : 0.0; }

/// Fraction of the circle of radius s, centered at distance d from the ball center, inside the ball.
double arc_fraction(double d, double s, double eps) {
  if (d + s <= eps) return 1.0;
  if (s >= d + eps || d >= s + eps) return 0.0;
  const double c = (d * d + s * s - eps * eps) / (2.0 * d * s);
  return std::acos(std::clamp(c, -1.0, 1.0)) / kPi;
}

/// Integral of g(u) over the part of the bump inside B(center, eps), in polar coordinates about the bump center.
/// g may have a kink where u crosses level.
template <typename G>
double bump_ball_integral(const Bump& b, const Eigen::VectorXd& center, double eps, G g, double level = kInf) {
  const double d = std::hypot(center[0] - b.center[0], center[1] - b.center[1]);
  if (d >= eps + b.radius) return 0.0;
  const double amp = std::exp(b.log_amplitude);
  auto f = [&](double rho) { return g(amp * b.local_value(rho)) * arc_fraction(d, rho * b.radius, eps) * rho; };
  std::vector<double> cuts{0.0, 1.0};
  for (double x : {std::abs(eps - d) / b.radius, (eps + d) / b.radius})
    if (x > 0.0 && x < 1.0) cuts.push_back(x);
  const double edge = std::nextafter(1.0, 0.0);
  auto excess = [&](double rho) { return amp * b.local_value(rho) - level; };
  if (std::isfinite(level) && excess(0.0) * excess(edge) < 0.0) cuts.push_back(solve_bracketed(excess, 0.0, edge, 1e-15));
  std::sort(cuts.begin(), cuts.end());
  double s = 0.0, err = 0.0;
  for (std::size_t i = 1; i < cuts.size(); ++i) {
    const auto q = integrate(f, cuts[i - 1], cuts[i], 1e-10, 20);
    s += q.value;
    err += q.error;
  }
  if (!(std::isfinite(s) && err <= 1e-8 * std::abs(s) + 1e-300)) throw NumericalError("bump integral did not converge");
  return 2.0 * kPi * b.radius * b.radius * s;
}

double bump_mean(const OscillationField& u, const Eigen::VectorXd& center, double eps) {
  long double s = 0.0L;
  for (const auto& b : u.bumps) s += bump_ball_integral(b, center, eps, [](double v) { return v; });
  return static_cast<double>(s / (kPi * eps * eps));
}

double bump_deviation(const OscillationField& u, const Eigen::VectorXd& center, double eps, double c) {
  long double s = 0.0L, covered = 0.0L;
  for (const auto& b : u.bumps) {
    s += bump_ball_integral(b, center, eps, [c](double v) { return std::abs(v - c); }, c);
    covered += bump_ball_integral(b, center, eps, [](double) { return 1.0; });
  }
  const long double area = kPi * eps * eps;
  return static_cast<double>((s + std::abs(c) * std::max(0.0L, area - covered)) / area);
}

}  // namespace

double Bump::local_value(double w) const {
  if (w >= 1.0) return 0.0;
  return profile ? profile(w) : 1.0;
}

double ball_mean(const OscillationField& u, const Eigen::VectorXd& center, double radius, const BallQuadrature& q) {
  check_ball(u, center, radius);
  if (!u.bumps.empty()) return bump_mean(u, center, radius);
  return refined(u, center, radius, q, weighted_mean, "ball mean");
}

double mean_deviation(const OscillationField& u, const Eigen::VectorXd& center, double radius, double c,
                      const BallQuadrature& q) {
  check_ball(u, center, radius);
  if (!u.bumps.empty()) return bump_deviation(u, center, radius, c);
  return refined(u, center, radius, q,
                 [c](const std::vector<double>& v, const BallRule& r) { return weighted_deviation(v, r, c); },
                 "mean deviation");
}

double mean_oscillation(const OscillationField& u, const Eigen::VectorXd& center, double radius,
                        const BallQuadrature& q) {
  check_ball(u, center, radius);
  if (!u.bumps.empty()) return bump_deviation(u, center, radius, bump_mean(u, center, radius));
  return refined(u, center, radius, q,
                 [](const std::vector<double>& v, const BallRule& r) {
                   return weighted_deviation(v, r, weighted_mean(v, r));
                 },
                 "mean oscillation");
}

std::vector<double> dyadic_grid(double r0, int count) {
  std::vector<double> g;
  for (int j = 0; j < count; ++j) g.push_back(std::ldexp(r0, -j));
  return g;
}

FmoResult fmo_at_point(const OscillationField& u, const Eigen::VectorXd& z0, const std::vector<double>& eps_grid,
                       const std::function<double(double)>& centering, const BallQuadrature& q) {
  if (eps_grid.size() < 2) throw PreconditionError("fmo_at_point: need at least two scales");
  FmoResult r;
  r.eps = eps_grid;
  int divergent = 0;
  std::string trace;
  for (double e : eps_grid) {
    try {
      const double m = ball_mean(u, z0, e, q);
      r.means.push_back(m);
      r.oscillation.push_back(mean_deviation(u, z0, e, m, q));
      if (centering) r.centered.push_back(mean_deviation(u, z0, e, centering(e), q));
    } catch (const NumericalError& err) {
      // the ball integral grows under refinement
      ++divergent;
      if (trace.empty()) trace = err.what();
      r.means.push_back(kInf);
      r.oscillation.push_back(kInf);
      if (centering) r.centered.push_back(kInf);
    }
  }
  r.max_oscillation = *std::max_element(r.oscillation.begin(), r.oscillation.end());
  auto trend_of = [&](const std::vector<double>& v) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!(std::abs(v[i]) > 0.0) || !std::isfinite(v[i])) continue;
      x.push_back(-std::log(eps_grid[i]));
      y.push_back(std::log(std::abs(v[i])));
    }
    return x.size() < 2 ? 0.0 : fit_slope(x, y);
  };
  r.trend = r.max_oscillation == 0.0 ? 0.0 : trend_of(r.oscillation);
  const double mean_trend = trend_of(r.means);
  constexpr double kFlat = 0.1;
  if (divergent > 0) r.evidence = "NOT-FMO-EVIDENCE";
  else if (r.trend <= kFlat) r.evidence = "EVIDENCE-FOR";
  else if (mean_trend > kFlat) r.evidence = "NOT-FMO-EVIDENCE";
  else r.evidence = "EVIDENCE-AGAINST";

  const std::string anchor = "oscillation:fmo-at-point";
  std::string note = r.evidence + "; max over " + std::to_string(eps_grid.size()) + " scales";
  if (eps_grid.size() < 8) note += " (fewer than 8 scales)";
  if (divergent > 0) note += "; " + std::to_string(divergent) + " divergent scales, first: " + trace;
  auto row = make_check("fmo.trend", anchor, divergent ? kInf : r.trend, Relation::LessEq, kFlat, 0.0, note);
  row.slack.push_back({"max-oscillation", r.max_oscillation});
  row.slack.push_back({"mean-trend", mean_trend});
  row.samples = static_cast<long>(eps_grid.size());
  r.rows.push_back(row);
  if (centering) {
    double worst = -kInf, scale = 0.0;
    for (std::size_t i = 0; i < eps_grid.size(); ++i) {
      worst = std::max(worst, r.oscillation[i] - 2.0 * r.centered[i]);
      scale = std::max(scale, r.centered[i]);
    }
    auto c = make_check("fmo.centering-comparison", anchor, worst, Relation::LessEq, 0.0, 1e-12 * std::max(1.0, scale),
                        "oscillation about the ball mean minus twice the deviation from phi_eps");
    c.samples = static_cast<long>(eps_grid.size());
    r.rows.push_back(c);
  }
  return r;
}

OscillationField constant_field(double c, int n) {
  OscillationField f;
  f.dimension = n;
  f.integrable_radius = kInf;
  f.description = "const(" + std::to_string(c) + ")";
  f.eval = [c](const Eigen::VectorXd&) { return c; };
  return f;
}

OscillationField log_recip_field(int n) {
  OscillationField f;
  f.dimension = n;
  f.integrable_radius = 1.0;
  f.description = "log(1/|z|)";
  f.eval = [](const Eigen::VectorXd& x) { return -std::log(x.norm()); };
  return f;
}

OscillationField inverse_square_field(int n) {
  OscillationField f;
  f.dimension = n;
  f.integrable_radius = 1.0;
  f.description = "|z|^-2";
  f.eval = [](const Eigen::VectorXd& x) { return 1.0 / x.squaredNorm(); };
  return f;
}

OscillationField half_plane_field(int n) {
  OscillationField f;
  f.dimension = n;
  f.integrable_radius = kInf;
  f.description = "indicator(x1 > 0)";
  f.eval = [](const Eigen::VectorXd& x) { return x[0] > 0.0 ? 1.0 : 0.0; };
  return f;
}

OscillationField table_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("table field: cannot open " + path);
  std::vector<double> xs, ys, vs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double x, y, v;
    if (!(ss >> x >> y >> v)) {
      if (xs.empty()) continue;
      throw ValidationError("table field: malformed row '" + line + "'");
    }
    xs.push_back(x);
    ys.push_back(y);
    vs.push_back(v);
  }
  auto unique_sorted = [](std::vector<double> a) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
    return a;
  };
  const auto gx = unique_sorted(xs), gy = unique_sorted(ys);
  if (gx.size() < 2 || gy.size() < 2 || gx.size() * gy.size() != vs.size())
    throw ValidationError("table field: values must fill a regular grid");
  Eigen::MatrixXd grid(gx.size(), gy.size());
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const auto a = std::lower_bound(gx.begin(), gx.end(), xs[i]) - gx.begin();
    const auto b = std::lower_bound(gy.begin(), gy.end(), ys[i]) - gy.begin();
    grid(a, b) = vs[i];
  }
  OscillationField f;
  f.dimension = 2;
  f.description = "table(" + path + ")";
  f.integrable_radius = 0.5 * std::min(gx.back() - gx.front(), gy.back() - gy.front());
  f.eval = [gx, gy, grid](const Eigen::VectorXd& x) {
    if (x[0] < gx.front() || x[0] > gx.back() || x[1] < gy.front() || x[1] > gy.back())
      throw PreconditionError("table field: point outside the grid");
    auto cell = [](const std::vector<double>& g, double v) {
      auto i = std::upper_bound(g.begin(), g.end(), v) - g.begin() - 1;
      return std::clamp<long>(i, 0, static_cast<long>(g.size()) - 2);
    };
    const long i = cell(gx, x[0]), j = cell(gy, x[1]);
    const double tx = (x[0] - gx[i]) / (gx[i + 1] - gx[i]), ty = (x[1] - gy[j]) / (gy[j + 1] - gy[j]);
    return (1 - tx) * (1 - ty) * grid(i, j) + tx * (1 - ty) * grid(i + 1, j) + (1 - tx) * ty * grid(i, j + 1) +
           tx * ty * grid(i + 1, j + 1);
  };
  return f;
}

ExampleResult build_example1(double p, int n_max, const BallQuadrature& q) {
  if (!(p > 1.0)) throw PreconditionError("example 1: p must exceed 1");
  const int n0 = static_cast<int>(std::floor(1.0 / (p - 1.0))) + 1;
  if (n_max < n0)
    throw PreconditionError("example 1: n_max = " + std::to_string(n_max) + " leaves no N with (p-1)N > 1; need " +
                            std::to_string(n0));
  std::vector<Bump> bumps;
  for (int n = 1; n <= n_max; ++n) {
    Bump b;
    b.center = Eigen::Vector2d(std::ldexp(1.0, -n), 0.0);
    b.radius = std::exp(-p * n * n * kLn2);
    b.log_amplitude = 2.0 * n * n * kLn2;
    bumps.push_back(b);
  }
  ExampleResult res;
  std::ostringstream desc;
  desc << "example1(p=" << p << ",n_max=" << n_max << ")";
  res.field = bump_field(bumps, desc.str());
  const auto& rule = ball_rule(2, q.radial, q.angular);
  const std::string anchor = "oscillation:example1";

  // tail of pi sum_{n > n_max} 2^{2(1-p)n^2}
  double missing = 0.0;
  for (int n = n_max + 1; n <= n_max + 60; ++n) missing += kPi * std::exp(2.0 * (1.0 - p) * n * n * kLn2);
  const double ratio = std::exp(2.0 * (1.0 - p) * kLn2);
  const double C = kPi / (1.0 - ratio);
  std::vector<double> lhs_list, eps_list;
  double c_fit = 0.0;
  for (int N = n0; N <= n_max; ++N) {
    const double eps = std::ldexp(1.0, -N) + bumps[N - 1].radius;
    double integral = 0.0;
    for (const auto& b : bumps) integral += bump_integral(b, 1.0, eps, rule);
    integral += missing;
    c_fit = std::max(c_fit, integral / std::exp(2.0 * (1.0 - p) * N * kLn2));
    auto row = make_check("example1.ball-integral.N" + std::to_string(N), anchor, integral, Relation::LessEq,
                          2.0 * C * eps * eps, 0.0, "integral over D(eps_N) against 2 C eps_N^2");
    row.slack.push_back({"levels-beyond-n_max", missing});
    row.slack.push_back({"C", C});
    res.rows.push_back(row);
    lhs_list.push_back(integral);
    eps_list.push_back(eps);

    double sq = 0.0, geo = 0.0;
    for (int n = N; n <= N + 60; ++n) sq += std::exp(2.0 * (1.0 - p) * n * n * kLn2);
    geo = std::exp(2.0 * (1.0 - p) * N * kLn2) / (1.0 - ratio);
    res.rows.push_back(make_check("example1.geometric-tail.N" + std::to_string(N), anchor, sq, Relation::LessEq, geo,
                                  0.0));
  }
  for (auto& r : res.rows) r.slack.push_back({"C-fitted", c_fit});

  std::vector<double> per_disk, partial;
  double s = 0.0;
  for (int n = 1; n <= n_max; ++n) {
    const double v = bump_integral(bumps[n - 1], p, kInf, rule);
    per_disk.push_back(v);
    s += v;
    partial.push_back(s);
    res.rows.push_back(make_check("example1.disk-lp.n" + std::to_string(n), anchor, v, Relation::ApproxEq, kPi,
                                  1e-9 * kPi, "integral of phi^p over D_n"));
  }
  double min_inc = kInf, max_inc = 0.0;
  for (std::size_t i = 0; i < partial.size(); ++i) {
    const double inc = partial[i] - (i ? partial[i - 1] : 0.0);
    min_inc = std::min(min_inc, inc);
    max_inc = std::max(max_inc, inc);
  }
  auto lin = make_check("example1.partial-sums-linear", anchor, max_inc - min_inc, Relation::LessEq, 0.0,
                        1e-9 * kPi, "spread of the increments of the partial L^p sums");
  lin.slack.push_back({"min-increment", min_inc});
  res.rows.push_back(lin);
  res.rows.push_back(make_check("example1.partial-sums-increasing", anchor, min_inc, Relation::GreaterEq, 0.0, 0.0));
  res.data = {{"p", p},
              {"n_max", n_max},
              {"C", C},
              {"C_fitted", c_fit},
              {"eps", eps_list},
              {"ball_integral", lhs_list},
              {"disk_lp", per_disk},
              {"partial_lp", partial}};
  return res;
}

ExampleResult build_example2(double delta, int k_max, const BallQuadrature& q) {
  if (!(delta > 0.0)) throw PreconditionError("example 2: delta must be positive");
  const int k_need = static_cast<int>(std::ceil(1.0 / delta)) + 1;
  if (k_max == 0) k_max = k_need + 2;
  if (k_max < k_need)
    throw PreconditionError("example 2: truncation below K = " + std::to_string(k_need));
  std::vector<Bump> bumps;
  for (int k = 2; k <= k_max; ++k) {
    Bump b;
    b.center = Eigen::Vector2d(std::ldexp(1.0, -k), 0.0);
    b.radius = std::exp(-(1.0 + delta) * k * k * kLn2);
    b.log_amplitude = 2.0 * k * k * kLn2;
    b.profile = bump0;
    bumps.push_back(b);
  }
  ExampleResult res;
  std::ostringstream desc;
  desc << "example2(delta=" << delta << ",k_max=" << k_max << ")";
  res.field = bump_field(bumps, desc.str());
  const auto& rule = ball_rule(2, q.radial, q.angular);
  const std::string anchor = "oscillation:example2";

  Bump unit;
  unit.profile = bump0;
  const double I0 = bump_integral(unit, 1.0, kInf, rule);
  const double I0p = bump_integral(unit, 1.0 + delta, kInf, rule);

  const int K0 = static_cast<int>(std::floor(1.0 / delta)) + 1;
  std::vector<double> J_list, eps_list;
  for (int K = K0; K <= k_max; ++K) {
    const double eps = 0.75 * std::ldexp(1.0, -K);
    double integral = 0.0;
    for (const auto& b : bumps) integral += bump_integral(b, 1.0, eps, rule);
    double tail = 0.0;
    for (int k = k_max + 1; k <= k_max + 40; ++k) tail += std::exp(-2.0 * delta * k * k * kLn2) * I0;
    const double J = (integral + tail) / (kPi * eps * eps);
    double series = 0.0;
    for (int k = K; k <= K + 60; ++k) series += std::exp(-2.0 * delta * k * k * kLn2);
    auto row = make_check("example2.J-bound.K" + std::to_string(K), anchor, J, Relation::LessEq, 16.0 * I0 / (3.0 * kPi),
                          1e-6, "normalized integral over D(eps), I = integral of phi_0");
    row.slack.push_back({"levels-beyond-k_max", tail / (kPi * eps * eps)});
    row.slack.push_back({"series-bound", I0 * series / (kPi * std::ldexp(1.0, -2 * (K + 1)))});
    res.rows.push_back(row);
    J_list.push_back(J);
    eps_list.push_back(eps);
  }
  std::vector<double> lp, l1;
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    const int k = static_cast<int>(i) + 2;
    const double a = bump_integral(bumps[i], 1.0, kInf, rule);
    const double b = bump_integral(bumps[i], 1.0 + delta, kInf, rule);
    l1.push_back(a);
    lp.push_back(b);
    const double expect = std::exp(-2.0 * delta * k * k * kLn2) * I0;
    res.rows.push_back(make_check("example2.ball-l1.k" + std::to_string(k), anchor, a, Relation::ApproxEq, expect,
                                  1e-9 * expect, "integral of phi_k against 2^{-2 delta k^2} times that of phi_0"));
    res.rows.push_back(make_check("example2.ball-lp.k" + std::to_string(k), anchor, b, Relation::ApproxEq, lp.front(),
                                  1e-6 * lp.front(), "integral of phi_k^{1+delta} against the k = 2 value"));
  }
  res.data = {{"delta", delta},
              {"k_max", k_max},
              {"I", I0},
              {"I_power", I0p},
              {"eps", eps_list},
              {"J", J_list},
              {"ball_l1", l1},
              {"ball_lp", lp}};
  return res;
}

OscillationField parse_field(const std::string& spec) {
  Spec s;
  try {
    s = parse_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("field ") + e.what());
  }
  if (s.name == "log-recip") return log_recip_field(static_cast<int>(s.get("n", 2)));
  if (s.name == "inv-square") return inverse_square_field(static_cast<int>(s.get("n", 2)));
  if (s.name == "half-plane") return half_plane_field(static_cast<int>(s.get("n", 2)));
  if (s.name == "const") return constant_field(s.get("c", 1.0), static_cast<int>(s.get("n", 2)));
  if (s.name == "example1") return build_example1(s.get("p", 2.0), static_cast<int>(s.get("n_max", 6))).field;
  if (s.name == "example2") return build_example2(s.get("delta", 0.5), static_cast<int>(s.get("k_max", 0))).field;
  if (s.name == "table") return table_field(s.rest);
  throw ValidationError("unknown field '" + s.name + "'");
}

}  // namespace orliczlab
