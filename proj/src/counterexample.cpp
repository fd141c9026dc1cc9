#include "orliczlab/counterexample.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <sstream>

#include "orliczlab/numerics.hpp"

namespace orliczlab {

namespace {

const double kLn2 = std::log(2.0);

double log2_of(double log_value) { return log_value / kLn2; }

/// Smallest lambda with F_at(lambda) >= target, searched upward from lo.
double solve_F(const ExtremalProfile& p, double target, double lo, int level, const char* what) {
  double hi = std::max(2.0 * lo, lo + 1.0);
  while (p.F_at(std::min(hi, p.lambda_max())) < target) {
    if (hi >= p.lambda_max()) {
      std::ostringstream os;
      os << "level " << level << ": " << what << " lies below exp(-lambda_max); maximal feasible depth is " << level - 1;
      throw DepthError(os.str());
    }
    lo = hi;
    hi *= 16.0;
  }
  hi = std::min(hi, p.lambda_max());
  return solve_bracketed([&](double lam) { return p.F_at(lam) - target; }, lo, hi, 1e-15);
}

double energy_cap_lambda(const ExtremalProfile& p, double log_cap, double tol) {
  auto g = [&](double lam) { return std::log(p.energy_at(lam)) - log_cap; };
  if (g(0.0) <= 0.0) return 0.0;
  double lo = 0.0, hi = 1.0;
  while (g(hi) > 0.0) {
    lo = hi;
    hi *= 4.0;
    if (hi > p.lambda_max()) throw DepthError("energy cap unreachable below lambda_max");
  }
  double lam = solve_bracketed(g, lo, hi, tol);
  while (g(lam) > 0.0) lam = std::nextafter(lam, kInf) + tol * std::max(1.0, lam);
  return lam;
}

/// Nearest level-l lattice point and the distance to it.
double log_dist_to_lattice(const Eigen::VectorXd& x, int l) {
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double q = std::nearbyint(std::ldexp(x[i], l));
    const double d = x[i] - std::ldexp(q, -l);
    d2 += d * d;
  }
  return d2 == 0.0 ? -kInf : 0.5 * std::log(d2);
}

/// Integer offset from a level-p lattice point j to the nearest level-l point, in units of 2^{-p}.
double log_center_dist(const Eigen::VectorXi& j, int p, int l) {
  const long step = 1L << (p - l);
  double d2 = 0.0;
  for (Eigen::Index i = 0; i < j.size(); ++i) {
    const long a = j[i];
    long q = (2 * a + (a >= 0 ? step : -step)) / (2 * step);
    const double d = static_cast<double>(a - q * step);
    d2 += d * d;
  }
  return d2 == 0.0 ? -kInf : 0.5 * std::log(d2) - p * kLn2;
}

/// Triangle-inequality bound for the oscillation of f*_{p-1} over B(center, r_p).
double log_triangle_bound(const CounterexampleModel& m, const Eigen::VectorXi& j, int p) {
  const auto& prof = m.profile();
  const double log_rp = m.level(p).log_r;
  double acc = -kInf;
  for (int l = 1; l < p; ++l) {
    const auto& L = m.level(l);
    const double ld = log_center_dist(j, p, l);
    if (ld == -kInf) {
      if (log_rp <= L.log_rho) continue;
      acc = log_add_exp(acc, -l * kLn2);
      continue;
    }
    const double ratio = std::exp(log_rp - ld);
    if (ratio >= 1.0) {
      acc = log_add_exp(acc, -l * kLn2);
      continue;
    }
    const double log_lo = ld + std::log1p(-ratio);
    const double log_hi = ld + std::log1p(ratio);
    if (log_lo >= L.log_r || log_hi <= L.log_rho) continue;
    const double lam = -std::max(log_lo, L.log_rho);
    double lb = kLn2 + log_rp + lam + prof.log_s_abs_dF_at(lam);
    lb = std::min(lb, 0.0);
    acc = log_add_exp(acc, lb - l * kLn2);
  }
  return acc;
}

double sum_pow2(int from, int to) {
  double s = 0.0;
  for (int l = from; l <= to; ++l) s += std::ldexp(1.0, -l);
  return s;
}

/// Lower and upper bounds on the diameter of g(B^p_j).
struct Diameter {
  double lower = 0.0;
  double upper = 0.0;
};

Diameter ball_diameter(const CounterexampleModel& m, const Eigen::VectorXi& j, int p) {
  const int P = m.depth();
  const double tri = std::exp(log_triangle_bound(m, j, p));
  Diameter d;
  // f at the center minus f at a point of [rho*_p, r_p] outside the higher-level balls
  d.lower = sum_pow2(p, P) - 0.75 * std::ldexp(1.0, -p) - tri;
  const double osc_up = tri + sum_pow2(p, P);
  const double two_r = std::exp(kLn2 + m.level(p).log_r);
  d.upper = std::hypot(osc_up, two_r);
  return d;
}

std::vector<double> ball_sample(unsigned index, int k) {
  std::vector<double> u;
  for (unsigned i = index;; ++i) {
    auto h = halton(i + 1, k);
    double n2 = 0.0;
    for (auto& v : h) {
      v = 2.0 * v - 1.0;
      n2 += v * v;
    }
    if (n2 <= 1.0) return h;
  }
}

VerificationReport timed(VerificationReport r, std::chrono::steady_clock::time_point t0) {
  r.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

}  // namespace

double CounterexampleModel::level_profile(int l, double log_d) const {
  const auto& L = level(l);
  if (log_d >= L.log_r) return 0.0;
  if (log_d <= L.log_rho) return 1.0;
  return std::clamp(profile_.F_at(-log_d) - L.F_r, 0.0, 1.0);
}

double CounterexampleModel::f_level(int l, const Eigen::VectorXd& x) const {
  return level_profile(l, log_dist_to_lattice(x, l));
}

double CounterexampleModel::f_partial(const Eigen::VectorXd& x, int p) const {
  double f = 0.0;
  for (int l = 1; l <= p; ++l) f += std::ldexp(f_level(l, x), -l);
  return f;
}

std::vector<Eigen::VectorXi> CounterexampleModel::lattice_in_cube(int l) const {
  // coordinates j 2^{-l} inside [c - 1/2, c + 1/2)
  std::vector<int> lo(k_), hi(k_);
  for (int i = 0; i < k_; ++i) {
    lo[i] = static_cast<int>(std::ceil(std::ldexp(center_[i] - 0.5, l)));
    hi[i] = static_cast<int>(std::ceil(std::ldexp(center_[i] + 0.5, l))) - 1;
  }
  std::vector<Eigen::VectorXi> out;
  Eigen::VectorXi j(k_);
  for (int i = 0; i < k_; ++i) j[i] = lo[i];
  while (true) {
    out.push_back(j);
    int i = 0;
    while (i < k_ && ++j[i] > hi[i]) {
      j[i] = lo[i];
      ++i;
    }
    if (i == k_) break;
  }
  return out;
}

CounterexampleModel build_sequences(const std::string& phi_spec, int k, const CounterexampleOptions& opts) {
  if (k < 2) throw PreconditionError("build_sequences: k must be at least 2");
  if (opts.depth < 1) throw PreconditionError("build_sequences: depth must be at least 1");
  CounterexampleModel m;
  m.k_ = k;
  m.phi_spec_ = phi_spec;
  m.phi_ = parse_gauge(phi_spec);
  m.phi_star_ = shift_normalize(m.phi_, k);
  m.lambda_max_ = opts.lambda_max;
  ProfileOptions po;
  po.lambda_max = opts.lambda_max;
  po.rescale = true;
  m.profile_ = build_profile(m.phi_star_, k, po);
  m.center_ = Eigen::VectorXd::Constant(k, 0.5 + opts.center_offset);

  const auto& prof = m.profile_;
  for (int l = 1; l <= opts.depth; ++l) {
    Level L;
    L.l = l;
    L.lambda_energy = energy_cap_lambda(prof, -l * k * kLn2, opts.bisection_tol);
    double lam = L.lambda_energy;
    L.active = "energy";
    auto raise = [&](double cap, const char* name) {
      if (cap >= lam) {
        lam = cap;
        L.active = name;
      }
    };
    if (l == 1) {
      L.lambda_rho_cap = 2.0 * kLn2;
      raise(L.lambda_rho_cap, "r1");
    } else {
      const auto& prev = m.levels_.back();
      const double lam_rho = -prev.log_rho;
      L.lambda_rho_cap = lam_rho;
      L.lambda_gap_cap = 2.0 * l * kLn2 - prev.log_gap;
      L.lambda_slope_cap = (l + 2) * kLn2 + std::log(l - 1.0) + lam_rho + prof.log_s_abs_dF_at(lam_rho);
      raise(L.lambda_rho_cap, "rho");
      raise(L.lambda_gap_cap, "gap");
      raise(L.lambda_slope_cap, "slope");
      const double gap_rhs = 2.0 * l * kLn2 - std::log1p(-std::exp(prev.log_rho - prev.log_rho_star));
      const double slope_rhs = (l + 2) * kLn2 + std::log(l - 1.0) + prof.log_s_abs_dF_at(lam_rho);
      while (lam - lam_rho < slope_rhs || lam + prev.log_rho_star < gap_rhs) lam = std::nextafter(lam, kInf);
    }
    if (lam > prof.lambda_max()) {
      std::ostringstream os;
      os << "level " << l << " needs log(1/r) = " << lam << " beyond lambda_max; maximal feasible depth is " << l - 1;
      throw DepthError(os.str());
    }
    L.log_r = -lam;
    L.F_r = prof.F_at(lam);
    const double lam_star = solve_F(prof, L.F_r + 0.75, lam, l, "rho*");
    const double lam_rho = solve_F(prof, L.F_r + 1.0, lam_star, l, "rho");
    L.log_rho = -lam_rho;
    L.log_rho_star = -lam_star;
    L.F_rho = prof.F_at(lam_rho);
    L.F_rho_star = prof.F_at(lam_star);
    L.log_abs_dF_rho = prof.log_abs_dF_at(lam_rho);
    L.energy = prof.energy_at(lam);
    L.log_gap = -lam_star + std::log1p(-std::exp(-(lam_rho - lam_star)));
    m.levels_.push_back(L);
  }
  return m;
}

ConstructionValue eval_construction(const CounterexampleModel& model, const Eigen::VectorXd& x, double y) {
  if (x.size() != model.k()) throw PreconditionError("eval_construction: dimension mismatch");
  ConstructionValue v;
  v.f = model.f_partial(x, model.depth());
  v.g.resize(x.size() + 1);
  v.g << x, v.f;
  v.H.resize(x.size() + 1);
  v.H << x, y + v.f;
  return v;
}

ReportList check_invariants(const CounterexampleModel& model) {
  ReportList out;
  const auto& prof = model.profile();
  const int k = model.k(), P = model.depth();
  const std::string anchor = "counterexample:invariants";
  for (int l = 1; l <= P; ++l) {
    const auto& L = model.level(l);
    const std::string id = "counterexample.level" + std::to_string(l);
    const double lam_r = -L.log_r, lam_star = -L.log_rho_star, lam_rho = -L.log_rho;
    out.push_back(make_check(id + ".rho-star-inside-r", anchor, lam_star - lam_r, Relation::GreaterEq, 0.0, 0.0));
    out.push_back(make_check(id + ".rho-inside-rho-star", anchor, lam_rho - lam_star, Relation::GreaterEq, 0.0, 0.0));
    out.push_back(make_check(id + ".rho-equation", anchor, L.F_rho - L.F_r, Relation::ApproxEq, 1.0, 1e-10));
    out.push_back(make_check(id + ".rho-star-equation", anchor, L.F_rho_star - L.F_r, Relation::ApproxEq, 0.75, 1e-10));
    {
      auto r = make_check(id + ".energy-cap", anchor, log2_of(std::log(prof.energy_at(lam_r))), Relation::LessEq,
                          -static_cast<double>(l * k), 0.0, "base-2 logarithms");
      r.slack.push_back({"energy", prof.energy_at(lam_r)});
      out.push_back(r);
    }
    if (l == 1) {
      out.push_back(make_check(id + ".radius-cap", anchor, L.log_r / kLn2, Relation::LessEq, -2.0, 0.0,
                               "base-2 logarithms"));
      continue;
    }
    const auto& Q = model.level(l - 1);
    const double q_rho = -Q.log_rho, q_star = -Q.log_rho_star;
    out.push_back(make_check(id + ".cap-rho", anchor, lam_r - q_rho, Relation::GreaterEq, 0.0, 0.0,
                             "log(1/r_l) - log(1/rho_{l-1})"));
    out.push_back(make_check(id + ".cap-gap", anchor, lam_r - q_star, Relation::GreaterEq,
                             2.0 * l * kLn2 - std::log1p(-std::exp(-(q_rho - q_star))), 0.0,
                             "log(1/r_l) - log(1/rho*_{l-1})"));
    out.push_back(make_check(id + ".cap-slope", anchor, lam_r - q_rho, Relation::GreaterEq,
                             (l + 2) * kLn2 + std::log(l - 1.0) + prof.log_s_abs_dF_at(q_rho), 0.0,
                             "log(1/r_l) - log(1/rho_{l-1})"));
    out.push_back(make_check(id + ".gap-decreasing", anchor, L.log_gap, Relation::LessEq, Q.log_gap, 0.0,
                             "natural logarithms"));
    out.push_back(make_check(id + ".disjoint", anchor, (kLn2 + L.log_r) / kLn2, Relation::LessEq,
                             -static_cast<double>(l), 0.0, "log2(2 r_l) against log2(2^{-l})"));
  }
  // measure of the union of balls from level m on, inside the unit cube
  const double omega = unit_ball_volume(k);
  for (int mlev = 1; mlev <= P; ++mlev) {
    double s = 0.0;
    for (int l = mlev; l <= P; ++l) s += omega * std::exp(l * k * kLn2 + k * model.level(l).log_r);
    const double tail = omega * std::ldexp(1.0, -(P + 1) * k) / (1.0 - std::ldexp(1.0, -k));
    auto r = make_check("counterexample.measure.from-level" + std::to_string(mlev), anchor, s + tail,
                        Relation::LessEq, omega * std::ldexp(1.0, -k * (mlev - 1)) / (std::ldexp(1.0, k) - 1.0), 0.0);
    r.slack.push_back({"levels-beyond-depth", tail});
    out.push_back(r);
  }
  // sampled values, Lipschitz ratio and the shear Jacobian
  {
    double fmin = kInf, fmax = -kInf, ratio = 0.0, det_err = 0.0;
    const int n = 512;
    const double step = 1e-4, fd = 1e-6;
    for (int i = 0; i < n; ++i) {
      auto h = halton(static_cast<unsigned>(i + 1), k);
      auto u = halton(static_cast<unsigned>(i + 1 + n), k);
      Eigen::VectorXd x(k), x2(k);
      for (int c = 0; c < k; ++c) {
        x[c] = model.cube_center()[c] - 0.5 + h[c];
        x2[c] = x[c] + step * (2.0 * u[c] - 1.0);
      }
      const double f1 = model.f_partial(x, P), f2 = model.f_partial(x2, P);
      fmin = std::min(fmin, f1);
      fmax = std::max(fmax, f1);
      ratio = std::max(ratio, std::abs(f1 - f2) / (x - x2).norm());
      const double y = 0.25;
      Eigen::MatrixXd J(k + 1, k + 1);
      const auto H0 = eval_construction(model, x, y).H;
      for (int c = 0; c <= k; ++c) {
        Eigen::VectorXd xc = x;
        double yc = y;
        (c < k ? xc[c] : yc) += fd;
        J.col(c) = (eval_construction(model, xc, yc).H - H0) / fd;
      }
      det_err = std::max(det_err, std::abs(J.determinant() - 1.0));
    }
    double lip = 0.0;
    for (int l = 1; l <= P; ++l) lip += std::ldexp(std::exp(model.level(l).log_abs_dF_rho), -l);
    auto r1 = make_check("counterexample.f-lower", anchor, fmin, Relation::GreaterEq, 0.0, 0.0);
    auto r2 = make_check("counterexample.f-upper", anchor, fmax, Relation::LessEq, 1.0, 0.0);
    auto r3 = make_check("counterexample.lipschitz", anchor, ratio, Relation::LessEq, lip, 0.0,
                         "sampled difference quotients against sum 2^{-l}|F'(rho_l)|");
    auto r4 = make_check("counterexample.shear-jacobian", anchor, det_err, Relation::LessEq, 1e-6, 0.0,
                         "finite-difference determinant of H minus 1");
    for (auto* r : {&r1, &r2, &r3, &r4}) {
      r->samples = n;
      out.push_back(*r);
    }
  }
  return out;
}

ReportList check_oscillation(const CounterexampleModel& model, int p, int sample_balls) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string anchor = "counterexample:oscillation";
  const std::string id = "counterexample.osc.p" + std::to_string(p);
  if (p < 2) throw PreconditionError("check_oscillation: p must be at least 2");
  if (p > model.depth())
    return {inconclusive(id, anchor, "level beyond the model depth; requires depth >= " + std::to_string(p))};
  const int k = model.k();
  const auto& prof = model.profile();
  const auto balls = model.lattice_in_cube(p);
  const auto& Lp = model.level(p);
  const auto& Lq = model.level(p - 1);
  ReportList out;

  double worst = -kInf;
  for (const auto& j : balls) worst = std::max(worst, log_triangle_bound(model, j, p));
  {
    auto r = make_check(id + ".triangle", anchor, log2_of(worst), Relation::LessEq, -(p + 2.0), 0.0,
                        "log2 of the largest per-ball bound");
    r.samples = static_cast<long>(balls.size());
    out.push_back(timed(r, t0));
  }
  {
    const double lhs = log2_of(Lp.log_r + std::log(p - 1.0) - Lq.log_rho + prof.log_s_abs_dF_at(-Lq.log_rho));
    out.push_back(timed(make_check(id + ".chain", anchor, lhs, Relation::LessEq, -(p + 2.0), 0.0,
                                   "log2(r_p (p-1) |F'(rho_{p-1})|)"),
                        t0));
  }
  {
    const int per_ball = 4096;
    const int nb = std::min<int>(sample_balls, static_cast<int>(balls.size()));
    const std::size_t stride = std::max<std::size_t>(1, balls.size() / static_cast<std::size_t>(std::max(nb, 1)));
    const double rp = std::exp(Lp.log_r);
    double osc = 0.0;
    long distinct = 0, samples = 0;
    for (int b = 0; b < nb; ++b) {
      const auto& j = balls[static_cast<std::size_t>(b) * stride];
      Eigen::VectorXd c(k);
      for (int i = 0; i < k; ++i) c[i] = std::ldexp(static_cast<double>(j[i]), -p);
      double lo = model.f_partial(c, p - 1), hi = lo;
      for (int s = 0; s < per_ball; ++s) {
        const auto u = ball_sample(static_cast<unsigned>(s) * 3u, k);
        Eigen::VectorXd x = c;
        for (int i = 0; i < k; ++i) x[i] += rp * u[i];
        if (x != c) ++distinct;
        const double f = model.f_partial(x, p - 1);
        lo = std::min(lo, f);
        hi = std::max(hi, f);
      }
      samples += per_ball + 1;
      osc = std::max(osc, hi - lo);
    }
    std::string note = "sampled maximum over " + std::to_string(nb) + " balls";
    if (distinct == 0) note += "; ball radius below double resolution, samples coincide with the center";
    auto r = make_check(id + ".sampled", anchor, osc, Relation::LessEq, std::ldexp(1.0, -(p + 2)), 0.0, note);
    r.samples = samples;
    out.push_back(timed(r, t0));
  }
  {
    const double range = model.level_profile(p, -kInf) - model.level_profile(p, Lp.log_r);
    out.push_back(timed(make_check(id + ".cap-range", anchor, range, Relation::ApproxEq, 1.0, 1e-12,
                                   "F_p at the center minus F_p on the sphere"),
                        t0));
  }
  return out;
}

ReportList check_diameter(const CounterexampleModel& model, int p) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string anchor = "counterexample:diameter";
  const std::string id = "counterexample.diam.p" + std::to_string(p);
  if (p < 2) throw PreconditionError("check_diameter: p must be at least 2");
  const int P = model.depth();
  if (p > P) return {inconclusive(id, anchor, "requires depth >= " + std::to_string(p))};
  ReportList out;

  // higher-level balls meeting the radial segment [rho*_p, r_p] through the center
  const auto& Lp = model.level(p);
  double log_excl = -kInf;
  for (int l = p + 1; l <= P; ++l) {
    const double count = std::exp(kLn2 + Lp.log_r + l * kLn2) + 1.0;
    log_excl = log_add_exp(log_excl, std::log(count) + kLn2 + model.level(l).log_r);
  }
  const double log_room = Lp.log_r + std::log1p(-std::exp(Lp.log_rho_star - Lp.log_r));
  out.push_back(make_check(id + ".exclusion-length", anchor, log_excl, Relation::LessEq, log_room, 0.0,
                           "natural logarithms of lengths"));

  const auto balls = model.lattice_in_cube(p);
  double lower = kInf, upper = 0.0;
  for (const auto& j : balls) {
    const auto d = ball_diameter(model, j, p);
    lower = std::min(lower, d.lower);
    upper = std::max(upper, d.upper);
  }
  const double tail = std::ldexp(1.0, -P);
  const double rhs = std::ldexp(1.0, -(p + 1));
  auto r = make_check(id + ".lower", anchor, lower, Relation::GreaterEq, rhs, 0.0);
  r.slack.push_back({"tail", tail});
  r.samples = static_cast<long>(balls.size());
  if (r.status == Status::Fail && lower + tail >= rhs) {
    r.status = Status::Inconclusive;
    r.note = "truncation slack decides; requires depth >= " + std::to_string(p + 1);
  }
  out.push_back(timed(r, t0));
  auto u = make_check(id + ".upper", anchor, upper, Relation::LessEq, std::ldexp(8.0, -p), 0.0);
  u.samples = static_cast<long>(balls.size());
  out.push_back(timed(u, t0));
  return out;
}

ReportList energy_budget(const CounterexampleModel& model) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string anchor = "counterexample:energy";
  const auto& prof = model.profile();
  const int k = model.k(), P = model.depth();
  ReportList out;
  double agg = 0.0;
  for (int l = 1; l <= P; ++l) {
    const auto& L = model.level(l);
    // the unit cube is a union of 2^{lk} lattice cells, one ball each
    const double per_ball = prof.energy_at(-L.log_r) - prof.energy_at(-L.log_rho);
    const double total = std::ldexp(per_ball, l * k);
    auto r = make_check("counterexample.energy.level" + std::to_string(l), anchor, total, Relation::LessEq, 1.0, 0.0);
    r.slack.push_back({"per-ball", per_ball});
    out.push_back(timed(r, t0));
    agg += std::ldexp(total, -l);
  }
  const double tail = std::ldexp(1.0, -P);
  auto r = make_check("counterexample.energy.f", anchor, agg + tail, Relation::LessEq, 1.0, 0.0,
                      "discrete Jensen over the levels");
  r.slack.push_back({"levels-beyond-depth", tail});
  out.push_back(timed(r, t0));
  const double base = model.phi()(std::sqrt(static_cast<double>(k)));
  auto g = make_check("counterexample.energy.g", anchor, base + agg + tail, Relation::LessEq,
                      1.0 + model.phi()(static_cast<double>(k)), 0.0, "phi(sqrt k) plus the shifted-gauge energy");
  g.slack.push_back({"levels-beyond-depth", tail});
  out.push_back(timed(g, t0));
  return out;
}

ReportList hausdorff_lower(const CounterexampleModel& model, int scale_level) {
  const auto t0 = std::chrono::steady_clock::now();
  const std::string anchor = "counterexample:hausdorff";
  const std::string id = "counterexample.hausdorff.l" + std::to_string(scale_level);
  const int k = model.k();
  if (scale_level < 1 || scale_level > model.depth())
    return {inconclusive(id, anchor, "scale level outside 1..depth")};
  const int l = scale_level;
  const auto balls = model.lattice_in_cube(l);
  double sum = 0.0;
  std::vector<double> up(balls.size());
  for (std::size_t b = 0; b < balls.size(); ++b) {
    const auto d = ball_diameter(model, balls[b], l);
    sum += std::pow(std::max(d.lower, 0.0), k);
    up[b] = d.upper;
  }
  ReportList out;
  auto r = make_check(id + ".lower", anchor, std::ldexp(sum, -4 * k), Relation::GreaterEq, std::ldexp(1.0, -5 * k), 0.0,
                      "2^{-4k} sum of ball image diameters to the power k");
  r.samples = static_cast<long>(balls.size());
  if (r.status == Status::Fail) {
    // each truncated ball image loses at most the levels beyond the depth
    const double tail = std::ldexp(1.0, -model.depth());
    double with_tail = 0.0;
    for (const auto& j : balls) with_tail += std::pow(std::max(ball_diameter(model, j, l).lower, 0.0) + tail, k);
    r.slack.push_back({"tail", tail});
    if (std::ldexp(with_tail, -4 * k) >= r.rhs) {
      r.status = Status::Inconclusive;
      r.note = "truncation slack decides; requires depth >= " + std::to_string(l + 1);
    }
  }
  out.push_back(timed(r, t0));
  // balls centered in a corner sub-cube of edge 2^{-m}
  for (int m = 1; m <= l; ++m) {
    const auto& lo = balls.front();
    const long side = 1L << (l - m);
    double s = 0.0;
    long n = 0;
    for (std::size_t b = 0; b < balls.size(); ++b) {
      bool inside = true;
      for (int i = 0; i < k; ++i) inside = inside && balls[b][i] - lo[i] < side;
      if (!inside) continue;
      s += std::pow(up[b], k);
      ++n;
    }
    auto c = make_check(id + ".cover-edge" + std::to_string(m), anchor, s, Relation::LessEq,
                        std::ldexp(1.0, 3 * k - m * k), 0.0);
    c.samples = n;
    out.push_back(timed(c, t0));
  }
  return out;
}

nlohmann::json CounterexampleModel::to_json() const {
  nlohmann::json j;
  j["phi"] = phi_spec_;
  j["phi_star"] = phi_star_.description();
  j["k"] = k_;
  j["depth"] = depth();
  j["lambda_max"] = lambda_max_;
  j["cube_center"] = std::vector<double>(center_.data(), center_.data() + center_.size());
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& L : levels_) {
    lv.push_back({{"l", L.l},
                  {"log_r", L.log_r},
                  {"log_rho", L.log_rho},
                  {"log_rho_star", L.log_rho_star},
                  {"F_r", L.F_r},
                  {"F_rho", L.F_rho},
                  {"F_rho_star", L.F_rho_star},
                  {"log_abs_dF_rho", L.log_abs_dF_rho},
                  {"energy", L.energy},
                  {"lambda_energy", L.lambda_energy},
                  {"lambda_rho_cap", L.lambda_rho_cap},
                  {"lambda_gap_cap", L.lambda_gap_cap},
                  {"lambda_slope_cap", L.lambda_slope_cap},
                  {"active_cap", L.active},
                  {"log_gap", L.log_gap}});
  }
  j["levels"] = lv;
  j["profile"] = profile_.to_json();
  return j;
}

CounterexampleModel model_from_json(const nlohmann::json& j) {
  CounterexampleOptions o;
  o.depth = j.at("depth").get<int>();
  o.lambda_max = j.at("lambda_max").get<double>();
  const auto c = j.at("cube_center").get<std::vector<double>>();
  if (c.empty()) throw ValidationError("model json: empty cube_center");
  o.center_offset = c[0] - 0.5;
  auto m = build_sequences(j.at("phi").get<std::string>(), j.at("k").get<int>(), o);
  const auto& stored = j.at("levels");
  if (stored.size() != m.levels().size()) throw ValidationError("model json: level count mismatch");
  for (std::size_t i = 0; i < stored.size(); ++i) {
    const double a = stored[i].at("log_r").get<double>(), b = m.levels()[i].log_r;
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(b)))
      throw ValidationError("model json: stored radii disagree with the rebuilt sequences at level " +
                            std::to_string(i + 1));
  }
  return m;
}

}  // namespace orliczlab
