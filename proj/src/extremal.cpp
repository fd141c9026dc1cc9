#include "orliczlab/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

// cubic_hermite.hpp in Boost 1.74 calls isnan unqualified
namespace boost::math::interpolators { using std::isnan; }
#include <boost/math/interpolators/cubic_hermite.hpp>

#include "orliczlab/numerics.hpp"

namespace orliczlab {

namespace {

constexpr int kNodes = 16;
constexpr double kV0 = -30.0;
constexpr double kResolvedV = 1e12;

const std::pair<std::vector<double>, std::vector<double>>& unit_rule() {
  static const auto rule = [] {
    std::pair<std::vector<double>, std::vector<double>> nw;
    gauss_legendre(kNodes, 0.0, 1.0, nw.first, nw.second);
    return nw;
  }();
  return rule;
}

}  // namespace

struct ExtremalProfile::Tables {
  std::vector<double> v, y, dy, log_psi;
  std::unique_ptr<boost::math::interpolators::cubic_hermite<std::vector<double>>> spline;
  // panels in kappa = log(1/s); node values store m = log((h - h(1)) s)
  std::vector<double> kb, kn, kw, m;
  std::vector<double> f_raw;
  std::vector<double> e_cum;
  double tail_m = 0.0;
};

double ExtremalProfile::log_g_v(double v) const {
  const double L = softplus(v);
  return (L - phi_.log_at_log(L)) / (k_ - 1);
}

double ExtremalProfile::log_gt_v(double v) const {
  if (v > 37.0) return (k_ * v - phi_.log_at_log(v)) / (k_ - 1);
  return log_g_v(v) + v;
}

double ExtremalProfile::y_at(double v) const {
  const auto& t = *tab_;
  if (v < t.v.front()) {
    return log_integrate([this](double w) { return log_gt_v(w); }, v - 40.0, v).value;
  }
  if (v > t.v.back()) throw DepthError("argument beyond the tabulated range of Big Phi");
  return (*t.spline)(v);
}

double ExtremalProfile::log_psi_v(double v) const { return log_g_v(v) - y_at(v); }

double ExtremalProfile::solve_v(double lambda) const {
  const auto& t = *tab_;
  const double target = -lambda;
  if (target < t.log_psi.back()) throw DepthError("radius below the tabulated range");
  auto f = [&](double v) { return log_psi_v(v) - target; };
  // log_psi is decreasing along the nodes
  auto it = std::lower_bound(t.log_psi.begin(), t.log_psi.end(), target, std::greater<double>());
  if (it == t.log_psi.end()) return t.v.back();
  const std::size_t i = static_cast<std::size_t>(it - t.log_psi.begin());
  if (i == 0) {
    const double lo = t.v.front() - 60.0;
    if (f(lo) < 0.0) throw DepthError("argument too large for the tabulated range");
    return solve_bracketed(f, lo, t.v.front(), 1e-15);
  }
  return solve_bracketed(f, t.v[i - 1], t.v[i], 1e-15);
}

double ExtremalProfile::reduced_at(double lambda) const {
  if (lambda > lambda_max_) throw DepthError("radius below exp(-lambda_max)");
  if (lambda < 100.0) return lambda - softplus(solve_v(lambda));
  // with L = log h = lambda - D large, Psi(h) = s reads D = y(L) - log(g(e^L) e^L)
  auto f = [&](double D) { return D - y_at(lambda - D) + log_gt_v(lambda - D); };
  const double D0 = y_at(lambda) - log_gt_v(lambda);
  double lo = D0 - 1.0, hi = D0 + 1.0;
  for (int i = 0; i < 60 && f(lo) > 0.0; ++i) lo -= 2.0 * (D0 - lo);
  for (int i = 0; i < 60 && f(hi) < 0.0; ++i) hi += 2.0 * (hi - D0);
  if (lambda - hi < 40.0) return lambda - softplus(solve_v(lambda));
  return solve_bracketed(f, lo, hi, 1e-15);
}

double ExtremalProfile::m_at(double lambda) const {
  return log_sub_exp(-reduced_at(lambda), log_h1_ - lambda);
}

double ExtremalProfile::log_energy_density(double m, double kappa, double lc) const {
  if (m == -kInf) return -kInf;
  // log phi(|F'|) - k kappa written through k A - log phi(e^A) to avoid cancellation
  const double A = m + kappa - lc;
  return -(k_ * A - phi_.log_at_log(A)) + k_ * (m - lc);
}

ExtremalProfile ExtremalProfile::build(const OrliczFunction& phi, int k, const ProfileOptions& opts) {
  if (k < 2) throw PreconditionError("build_profile: k must be at least 2");
  if (!phi.convex() || !phi.zero_at_zero()) throw PreconditionError("build_profile: gauge must be convex with phi(0) = 0");
  auto verdict = calderon_condition(phi, k, opts.classifier);
  if (verdict.classification != Classification::Divergent)
    throw PreconditionError("build_profile: Calderon integral is " + to_string(verdict.classification) +
                            ", the construction needs a divergent one");

  ExtremalProfile p;
  p.phi_ = phi;
  p.k_ = k;
  p.lambda_max_ = opts.lambda_max;
  p.sigma_ = unit_sphere_area(k);
  auto tab = std::make_shared<Tables>();

  // y = log Big Phi(1 + e^v); each panel is integrated in log(V - v) so the mass
  // piling up at the right end stays resolved when Big Phi grows like a power
  auto logf = [&p](double w) { return p.log_gt_v(w); };
  std::vector<double> vs, ys, dys;
  for (double v = kV0; v < 2.0 - 1e-12; v += 0.02) vs.push_back(v);
  for (double v = 2.0; v < opts.lambda_max + 1.0; v *= 1.005) vs.push_back(v);
  vs.push_back(opts.lambda_max + 1.0);
  ys.resize(vs.size());
  dys.resize(vs.size());
  ys[0] = log_integrate(logf, kV0 - 40.0, kV0).value;
  for (std::size_t i = 1; i < vs.size(); ++i) {
    const double V = vs[i], dv = V - vs[i - 1];
    // the log-integrand is only known to a few ulps of its size
    const double tol = std::max(opts.quadrature_tolerance, 1e-14 * std::abs(logf(V)));
    auto q = dv <= 1.0 ? log_integrate(logf, vs[i - 1], V, tol)
                       : log_integrate([&](double z) { return logf(V - std::exp(z)) + z; }, std::log(dv) - 36.0,
                                       std::log(dv), tol);
    if (!std::isfinite(q.value)) {
      // once ulp(v) is no longer small against the scale of log g, panels
      // turn into staircases; keep the part of the table that was resolved
      if (V < kResolvedV) throw NumericalError("Big Phi: panel quadrature failed near v = " + std::to_string(V));
      vs.resize(i);
      ys.resize(i);
      dys.resize(i);
      break;
    }
    ys[i] = log_add_exp(ys[i - 1], q.value);
  }
  for (std::size_t i = 0; i < vs.size(); ++i) dys[i] = std::exp(logf(vs[i]) - ys[i]);
  tab->v = vs;
  tab->y = ys;
  tab->dy = dys;
  tab->spline = std::make_unique<boost::math::interpolators::cubic_hermite<std::vector<double>>>(
      std::move(vs), std::move(ys), std::move(dys));
  tab->log_psi.resize(tab->v.size());
  for (std::size_t i = 0; i < tab->v.size(); ++i) tab->log_psi[i] = p.log_g_v(tab->v[i]) - tab->y[i];
  for (std::size_t i = 1; i < tab->log_psi.size(); ++i)
    if (!(tab->log_psi[i] < tab->log_psi[i - 1])) throw NumericalError("Psi is not decreasing on the grid");
  p.tab_ = tab;
  p.lambda_max_ = std::min({p.lambda_max_, tab->v.back() - 1.0, -tab->log_psi.back()});

  p.log_h1_ = softplus(p.solve_v(0.0));
  p.h1_ = std::exp(p.log_h1_);

  auto& t = *tab;
  for (double kappa = 0.0; kappa < 40.0 - 1e-12; kappa += 0.125) t.kb.push_back(kappa);
  for (double kappa = 40.0; kappa < p.lambda_max_; kappa *= 1.05) t.kb.push_back(kappa);
  if (t.kb.back() > p.lambda_max_) t.kb.back() = p.lambda_max_;
  else t.kb.push_back(p.lambda_max_);
  const auto& [un, uw] = unit_rule();
  t.f_raw.assign(t.kb.size(), 0.0);
  for (std::size_t j = 0; j + 1 < t.kb.size(); ++j) {
    const double a = t.kb[j], w = t.kb[j + 1] - a;
    double sum = 0.0;
    for (int i = 0; i < kNodes; ++i) {
      const double kappa = a + w * un[i];
      const double m = p.m_at(kappa);
      t.kn.push_back(kappa);
      t.kw.push_back(w * uw[i]);
      t.m.push_back(m);
      sum += w * uw[i] * std::exp(m);
    }
    t.f_raw[j + 1] = t.f_raw[j] + sum;
  }
  t.tail_m = p.m_at(p.lambda_max_);

  p.raw_energy_ = p.energy_with_scale(1.0);
  if (opts.rescale && p.raw_energy_ > 1.0) {
    double lo = 0.0, hi = 1.0;
    while (p.energy_with_scale(std::exp(hi)) > 1.0) {
      lo = hi;
      hi *= 2.0;
      if (hi > 700.0) throw NumericalError("rescale: energy does not fall below 1");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
      const double mid = 0.5 * (lo + hi);
      (p.energy_with_scale(std::exp(mid)) > 1.0 ? lo : hi) = mid;
    }
    p.scale_ = std::exp(hi);
  }

  t.e_cum.assign(t.kb.size(), 0.0);
  t.e_cum.back() = p.tail_energy(p.scale_);
  for (std::size_t j = t.kb.size() - 1; j-- > 0;) t.e_cum[j] = t.e_cum[j + 1] + p.panel_energy(j, p.scale_);
  return p;
}

double ExtremalProfile::panel_energy(std::size_t j, double c) const {
  const auto& t = *tab_;
  const double lc = std::log(c);
  double sum = 0.0;
  for (std::size_t i = j * kNodes; i < (j + 1) * kNodes; ++i)
    sum += t.kw[i] * std::exp(log_energy_density(t.m[i], t.kn[i], lc));
  return sum;
}

double ExtremalProfile::tail_energy(double c) const {
  const auto& t = *tab_;
  const double lc = std::log(c);
  // power-law extrapolation of the integrand in kappa, fitted on the last two panels
  const std::size_t n = t.kn.size();
  std::vector<double> xs, ys;
  for (std::size_t i = n - 2 * kNodes; i < n; ++i) {
    const double lf = log_energy_density(t.m[i], t.kn[i], lc);
    if (!std::isfinite(lf)) continue;
    xs.push_back(std::log(t.kn[i]));
    ys.push_back(lf);
  }
  const double L = lambda_max_;
  const double lf = log_energy_density(t.tail_m, L, lc);
  if (xs.size() < 4 || lf == -kInf) return 0.0;
  const double a = fit_slope(xs, ys);
  if (!(a < -1.0)) return kInf;
  return L * std::exp(lf) / (-a - 1.0);
}

double ExtremalProfile::energy_with_scale(double c) const {
  double sum = tail_energy(c);
  for (std::size_t j = tab_->kb.size() - 1; j-- > 0;) sum += panel_energy(j, c);
  return sigma_ * sum;
}

double ExtremalProfile::big_phi(double t) const { return std::exp(log_big_phi(t)); }

double ExtremalProfile::log_big_phi(double t) const {
  if (!(t >= 1.0)) throw PreconditionError("Big Phi is defined for t >= 1");
  if (t == 1.0) return -kInf;
  return y_at(std::log(t - 1.0));
}

double ExtremalProfile::psi(double t) const {
  if (!(t > 1.0)) throw PreconditionError("Psi is defined for t > 1");
  return std::exp(log_psi_v(std::log(t - 1.0)));
}

double ExtremalProfile::h(double s) const {
  if (!(s > 0.0)) throw PreconditionError("h is defined for s > 0");
  return std::exp(log_h_at(-std::log(s)));
}

double ExtremalProfile::log_h_at(double lambda) const { return lambda - reduced_at(lambda); }

double ExtremalProfile::F_at(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  if (lambda > lambda_max_) throw DepthError("radius below exp(-lambda_max)");
  const auto& t = *tab_;
  auto it = std::upper_bound(t.kb.begin(), t.kb.end(), lambda);
  const std::size_t j = static_cast<std::size_t>(it - t.kb.begin()) - 1;
  double sum = t.f_raw[j];
  const double a = t.kb[j], w = lambda - a;
  if (w > 0.0) {
    const auto& [un, uw] = unit_rule();
    for (int i = 0; i < kNodes; ++i) {
      const double kappa = a + w * un[i];
      sum += w * uw[i] * std::exp(m_at(kappa));
    }
  }
  return sum / scale_;
}

double ExtremalProfile::F(double t) const {
  if (t >= 1.0) return 0.0;
  if (!(t > 0.0)) throw PreconditionError("F: t must be positive");
  return F_at(-std::log(t));
}

double ExtremalProfile::h_integral_at(double lambda) const {
  if (lambda <= 0.0) return 0.0;
  return scale_ * F_at(lambda) - h1_ * std::expm1(-lambda);
}

double ExtremalProfile::log_abs_dF_at(double lambda) const {
  if (lambda <= 0.0) return -kInf;
  return m_at(lambda) + lambda - std::log(scale_);
}

double ExtremalProfile::log_s_abs_dF_at(double lambda) const {
  if (lambda <= 0.0) return -kInf;
  return m_at(lambda) - std::log(scale_);
}

double ExtremalProfile::dF(double t) const {
  if (t >= 1.0) return 0.0;
  if (!(t > 0.0)) throw PreconditionError("F': t must be positive");
  return -std::exp(log_abs_dF_at(-std::log(t)));
}

double ExtremalProfile::energy_at(double lambda) const {
  const auto& t = *tab_;
  lambda = std::max(lambda, 0.0);
  if (lambda > lambda_max_) throw DepthError("radius below exp(-lambda_max)");
  auto it = std::upper_bound(t.kb.begin(), t.kb.end(), lambda);
  if (it == t.kb.end()) return sigma_ * t.e_cum.back();
  const std::size_t j = static_cast<std::size_t>(it - t.kb.begin());
  double sum = t.e_cum[j];
  const double a = lambda, w = t.kb[j] - lambda;
  if (w > 0.0) {
    const auto& [un, uw] = unit_rule();
    const double lc = std::log(scale_);
    for (int i = 0; i < kNodes; ++i) {
      const double kappa = a + w * un[i];
      sum += w * uw[i] * std::exp(log_energy_density(m_at(kappa), kappa, lc));
    }
  }
  return sigma_ * sum;
}

nlohmann::json ExtremalProfile::to_json() const {
  const auto& t = *tab_;
  nlohmann::json j;
  j["phi"] = phi_.description();
  j["k"] = k_;
  j["lambda_max"] = lambda_max_;
  j["scale"] = scale_;
  j["raw_energy"] = number(raw_energy_);
  j["total_energy"] = number(total_energy());
  j["h1"] = h1_;
  nlohmann::json big;
  big["v"] = t.v;
  big["log_big_phi"] = t.y;
  big["log_psi"] = t.log_psi;
  j["big_phi_table"] = big;
  std::vector<double> red, f, e;
  for (std::size_t i = 0; i < t.kb.size(); ++i) {
    red.push_back(reduced_at(t.kb[i]));
    f.push_back(t.f_raw[i] / scale_);
    e.push_back(sigma_ * t.e_cum[i]);
  }
  nlohmann::json radial;
  radial["lambda"] = t.kb;
  radial["log_inv_sh"] = red;
  radial["F"] = f;
  radial["energy"] = e;
  j["radial_table"] = radial;
  return j;
}

ExtremalProfile build_profile(const OrliczFunction& phi, int k, const ProfileOptions& opts) {
  return ExtremalProfile::build(phi, k, opts);
}

ReportList verify_calderon_pair(const ExtremalProfile& profile, double s_min) {
  if (!(s_min > 0.0 && s_min < 1.0)) throw PreconditionError("verify_calderon_pair: s_min must lie in (0, 1)");
  if (-std::log(s_min) > profile.lambda_max()) throw DepthError("s_min below the tabulated range");
  ReportList out;
  ClassifierOptions opts;
  opts.cutoff = 1.0 / s_min;

  auto hv = classify_at_zero([&](double s) { return profile.h(s); }, 1.0, opts, "h-integral");
  out.push_back(verdict_check("calderon-pair.h-divergent", "calderon-pair", hv, Classification::Divergent));

  std::vector<double> partials;
  for (int j = 1; std::ldexp(1.0, -j) >= s_min; ++j) partials.push_back(profile.h_integral_at(j * std::log(2.0)));
  double min_step = kInf;
  for (std::size_t i = 1; i < partials.size(); ++i) min_step = std::min(min_step, partials[i] - partials[i - 1]);
  auto mono = make_check("calderon-pair.h-partials-increasing", "calderon-pair", min_step, Relation::GreaterEq, 0.0, 0.0,
                         "smallest increment of int_s^1 h along s = 2^-j");
  mono.samples = static_cast<long>(partials.size());
  mono.slack = {{"first_partial", partials.empty() ? 0.0 : partials.front()},
                {"last_partial", partials.empty() ? 0.0 : partials.back()}};
  out.push_back(mono);

  const auto& phi = profile.phi();
  const int k = profile.k();
  auto gv = classify_at_zero(
      [&](double s) { return std::exp(phi.log_at_log(profile.log_h_at(-std::log(s))) + (k - 1) * std::log(s)); }, 1.0,
      opts, "phi(h)-moment");
  auto conv = verdict_check("calderon-pair.phi-h-convergent", "calderon-pair", gv, Classification::Convergent);
  conv.slack.push_back({"value", gv.partial_value + gv.tail_estimate});
  out.push_back(conv);
  return out;
}

double radial_energy(const ExtremalProfile& profile, double r) {
  if (!(r > 0.0)) throw PreconditionError("radial_energy: r must be positive");
  return profile.energy_at(r >= 1.0 ? 0.0 : -std::log(r));
}

namespace {

void require_convergent(const OrliczFunction& phi, int k, double energy) {
  if (!(energy >= 0.0)) throw PreconditionError("energy must be nonnegative");
  auto v = calderon_condition(phi, k);
  if (v.classification != Classification::Convergent)
    throw PreconditionError("bound needs a convergent Calderon integral, got " + to_string(v.classification));
}

}  // namespace

double cube_diameter_bound(const OrliczFunction& phi, int k, int m, double energy, const ConstantsConfig& constants) {
  require_convergent(phi, k, energy);
  if (m < 1) throw PreconditionError("cube_diameter_bound: m must be positive");
  const double A = a_star(phi, k);
  return m * constants.get("alpha_k") * std::pow(A, (k - 1.0) / k) * std::pow(energy, 1.0 / k);
}

double hausdorff_area_bound(const OrliczFunction& phi, int k, int m, double energy, const ConstantsConfig& constants) {
  require_convergent(phi, k, energy);
  if (m < 1) throw PreconditionError("hausdorff_area_bound: m must be positive");
  const double A = a_star(phi, k);
  return std::pow(m * constants.get("alpha_k"), k) * std::pow(A, k - 1.0) * energy;
}

}  // namespace orliczlab
