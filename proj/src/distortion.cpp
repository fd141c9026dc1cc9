#include "orliczlab/distortion.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "orliczlab/counterexample.hpp"
#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"

namespace orliczlab {

namespace {

bool is_radial(const ModelMap& m) {
  return m.kind == MapKind::Identity || m.kind == MapKind::RadialStretch ||
         (m.kind == MapKind::Composite && std::isfinite(m.alpha));
}

Eigen::MatrixXd central_difference(const ModelMap& map, const Eigen::VectorXd& x, double h) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd D(n, n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    D.col(i) = (map(a) - map(b)) / (2.0 * h);
  }
  return D;
}

Eigen::VectorXd direction(unsigned index, int n) {
  const auto u = halton(index + 1, 2);
  Eigen::VectorXd d(n);
  if (n == 2) {
    d << std::cos(2.0 * kPi * u[0]), std::sin(2.0 * kPi * u[0]);
  } else if (n == 3) {
    const double z = 2.0 * u[0] - 1.0, s = std::sqrt(1.0 - z * z);
    d << s * std::cos(2.0 * kPi * u[1]), s * std::sin(2.0 * kPi * u[1]), z;
  } else {
    d = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) d[i] = std::cos(2.0 * kPi * radical_inverse(index + 1, 2 + i)) + 1e-3 * (i + 1);
    d.normalize();
  }
  return d;
}

}  // namespace

ModelMap identity_map(int n) {
  if (n < 2) throw PreconditionError("model map: dimension must be at least 2");
  ModelMap m;
  m.kind = MapKind::Identity;
  m.n = n;
  m.description = "identity(n=" + std::to_string(n) + ")";
  m.eval = [](const Eigen::VectorXd& x) { return x; };
  m.jacobian = [n](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(n, n); };
  return m;
}

ModelMap radial_stretch(double alpha, int n) {
  if (n < 2) throw PreconditionError("model map: dimension must be at least 2");
  if (!(alpha > 0.0)) throw PreconditionError("radial stretch: alpha must be positive");
  ModelMap m;
  m.kind = MapKind::RadialStretch;
  m.n = n;
  m.alpha = alpha;
  std::ostringstream d;
  d << "stretch(alpha=" << alpha << ",n=" << n << ")";
  m.description = d.str();
  m.eval = [alpha](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    const double r = x.norm();
    if (r == 0.0) return x;
    return std::pow(r, alpha - 1.0) * x;
  };
  m.jacobian = [alpha, n](const Eigen::VectorXd& x) -> Eigen::MatrixXd {
    const double r = x.norm();
    if (r == 0.0) throw PreconditionError("radial stretch: Jacobian undefined at the origin");
    const Eigen::VectorXd u = x / r;
    return std::pow(r, alpha - 1.0) *
           (Eigen::MatrixXd::Identity(n, n) + (alpha - 1.0) * u * u.transpose());
  };
  return m;
}

ModelMap shear_map(std::shared_ptr<const CounterexampleModel> model) {
  if (!model) throw PreconditionError("shear map: no counterexample model");
  ModelMap m;
  m.kind = MapKind::Shear;
  m.n = model->k() + 1;
  m.alpha = std::nan("");
  m.description = "shear(k=" + std::to_string(model->k()) + ",depth=" + std::to_string(model->depth()) + ")";
  const int k = model->k();
  m.eval = [model, k](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return eval_construction(*model, x.head(k), x[k]).H;
  };
  return m;
}

ModelMap compose(const ModelMap& outer, const ModelMap& inner) {
  if (outer.n != inner.n) throw PreconditionError("compose: dimension mismatch");
  ModelMap m;
  m.kind = MapKind::Composite;
  m.n = inner.n;
  m.alpha = is_radial(outer) && is_radial(inner) ? outer.alpha * inner.alpha : std::nan("");
  m.description = outer.description + " o " + inner.description;
  auto f = outer.eval, g = inner.eval;
  m.eval = [f, g](const Eigen::VectorXd& x) { return f(g(x)); };
  if (outer.jacobian && inner.jacobian) {
    auto Jf = outer.jacobian, Jg = inner.jacobian;
    m.jacobian = [g, Jf, Jg](const Eigen::VectorXd& x) -> Eigen::MatrixXd { return Jf(g(x)) * Jg(x); };
  }
  return m;
}

ModelMap parse_map(const std::string& spec) {
  Spec s;
  try {
    s = parse_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("map ") + e.what());
  }
  const int n = static_cast<int>(s.get("n", 3));
  if (s.name == "identity") return identity_map(n);
  if (s.name == "stretch") return radial_stretch(s.get("alpha", 2.0), n);
  if (s.name == "shear") {
    CounterexampleOptions o;
    o.depth = static_cast<int>(s.get("depth", 3));
    std::ostringstream phi;
    phi << "pow:p=" << s.get("p", 2.0);
    return shear_map(std::make_shared<const CounterexampleModel>(
        build_sequences(phi.str(), static_cast<int>(s.get("k", 2)), o)));
  }
  throw ValidationError("unknown map '" + s.name + "'");
}

double kf_from_jacobian(const Eigen::MatrixXd& J) {
  if (!J.allFinite()) throw NumericalError("K_f: non-finite Jacobian");
  const double norm = Eigen::JacobiSVD<Eigen::MatrixXd>(J).singularValues()(0);
  if (norm == 0.0) return 1.0;
  const double det = std::abs(J.determinant());
  if (det == 0.0) return kInf;
  return std::pow(norm, static_cast<double>(J.rows())) / det;
}

double kf_closed(const ModelMap& map, const Eigen::VectorXd& x) {
  if (map.kind == MapKind::Identity) return 1.0;
  if (is_radial(map)) {
    if (x.norm() == 0.0) throw PreconditionError("K_f: undefined at the origin");
    const double a = map.alpha;
    return std::pow(std::max(a, 1.0), map.n) / a;
  }
  if (map.jacobian) return kf_from_jacobian(map.jacobian(x));
  throw PreconditionError("K_f: no closed form for " + map.description);
}

double kf_numeric(const ModelMap& map, const Eigen::VectorXd& x, double step) {
  if (x.size() != map.n) throw PreconditionError("K_f: point dimension does not match the map");
  double h = step > 0.0 ? step : 1e-6 * x.norm();
  if (h == 0.0) h = 1e-6;
  const Eigen::MatrixXd D1 = central_difference(map, x, h), D2 = central_difference(map, x, 0.5 * h);
  const Eigen::MatrixXd D = (4.0 * D2 - D1) / 3.0;
  if (!D.allFinite()) throw NumericalError("K_f: singular finite-difference stencil at " + map.description);
  return kf_from_jacobian(D);
}

void ChordalGap::validate() const {
  if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("chordal gap must lie in (0, 1]");
}

double chordal_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  return (x - y).norm() / (std::sqrt(1.0 + x.squaredNorm()) * std::sqrt(1.0 + y.squaredNorm()));
}

double chordal_to_infinity(const Eigen::VectorXd& x) { return 1.0 / std::sqrt(1.0 + x.squaredNorm()); }

DistortionBound distortion_bound(const RadialWeight& k_profile, const ChordalGap& gap, const Eigen::VectorXd& x0,
                                 double eps0, const Eigen::VectorXd& x, const ConstantsConfig& constants,
                                 double rel_tol) {
  gap.validate();
  const int n = k_profile.dimension();
  if (x.size() != n || x0.size() != n) throw PreconditionError("distortion bound: dimension mismatch");
  const double rho = (x - x0).norm();
  if (!(rho > 0.0 && rho < eps0)) throw PreconditionError("distortion bound: need 0 < |x - x0| < eps0");
  const double m = n - 1.0;
  auto k = [&](double r) { return k_profile.sphere_power_mean(r, 1.0); };
  auto q = integrate([&](double u) { return std::pow(k(std::exp(u)), -1.0 / m); }, std::log(rho), std::log(eps0), rel_tol, 8);
  if (!q.converged) throw NumericalError("distortion bound: k profile not integrable on the segment");

  RadialWeight K = k_profile.is_radial()
                       ? RadialWeight::radial(n, [k, m](double r) { return std::pow(k(r), 1.0 / m); }, "K_f")
                       : RadialWeight::from_field(
                             n, [k_profile, m](const Eigen::VectorXd& y) { return std::pow(k_profile(y), 1.0 / m); },
                             "K_f", x0);
  const double om = std::pow(unit_sphere_area(n), 1.0 / m);
  auto q2 = integrate([&](double u) { const double r = std::exp(u); return om * r / K.sphere_norm(r); }, std::log(rho),
                      std::log(eps0), rel_tol, 8);
  if (!q2.converged) throw NumericalError("distortion bound: sphere norm of K_f not integrable on the segment");

  const double c = constants.get("alpha_n") / gap.delta;
  DistortionBound b;
  b.exponent_integral = q.value;
  b.value = c * std::exp(-q.value);
  b.norm_form = c * std::exp(-q2.value);
  return b;
}

double fmo_bound(const ChordalGap& gap, const Eigen::VectorXd& x0, double eps0, double beta, const Eigen::VectorXd& x,
                 const ConstantsConfig& constants) {
  gap.validate();
  if (!(beta > 0.0)) throw PreconditionError("fmo bound: beta must be positive");
  if (!(eps0 > 0.0 && eps0 < 1.0)) throw PreconditionError("fmo bound: eps0 must lie in (0, 1)");
  const double rho = (x - x0).norm();
  if (!(rho > 0.0 && rho < 1.0)) throw PreconditionError("fmo bound: need 0 < |x - x0| < 1");
  return constants.get("alpha_n") / gap.delta * std::pow(std::log(1.0 / eps0) / std::log(1.0 / rho), beta);
}

ReportList holder_check(const ModelMap& map, int samples) {
  if (map.kind != MapKind::RadialStretch && map.kind != MapKind::Identity)
    throw PreconditionError("holder check: unsupported map " + map.description);
  const double alpha = map.alpha;
  if (!(alpha > 0.0 && alpha <= 1.0)) throw PreconditionError("holder check: unsupported for alpha > 1");
  const int n = map.n;
  if (n != 2 && n != 3) throw PreconditionError("holder check: n must be 2 or 3");
  const std::string anchor = "distortion:holder-check";
  const double m = n - 1.0, omega = unit_sphere_area(n);
  const Eigen::VectorXd origin = Eigen::VectorXd::Zero(n);
  auto kprof = RadialWeight::from_field(
      n, [&map, m](const Eigen::VectorXd& y) { return std::pow(kf_numeric(map, y), m); },
      "K_f^{n-1} of " + map.description, origin);
  const double K = kf_closed(map, Eigen::VectorXd::Constant(n, 1.0));
  ReportList rows;

  // integral of K_f^{n-1} |x|^{-n} over eps < |x| < 1, accumulated segment by segment
  const std::vector<double> eps = {1e-1, 3e-2, 1e-2, 3e-3, 1e-3, 3e-4, 1e-4};
  std::vector<double> nodes, weights, xs, Is;
  double I = 0.0, upper = 0.0;
  for (double e : eps) {
    gauss_legendre(4, std::log(e), upper, nodes, weights);
    for (std::size_t i = 0; i < nodes.size(); ++i) I += omega * weights[i] * kprof.sphere_power_mean(std::exp(nodes[i]), 1.0);
    upper = std::log(e);
    xs.push_back(std::log(1.0 / e));
    Is.push_back(I);
  }
  const double c = fit_slope(xs, Is);
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / xs.size();
    my += Is[i] / xs.size();
  }
  const double expected = omega * std::pow(K, m);
  auto hyp = make_check("distortion.holder.hypothesis-constant", anchor, c, Relation::ApproxEq, expected,
                        1e-6 * expected, "fit of c in integral of K_f^{n-1}|x|^{-n} = c log(1/eps)");
  hyp.slack.push_back({"intercept", my - c * mx});
  hyp.samples = static_cast<long>(eps.size());
  rows.push_back(hyp);

  // |f(x)| against |x| on log-spaced radii in [1e-4, 1]
  std::vector<double> lx, lf;
  for (int i = 0; i < samples; ++i) {
    const double r = std::pow(10.0, -4.0 + 4.0 * i / (samples - 1));
    const Eigen::VectorXd x = r * direction(static_cast<unsigned>(i), n);
    lx.push_back(std::log(x.norm()));
    lf.push_back(std::log(map(x).norm()));
  }
  const double beta = fit_slope(lx, lf);
  auto fit = make_check("distortion.holder.fitted-exponent", anchor, beta, Relation::ApproxEq, alpha, 1e-6,
                        "slope of log|f(x)| against log|x|");
  fit.samples = samples;
  rows.push_back(fit);

  // exponent carried by the distortion bound with the numerically sampled k profile
  Eigen::VectorXd a = 1e-1 * direction(0, n), b = 1e-3 * direction(1, n);
  const auto Ba = distortion_bound(kprof, ChordalGap{}, origin, 0.5, a, {}, 1e-8);
  const auto Bb = distortion_bound(kprof, ChordalGap{}, origin, 0.5, b, {}, 1e-8);
  const double exponent = std::log(Ba.value / Bb.value) / std::log(a.norm() / b.norm());
  auto ex = make_check("distortion.holder.bound-exponent", anchor, exponent, Relation::ApproxEq, beta, 1e-6,
                       "exponent of the bound against the fitted Hoelder exponent");
  ex.slack.push_back({"closed-form", 1.0 / std::pow(std::pow(K, m), 1.0 / m)});
  ex.slack.push_back({"norm-form-gap", std::abs(Ba.value - Ba.norm_form)});
  rows.push_back(ex);
  rows.push_back(make_check("distortion.holder.bound-forms", anchor, Ba.norm_form, Relation::ApproxEq, Ba.value,
                            1e-9 * Ba.value, "bound through k_{x0} against the L^{n-1} sphere-norm form"));
  return rows;
}

ReportList kf_check(const ModelMap& map, int samples) {
  const std::string anchor = "distortion:kf-numeric";
  double worst = 0.0, at = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double r = std::pow(10.0, -1.0 + 2.0 * i / std::max(1, samples - 1));
    const Eigen::VectorXd x = r * direction(static_cast<unsigned>(i), map.n);
    const double closed = kf_closed(map, x), num = kf_numeric(map, x);
    const double err = std::abs(num - closed) / closed;
    if (err > worst) {
      worst = err;
      at = r;
    }
  }
  auto row = make_check("distortion.kf." + map.description, anchor, worst, Relation::LessEq, 1e-6, 0.0,
                        "largest relative gap between numeric and closed-form K_f");
  row.slack.push_back({"radius-of-largest-gap", at});
  row.samples = samples;
  return {row};
}

}  // namespace orliczlab
