#include "orliczlab/weight.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"
#include "orliczlab/report.hpp"

namespace orliczlab {

RadialWeight RadialWeight::radial(int n, Profile q, std::string description) {
  if (n < 2) throw PreconditionError("weight dimension must be at least 2");
  RadialWeight w;
  w.n_ = n;
  w.q_ = std::move(q);
  w.center_ = Eigen::VectorXd::Zero(n);
  w.description_ = std::move(description);
  w.radial_ = true;
  return w;
}

RadialWeight RadialWeight::from_field(int n, Field Q, std::string description, Eigen::VectorXd center) {
  if (n != 2 && n != 3) throw PreconditionError("numerical sphere means are implemented for n = 2, 3");
  if (center.size() != n) throw PreconditionError("center dimension mismatch");
  RadialWeight w;
  w.n_ = n;
  w.field_ = std::move(Q);
  w.center_ = std::move(center);
  w.description_ = std::move(description);
  w.radial_ = false;
  return w;
}

double RadialWeight::profile(double r) const {
  if (radial_) return q_(r);
  return sphere_mean(n_, field_, center_, r);
}

double RadialWeight::operator()(const Eigen::VectorXd& x) const {
  if (radial_) return q_((x - center_).norm());
  return field_(x);
}

double RadialWeight::sphere_power_mean(double r, double s) const {
  if (radial_) return std::pow(q_(r), s);
  return sphere_mean(n_, [&](const Eigen::VectorXd& x) { return std::pow(field_(x), s); }, center_, r);
}

double RadialWeight::sphere_mean_of(double r, const std::function<double(double)>& phi) const {
  if (radial_) return phi(q_(r));
  return sphere_mean(n_, [&](const Eigen::VectorXd& x) { return phi(field_(x)); }, center_, r);
}

double RadialWeight::sphere_norm(double r) const {
  if (!(r > 0)) throw PreconditionError("sphere_norm: radius must be positive");
  const double m = n_ - 1.0;
  const double mean = sphere_power_mean(r, m);
  if (!std::isfinite(mean) || mean < 0) throw PreconditionError("sphere_norm: weight undefined on the sphere");
  return std::pow(unit_sphere_area(n_) * std::pow(r, m) * mean, 1.0 / m);
}

RadialWeight RadialWeight::scaled(double c) const {
  RadialWeight w = *this;
  w.description_ = description_ + "*" + std::to_string(c);
  if (radial_) {
    auto q = q_;
    w.q_ = [q, c](double r) { return c * q(r); };
  } else {
    auto f = field_;
    w.field_ = [f, c](const Eigen::VectorXd& x) { return c * f(x); };
  }
  return w;
}

double sphere_mean(int n, const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& center,
                   double r) {
  if (n == 2) {
    constexpr int m = 512;
    double sum = 0.0;
    Eigen::VectorXd x(2);
    for (int i = 0; i < m; ++i) {
      double th = 2.0 * kPi * (i + 0.5) / m;
      x << center(0) + r * std::cos(th), center(1) + r * std::sin(th);
      sum += f(x);
    }
    return sum / m;
  }
  if (n == 3) {
    static const auto rule = [] {
      std::pair<std::vector<double>, std::vector<double>> nw;
      gauss_legendre(48, -1.0, 1.0, nw.first, nw.second);
      return nw;
    }();
    const auto& [nodes, weights] = rule;
    constexpr int m = 96;
    double sum = 0.0;
    Eigen::VectorXd x(3);
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      const double z = nodes[i], s = std::sqrt(1.0 - z * z);
      double ring = 0.0;
      for (int j = 0; j < m; ++j) {
        double ph = 2.0 * kPi * (j + 0.5) / m;
        x << center(0) + r * s * std::cos(ph), center(1) + r * s * std::sin(ph), center(2) + r * z;
        ring += f(x);
      }
      sum += weights[i] * ring / m;
    }
    return sum / 2.0;
  }
  throw PreconditionError("sphere_mean: only n = 2, 3");
}

RadialWeight parse_weight(const std::string& spec, int n) {
  Spec parsed;
  try {
    parsed = parse_spec(spec);
  } catch (const std::invalid_argument& e) {
    throw ValidationError(std::string("weight ") + e.what());
  }
  const std::string& name = parsed.name;
  auto get = [&](const char* key, double fallback) { return parsed.get(key, fallback); };
  if (name == "const") {
    double c = get("c", 1.0);
    return RadialWeight::radial(n, [c](double) { return c; }, spec);
  }
  if (name == "pow") {
    double a = get("a", 0.0);
    return RadialWeight::radial(n, [a](double r) { return std::pow(r, a); }, spec);
  }
  if (name == "logpow") {
    double a = get("a", 1.0);
    return RadialWeight::radial(n, [a](double r) { return r < 1.0 ? std::pow(std::log(1.0 / r), a) : 0.0; }, spec);
  }
  if (name == "loge") {
    double a = get("a", 1.0);
    return RadialWeight::radial(n, [a](double r) { return std::pow(std::log(std::exp(1.0) / r), a); }, spec);
  }
  throw ValidationError("unknown weight family '" + name + "'");
}

}  // namespace orliczlab
