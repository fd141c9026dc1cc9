#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/roots.hpp>

namespace orliczlab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Quadrature {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Adaptive Gauss-Kronrod (7/15) on a finite interval.
template <typename F>
Quadrature integrate(F&& f, double a, double b, double rel_tol = 1e-11, unsigned max_depth = 16) {
  if (!(b > a)) return {};
  double err = 0.0;
  double value;
  try {
    value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        [&](double x) { return static_cast<double>(f(x)); }, a, b, max_depth, rel_tol, &err);
  } catch (const std::exception&) {
    return {kInf, kInf, false};
  }
  bool ok = std::isfinite(value) && std::isfinite(err) &&
            err <= 20.0 * rel_tol * std::abs(value) + 1e-300;
  return {value, err, ok};
}

/// log of the integral of exp(logf) over [a, b]; the integrand is rescaled by its
/// maximum over a coarse sample before integrating.
template <typename F>
Quadrature log_integrate(F&& logf, double a, double b, double rel_tol = 1e-12, unsigned max_depth = 16) {
  if (!(b > a)) return {-kInf, 0.0, true};
  double ref = -kInf;
  constexpr int kProbe = 17;
  for (int i = 0; i < kProbe; ++i) {
    double x = a + (b - a) * (i + 0.5) / kProbe;
    ref = std::max(ref, logf(x));
  }
  if (ref == kInf) return {kInf, kInf, false};
  if (ref == -kInf) ref = std::max(logf(a), logf(b));
  if (ref == -kInf) return {-kInf, 0.0, true};
  auto q = integrate([&](double x) { return std::exp(logf(x) - ref); }, a, b, rel_tol, max_depth);
  if (!std::isfinite(q.value)) return {kInf, kInf, false};
  if (q.value <= 0.0) return {-kInf, 0.0, q.converged};
  return {ref + std::log(q.value), q.error / q.value, q.converged};
}

/// Root of a function with a sign change on [lo, hi] (TOMS 748).
template <typename F>
double solve_bracketed(F&& f, double lo, double hi, double xtol, int max_iter = 200) {
  double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw NumericalError("root not bracketed");
  std::uintmax_t iters = static_cast<std::uintmax_t>(max_iter);
  auto stop = [xtol](double x0, double x1) {
    return std::abs(x1 - x0) <= xtol * std::max(1.0, std::abs(x0));
  };
  auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
  return 0.5 * (r.first + r.second);
}

inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  double m = std::max(a, b);
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

/// log(e^a - e^b) for a >= b.
inline double log_sub_exp(double a, double b) {
  if (b == -kInf) return a;
  if (b >= a) return -kInf;
  return a + std::log1p(-std::exp(b - a));
}

inline double softplus(double v) {
  if (v > 37.0) return v;
  return v < -700.0 ? std::exp(v) : std::log1p(std::exp(v));
}

/// Area of the unit sphere in R^n.
inline double unit_sphere_area(int n) { return 2.0 * std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n); }

/// Volume of the unit ball in R^n.
inline double unit_ball_volume(int n) { return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

inline double radical_inverse(unsigned index, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (index > 0) {
    r += f * (index % base);
    index /= base;
    f *= inv;
  }
  return r;
}

/// Halton point (0-based index) in [0,1)^dim using the first dim primes.
std::vector<double> halton(unsigned index, int dim);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Gauss-Legendre nodes and weights on [a, b].
void gauss_legendre(int order, double a, double b, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace orliczlab
