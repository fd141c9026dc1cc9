#pragma once

// Independent reference computations used as test oracles.

#include <cmath>
#include <functional>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
  if (n % 2) ++n;
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (long i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// Composite Simpson on n and 2n panels combined by one Richardson step.
inline double richardson(const std::function<double(double)>& f, double a, double b, long n = 4096) {
  const double s1 = simpson(f, a, b, n), s2 = simpson(f, a, b, 2 * n);
  return (16.0 * s2 - s1) / 15.0;
}

/// Integral over [a, b] with 0 < a < b through the substitution t = e^u.
inline double richardson_log(const std::function<double(double)>& f, double a, double b, long n = 4096) {
  return richardson([&](double u) { const double t = std::exp(u); return f(t) * t; }, std::log(a), std::log(b), n);
}

}  // namespace oracle
