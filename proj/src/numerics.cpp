#include "orliczlab/numerics.hpp"

#include <Eigen/Dense>
#include <boost/math/special_functions/legendre.hpp>

namespace orliczlab {

std::vector<double> halton(unsigned index, int dim) {
  static const unsigned primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
  if (dim > 12) throw std::invalid_argument("halton: dimension above 12");
  std::vector<double> out(dim);
  for (int i = 0; i < dim; ++i) out[i] = radical_inverse(index + 1, primes[i]);
  return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const Eigen::Index n = static_cast<Eigen::Index>(x.size());
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1.0;
    b(i) = y[i];
  }
  Eigen::Vector2d coef = A.colPivHouseholderQr().solve(b);
  return coef(0);
}

void gauss_legendre(int order, double a, double b, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.assign(order, 0.0);
  weights.assign(order, 0.0);
  for (int i = 0; i < order; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (order + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p = boost::math::legendre_p(order, x);
      double dp = boost::math::legendre_p_prime(order, x);
      double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double dp = boost::math::legendre_p_prime(order, x);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[i] = 0.5 * (a + b) + 0.5 * (b - a) * x;
    weights[i] = 0.5 * (b - a) * w;
  }
}

}  // namespace orliczlab
