#pragma once

#include <functional>
#include <string>

#include <Eigen/Core>

namespace orliczlab {

/// A weight Q on R^n around a center, known through its sphere means q(r) and
/// optionally pointwise.
class RadialWeight {
 public:
  using Profile = std::function<double(double)>;
  using Field = std::function<double(const Eigen::VectorXd&)>;

  /// Q(x) = q(|x - x0|).
  static RadialWeight radial(int n, Profile q, std::string description);
  /// q(r) is computed as the numerical sphere mean of Q.
  static RadialWeight from_field(int n, Field Q, std::string description, Eigen::VectorXd center);

  int dimension() const { return n_; }
  const Eigen::VectorXd& center() const { return center_; }
  const std::string& description() const { return description_; }
  bool is_radial() const { return radial_; }

  double profile(double r) const;
  double operator()(const Eigen::VectorXd& x) const;
  /// Mean of Q^s over the sphere |x - x0| = r.
  double sphere_power_mean(double r, double s) const;
  /// Mean of phi(Q) over the sphere |x - x0| = r.
  double sphere_mean_of(double r, const std::function<double(double)>& phi) const;
  /// (integral of Q^{n-1} over the sphere of radius r)^{1/(n-1)}
  double sphere_norm(double r) const;

  RadialWeight scaled(double c) const;

 private:
  int n_ = 2;
  Profile q_;
  Field field_;
  Eigen::VectorXd center_;
  std::string description_;
  bool radial_ = true;
};

/// Mean of f over the sphere |x - center| = r (n = 2 or 3).
double sphere_mean(int n, const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& center,
                   double r);

/// "const:c=1", "pow:a=-2" (q = r^a), "logpow:a=2" (q = log(1/r)^a), "loge:a=1" (q = log(e/r)^a).
RadialWeight parse_weight(const std::string& spec, int n);

}  // namespace orliczlab
