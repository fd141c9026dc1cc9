#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "orliczlab/report.hpp"

namespace orliczlab {

/// A piece of a field supported in a disk: amplitude * profile((z - center) / radius).
struct Bump {
  Eigen::Vector2d center = Eigen::Vector2d::Zero();
  double radius = 1.0;
  double log_amplitude = 0.0;
  /// profile on the unit disk; the indicator when empty
  std::function<double(double)> profile;

  double local_value(double w) const;
};

struct OscillationField {
  std::function<double(const Eigen::VectorXd&)> eval;
  /// Balls of at most this radius are integrated.
  double integrable_radius = 1.0;
  std::string description;
  int dimension = 2;
  /// Nonempty for fields that are sums of disjoint bumps.
  std::vector<Bump> bumps;

  double operator()(const Eigen::VectorXd& x) const { return eval(x); }
};

struct BallQuadrature {
  int radial = 256;
  int angular = 256;
  /// Allowed relative change between the half and the full grid.
  double refinement_tol = 1e-3;
};

/// Mean of u over B(center, radius).
double ball_mean(const OscillationField& u, const Eigen::VectorXd& center, double radius, const BallQuadrature& q = {});

/// Mean of |u - u_B| over B(center, radius).
double mean_oscillation(const OscillationField& u, const Eigen::VectorXd& center, double radius,
                        const BallQuadrature& q = {});

/// Mean of |u - c| over B(center, radius).
double mean_deviation(const OscillationField& u, const Eigen::VectorXd& center, double radius, double c,
                      const BallQuadrature& q = {});

struct FmoResult {
  std::vector<double> eps;
  std::vector<double> means;
  std::vector<double> oscillation;
  /// mean |u - phi_eps| for user centering constants, empty otherwise
  std::vector<double> centered;
  double max_oscillation = 0.0;
  /// slope of log oscillation against log(1/eps)
  double trend = 0.0;
  std::string evidence;
  ReportList rows;
};

FmoResult fmo_at_point(const OscillationField& u, const Eigen::VectorXd& z0, const std::vector<double>& eps_grid,
                       const std::function<double(double)>& centering = {}, const BallQuadrature& q = {});

/// eps_j = r0 2^{-j}, j = 0..count-1
std::vector<double> dyadic_grid(double r0, int count);

OscillationField constant_field(double c, int n = 2);
/// log(1/|z|)
OscillationField log_recip_field(int n = 2);
/// |z|^{-2}
OscillationField inverse_square_field(int n = 2);
/// indicator of the half-space x_1 > 0
OscillationField half_plane_field(int n = 2);
/// Bilinear interpolation of a regular grid given as CSV rows x,y,value.
OscillationField table_field(const std::string& path);

struct ExampleResult {
  OscillationField field;
  ReportList rows;
  nlohmann::json data;
};

/// Sum of c_n chi(D_n), z_n = 2^{-n}, r_n = 2^{-p n^2}, c_n = 2^{2 n^2}, n <= n_max.
ExampleResult build_example1(double p, int n_max = 6, const BallQuadrature& q = {});

/// Smooth bumps 2^{2k^2} phi_0((z - z_k)/r_k), z_k = 2^{-k}, r_k = 2^{-(1+delta)k^2}, 2 <= k <= k_max.
/// k_max = 0 selects ceil(1/delta) + 3.
ExampleResult build_example2(double delta, int k_max = 0, const BallQuadrature& q = {});

/// "log-recip", "inv-square", "half-plane", "const:c=1", "example1:p=2", "example2:delta=0.5", "table:<path>"
OscillationField parse_field(const std::string& spec);

}  // namespace orliczlab
