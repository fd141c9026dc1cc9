#pragma once

#include <memory>
#include <vector>

#include "orliczlab/conditions.hpp"
#include "orliczlab/orlicz.hpp"
#include "orliczlab/report.hpp"

namespace orliczlab {

/// Thrown when an evaluation needs radii below the tabulated range.
struct DepthError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ProfileOptions {
  /// Largest tabulated log(1/s); radii down to exp(-lambda_max) are supported.
  double lambda_max = 1e10;
  /// Divide F by the smallest c >= 1 that brings the total energy to at most 1.
  bool rescale = false;
  /// Relative tolerance of the Big Phi panel quadrature.
  double quadrature_tolerance = 1e-12;
  ClassifierOptions classifier;
};

/**
 * The radial profile built from a gauge with divergent Calderon integral.
 *
 * Big Phi(t) = int_1^t g,  g = (tau/phi(tau))^{1/(k-1)},  Psi = g / Big Phi,
 * h = Psi^{-1},  F(t) = int_t^1 (h - h(1)) ds on (0,1), zero for t >= 1.
 *
 * Internally everything is stored in logarithmic variables: v = log(t - 1) for
 * Big Phi and Psi, and lambda = log(1/s) for h, F and the energy, so radii like
 * exp(-1e6) are representable.
 */
class ExtremalProfile {
 public:
  static ExtremalProfile build(const OrliczFunction& phi, int k, const ProfileOptions& opts = {});

  int k() const { return k_; }
  const OrliczFunction& phi() const { return phi_; }
  double lambda_max() const { return lambda_max_; }
  /// F is stored divided by this factor (1 unless rescaled).
  double scale() const { return scale_; }
  /// Total energy of the unscaled profile.
  double raw_energy() const { return raw_energy_; }
  double total_energy() const { return energy_at(0.0); }

  double big_phi(double t) const;
  double log_big_phi(double t) const;
  double psi(double t) const;
  /// log Psi(1 + e^v)
  double log_psi_v(double v) const;

  double h(double s) const;
  /// log h(e^{-lambda})
  double log_h_at(double lambda) const;
  double h1() const { return h1_; }
  /// log(1/(s h(s))) at s = e^{-lambda}; stays of moderate size when lambda is huge.
  double reduced_at(double lambda) const;

  double F(double t) const;
  double F_at(double lambda) const;
  /// int_s^1 h(sigma) d sigma at s = e^{-lambda}
  double h_integral_at(double lambda) const;
  double dF(double t) const;
  /// log |F'(e^{-lambda})|, -inf at lambda = 0; absolute precision degrades like ulp(lambda)
  double log_abs_dF_at(double lambda) const;
  /// log(s |F'(s)|) at s = e^{-lambda}, of moderate size for every lambda
  double log_s_abs_dF_at(double lambda) const;

  /// sigma_{k-1} int_0^r phi(|F'|) t^{k-1} dt with r = e^{-lambda}
  double energy_at(double lambda) const;

  nlohmann::json to_json() const;

 private:
  struct Tables;
  double y_at(double v) const;
  double log_g_v(double v) const;
  /// log(g(t) (t - 1)) at t = 1 + e^v
  double log_gt_v(double v) const;
  /// log((h(s) - h(1)) s) at s = e^{-lambda}
  double m_at(double lambda) const;
  double log_energy_density(double m, double kappa, double lc) const;
  double solve_v(double lambda) const;
  double panel_energy(std::size_t j, double c) const;
  double tail_energy(double c) const;
  double energy_with_scale(double c) const;

  OrliczFunction phi_;
  int k_ = 2;
  double lambda_max_ = 0.0;
  double scale_ = 1.0;
  double raw_energy_ = 0.0;
  double h1_ = 0.0;
  double log_h1_ = 0.0;
  double sigma_ = 0.0;
  std::shared_ptr<const Tables> tab_;
};

ExtremalProfile build_profile(const OrliczFunction& phi, int k, const ProfileOptions& opts = {});

/// Rows for the divergence of int h and the convergence of int phi(h) s^{k-1}.
ReportList verify_calderon_pair(const ExtremalProfile& profile, double s_min);

double radial_energy(const ExtremalProfile& profile, double r);

double cube_diameter_bound(const OrliczFunction& phi, int k, int m, double energy, const ConstantsConfig& constants);
double hausdorff_area_bound(const OrliczFunction& phi, int k, int m, double energy, const ConstantsConfig& constants);

}  // namespace orliczlab
