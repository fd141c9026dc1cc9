#pragma once

#include <functional>
#include <memory>
#include <string>

#include <Eigen/Core>

#include "orliczlab/report.hpp"
#include "orliczlab/weight.hpp"

namespace orliczlab {

class CounterexampleModel;

enum class MapKind { Identity, RadialStretch, Shear, Composite };

struct ModelMap {
  MapKind kind = MapKind::Identity;
  int n = 2;
  double alpha = 1.0;
  std::string description;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> eval;
  /// empty when only finite differences are available
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;

  Eigen::VectorXd operator()(const Eigen::VectorXd& x) const { return eval(x); }
};

ModelMap identity_map(int n);
/// x |x|^{alpha - 1}
ModelMap radial_stretch(double alpha, int n);
/// (x, y) -> (x, y + f(x)) for the counterexample f; the model is shared.
ModelMap shear_map(std::shared_ptr<const CounterexampleModel> model);
/// outer after inner
ModelMap compose(const ModelMap& outer, const ModelMap& inner);

/// "identity:n=3", "stretch:alpha=0.5,n=3", "shear:k=2,depth=3,p=2"
ModelMap parse_map(const std::string& spec);

/// ||f'||^n / J_f from a closed-form Jacobian; 1 where f' = 0 and inf where J_f = 0 != f'.
double kf_from_jacobian(const Eigen::MatrixXd& J);

/// Closed-form K_f of identity and radial stretches.
double kf_closed(const ModelMap& map, const Eigen::VectorXd& x);

/// K_f from a central-difference Jacobian with one Richardson step; step <= 0 selects 1e-6 |x|.
double kf_numeric(const ModelMap& map, const Eigen::VectorXd& x, double step = 0.0);

struct ChordalGap {
  double delta = 1.0;
  void validate() const;
};

double chordal_distance(const Eigen::VectorXd& x, const Eigen::VectorXd& y);
/// distance to the point at infinity
double chordal_to_infinity(const Eigen::VectorXd& x);

struct DistortionBound {
  double value = 0.0;
  /// the same bound written with the L^{n-1} sphere norm of K_f
  double norm_form = 0.0;
  double exponent_integral = 0.0;
};

/// k_profile holds the sphere means of K_f^{n-1} around x0.
DistortionBound distortion_bound(const RadialWeight& k_profile, const ChordalGap& gap, const Eigen::VectorXd& x0,
                                 double eps0, const Eigen::VectorXd& x, const ConstantsConfig& constants = {},
                                 double rel_tol = 1e-12);

/// (alpha_n / Delta) (log(1/eps0) / log(1/|x - x0|))^beta
double fmo_bound(const ChordalGap& gap, const Eigen::VectorXd& x0, double eps0, double beta, const Eigen::VectorXd& x,
                 const ConstantsConfig& constants = {});

/// Hypothesis constant, fitted Hoelder exponent and bound exponent of a contracting radial stretch.
ReportList holder_check(const ModelMap& map, int samples = 64);

/// K_f numeric against closed form at sampled radii in [0.1, 10].
ReportList kf_check(const ModelMap& map, int samples = 32);

}  // namespace orliczlab
