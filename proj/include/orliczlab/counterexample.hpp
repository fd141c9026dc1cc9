#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "orliczlab/extremal.hpp"
#include "orliczlab/orlicz.hpp"
#include "orliczlab/report.hpp"

namespace orliczlab {

struct CounterexampleOptions {
  int depth = 5;
  double lambda_max = 1e100;
  /// Relative tolerance of the bisection for the energy cap.
  double bisection_tol = 1e-12;
  /// Shift of the unit cube center away from (1/2, ..., 1/2).
  double center_offset = 1.4142135623730951e-3;
};

/// One level of the construction; radii are stored as natural logarithms.
struct Level {
  int l = 0;
  double log_r = 0.0;
  double log_rho = 0.0;
  double log_rho_star = 0.0;
  double F_r = 0.0;
  double F_rho = 0.0;
  double F_rho_star = 0.0;
  double log_abs_dF_rho = 0.0;
  /// Radial energy inside r_l.
  double energy = 0.0;
  /// Smallest log(1/r) allowed by the energy cap and by each radius cap.
  double lambda_energy = 0.0;
  double lambda_rho_cap = 0.0;
  double lambda_gap_cap = 0.0;
  double lambda_slope_cap = 0.0;
  std::string active;
  /// log(rho*_l - rho_l)
  double log_gap = 0.0;
};

class CounterexampleModel {
 public:
  int k() const { return k_; }
  int depth() const { return static_cast<int>(levels_.size()); }
  const OrliczFunction& phi() const { return phi_; }
  const OrliczFunction& phi_star() const { return phi_star_; }
  const ExtremalProfile& profile() const { return profile_; }
  const std::vector<Level>& levels() const { return levels_; }
  const Level& level(int l) const { return levels_.at(static_cast<std::size_t>(l - 1)); }
  const Eigen::VectorXd& cube_center() const { return center_; }
  const std::string& phi_spec() const { return phi_spec_; }
  double lambda_max() const { return lambda_max_; }

  /// F_l at distance e^{log_d} from a level-l center.
  double level_profile(int l, double log_d) const;
  double f_level(int l, const Eigen::VectorXd& x) const;
  /// f*_p = sum_{l <= p} 2^{-l} f_l
  double f_partial(const Eigen::VectorXd& x, int p) const;

  /// Integer lattice coordinates of the level-l centers inside the unit cube.
  std::vector<Eigen::VectorXi> lattice_in_cube(int l) const;

  nlohmann::json to_json() const;

 private:
  friend CounterexampleModel build_sequences(const std::string&, int, const CounterexampleOptions&);
  int k_ = 2;
  OrliczFunction phi_;
  OrliczFunction phi_star_;
  std::string phi_spec_;
  ExtremalProfile profile_;
  std::vector<Level> levels_;
  Eigen::VectorXd center_;
  double lambda_max_ = 0.0;
};

/// Builds phi_* = phi(t + k) - phi(k), its normalized profile and the radii of every level.
CounterexampleModel build_sequences(const std::string& phi_spec, int k, const CounterexampleOptions& opts = {});
CounterexampleModel model_from_json(const nlohmann::json& j);

struct ConstructionValue {
  double f = 0.0;
  Eigen::VectorXd g;
  Eigen::VectorXd H;
};

ConstructionValue eval_construction(const CounterexampleModel& model, const Eigen::VectorXd& x, double y);

/// Ordering, radius caps, energy caps, defining equations, disjointness and measure bounds.
ReportList check_invariants(const CounterexampleModel& model);

/// Oscillation of f*_{p-1} over level-p balls; values are base-2 logarithms.
ReportList check_oscillation(const CounterexampleModel& model, int p, int sample_balls = 16);

/// Lower and upper diameter bounds for the images of level-p balls.
ReportList check_diameter(const CounterexampleModel& model, int p);

ReportList energy_budget(const CounterexampleModel& model);

ReportList hausdorff_lower(const CounterexampleModel& model, int scale_level);

}  // namespace orliczlab
