#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "orliczlab/report.hpp"
#include "orliczlab/weight.hpp"

namespace orliczlab {

struct RingDomain {
  Eigen::VectorXd center;
  double r1 = 1.0;
  double r2 = 2.0;
  int n = 2;

  static RingDomain make(double r1, double r2, int n);
  void validate() const;
};

enum class Family { Spheres, Curves };
enum class Method { ClosedForm, Grid };

std::string to_string(Family f);
std::string to_string(Method m);

struct AdmissibleDensity {
  std::function<double(const Eigen::VectorXd&)> eval;
  Family family = Family::Curves;

  double operator()(const Eigen::VectorXd& x) const { return eval(x); }
};

struct ModulusResult {
  double value = 0.0;
  AdmissibleDensity extremal;
  Method method = Method::ClosedForm;
  ReportList certificate;
  nlohmann::json data;
};

/// (integral of Q^{n-1} over the sphere of radius r)^{1/(n-1)}
double surface_norm(const RadialWeight& w, double r);

/// Integral of dr / surface_norm(r) over (eps, eps0) with the density Q / surface_norm(|x|).
ModulusResult spheres_lower_bound(const RadialWeight& w, double eps, double eps0, int sample_spheres = 16);

/// omega_{n-1} / I^{n-1}, I = integral over (r1, r2) of dr / (r q^{1/(n-1)}).
ModulusResult ring_upper_bound(const RadialWeight& w, const RingDomain& ring);

/// Both is the union of the two families; its constraints share cells.
enum class GridFamily { Joining, Separating, Both };

struct GridOptions {
  int resolution = 256;
  int max_iterations = 10000;
  /// relative duality gap at which the solve stops
  double tolerance = 1e-9;
  /// restrict the joining family to angular cells [sector_begin, sector_end)
  int sector_begin = 0;
  int sector_end = -1;
};

/// Discrete p-modulus of the radial (joining) or circular (separating) curves of a planar annulus.
ModulusResult grid_modulus_2d(const RingDomain& ring, double p, GridFamily family, const GridOptions& opts = {});

/// Model maps with spheres to spheres: "identity", "stretch:alpha=2".
ReportList hesse_ziemer_check(const RingDomain& ring, const std::string& map_spec, int grid_resolution = 256);

}  // namespace orliczlab
