#include "orliczlab/modulus.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "orliczlab/distortion.hpp"
#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"

namespace orliczlab {

RingDomain RingDomain::make(double r1, double r2, int n) {
  RingDomain d;
  d.center = Eigen::VectorXd::Zero(n);
  d.r1 = r1;
  d.r2 = r2;
  d.n = n;
  d.validate();
  return d;
}

void RingDomain::validate() const {
  if (n < 2) throw PreconditionError("ring: dimension must be at least 2");
  if (!(r1 > 0.0 && r1 < r2 && std::isfinite(r2))) throw PreconditionError("ring: need 0 < r1 < r2");
  if (center.size() != n) throw PreconditionError("ring: center dimension mismatch");
}

std::string to_string(Family f) { return f == Family::Spheres ? "SPHERES" : "CURVES"; }
std::string to_string(Method m) { return m == Method::ClosedForm ? "CLOSED_FORM" : "GRID"; }

double surface_norm(const RadialWeight& w, double r) { return w.sphere_norm(r); }

ModulusResult spheres_lower_bound(const RadialWeight& w, double eps, double eps0, int sample_spheres) {
  if (!(eps > 0.0 && eps < eps0)) throw PreconditionError("spheres lower bound: need 0 < eps < eps0");
  const int n = w.dimension();
  const std::string anchor = "modulus:spheres-lower-bound";
  ModulusResult res;
  res.method = Method::ClosedForm;
  auto q = integrate([&](double u) {
    const double r = std::exp(u);
    return r / w.sphere_norm(r);
  }, std::log(eps), std::log(eps0), 1e-11);
  res.value = q.value;
  if (!q.converged) {
    res.certificate.push_back(inconclusive("modulus.spheres.value", anchor,
                                           "sphere norm of Q vanishes or is not integrable; the bound diverges"));
    res.value = kInf;
  }
  const Eigen::VectorXd x0 = w.center();
  res.extremal.family = Family::Spheres;
  res.extremal.eval = [w, x0](const Eigen::VectorXd& x) {
    const double r = (x - x0).norm();
    return r > 0.0 ? w(x) / w.sphere_norm(r) : 0.0;
  };

  // integral of rho_0^{n-1} over sampled spheres by direct sphere quadrature
  const double m = n - 1.0;
  double worst = kInf;
  for (int i = 0; i < sample_spheres; ++i) {
    const double r = eps * std::pow(eps0 / eps, (i + 0.5) / sample_spheres);
    const auto rho0 = res.extremal.eval;
    const double mass = unit_sphere_area(n) * std::pow(r, m) *
                        sphere_mean(n, [&](const Eigen::VectorXd& x) { return std::pow(rho0(x), m); }, x0, r);
    worst = std::min(worst, mass);
  }
  auto cert = make_check("modulus.spheres.admissible", anchor, worst, Relation::GreaterEq, 1.0, 1e-6,
                         "smallest sphere integral of rho_0^{n-1}");
  cert.samples = sample_spheres;
  res.certificate.push_back(cert);
  res.data = {{"eps", eps}, {"eps0", eps0}, {"value", number(res.value)}, {"weight", w.description()}};
  return res;
}

ModulusResult ring_upper_bound(const RadialWeight& w, const RingDomain& ring) {
  ring.validate();
  if (w.dimension() != ring.n) throw PreconditionError("ring upper bound: weight dimension mismatch");
  const int n = ring.n;
  const double m = n - 1.0;
  const std::string anchor = "modulus:ring-upper-bound";
  auto qroot = [&](double r) {
    const double q = w.sphere_power_mean(r, 1.0);
    if (!(q > 0.0) || !std::isfinite(q)) throw PreconditionError("ring upper bound: q must be positive on (r1, r2)");
    return std::pow(q, 1.0 / m);
  };
  for (int i = 0; i < 16; ++i) qroot(ring.r1 * std::pow(ring.r2 / ring.r1, (i + 0.5) / 16));
  auto I = integrate([&](double u) { return 1.0 / qroot(std::exp(u)); }, std::log(ring.r1), std::log(ring.r2), 1e-12);
  if (!I.converged) throw NumericalError("ring upper bound: integral I did not converge");
  if (!(I.value > 0.0)) throw PreconditionError("ring upper bound: degenerate weight, I = 0");
  ModulusResult res;
  res.method = Method::ClosedForm;
  res.value = unit_sphere_area(n) / std::pow(I.value, m);
  const double Iv = I.value;
  auto eta0 = [Iv, qroot](double r) { return 1.0 / (Iv * r * qroot(r)); };
  const Eigen::VectorXd x0 = ring.center;
  const double r1 = ring.r1, r2 = ring.r2;
  res.extremal.family = Family::Curves;
  res.extremal.eval = [eta0, x0, r1, r2](const Eigen::VectorXd& x) {
    const double r = (x - x0).norm();
    return r > r1 && r < r2 ? eta0(r) : 0.0;
  };
  // the normalization integral is taken in r, not in log r as for I
  auto total = integrate(eta0, r1, r2, 1e-13);
  res.certificate.push_back(make_check("modulus.ring.eta0-normalization", anchor, total.value, Relation::ApproxEq, 1.0,
                                       1e-9, "integral of eta_0 over (r1, r2)"));
  res.data = {{"r1", r1}, {"r2", r2}, {"n", n}, {"I", Iv}, {"value", res.value}, {"weight", w.description()}};
  return res;
}

namespace {

struct PolarGrid {
  int M = 0, N = 0;
  std::vector<double> edges;
  double dtheta = 0.0;
  double area(int i) const { return 0.5 * dtheta * (edges[i + 1] * edges[i + 1] - edges[i] * edges[i]); }
};

}  // namespace

ModulusResult grid_modulus_2d(const RingDomain& ring, double p, GridFamily family, const GridOptions& opts) {
  ring.validate();
  if (ring.n != 2) throw PreconditionError("grid modulus: the ring must be planar");
  if (!(p > 1.0)) throw PreconditionError("grid modulus: p must exceed 1");
  if (opts.resolution < 4) throw PreconditionError("grid modulus: resolution must be at least 4");
  const std::string anchor = "modulus:grid-modulus-2d";
  PolarGrid g;
  g.M = g.N = opts.resolution;
  g.dtheta = 2.0 * kPi / g.N;
  for (int i = 0; i <= g.M; ++i) g.edges.push_back(ring.r1 * std::pow(ring.r2 / ring.r1, static_cast<double>(i) / g.M));
  g.edges.back() = ring.r2;
  const int cells = g.M * g.N;
  auto cell = [&g](int i, int j) { return i * g.N + j; };

  int sb = 0, se = g.N;
  if (family != GridFamily::Separating) {
    sb = opts.sector_begin;
    se = opts.sector_end < 0 ? g.N : opts.sector_end;
    if (!(0 <= sb && sb < se && se <= g.N)) throw PreconditionError("grid modulus: invalid sector");
  }

  // one row per discrete curve: radial polylines (joining) or circles through cell midradii (separating)
  std::vector<Eigen::Triplet<double>> trips;
  int rows = 0;
  if (family != GridFamily::Separating) {
    for (int j = sb; j < se; ++j, ++rows)
      for (int i = 0; i < g.M; ++i) trips.emplace_back(rows, cell(i, j), g.edges[i + 1] - g.edges[i]);
  }
  if (family != GridFamily::Joining) {
    for (int i = 0; i < g.M; ++i, ++rows) {
      const double mid = 0.5 * (g.edges[i] + g.edges[i + 1]);
      for (int j = 0; j < g.N; ++j) trips.emplace_back(rows, cell(i, j), mid * g.dtheta);
    }
  }
  Eigen::SparseMatrix<double, Eigen::RowMajor> A(rows, cells);
  A.setFromTriplets(trips.begin(), trips.end());
  const Eigen::SparseMatrix<double> At = A.transpose();
  Eigen::VectorXd a(cells);
  for (int i = 0; i < g.M; ++i)
    for (int j = 0; j < g.N; ++j) a[cell(i, j)] = g.area(i);

  // Lagrange dual: rho(lambda) = (A^T lambda / (p a))^{1/(p-1)}, dual = sum lambda - (p-1) sum a rho^p
  const double e = 1.0 / (p - 1.0);
  auto primal = [&](const Eigen::VectorXd& lam) {
    Eigen::VectorXd s = At * lam;
    Eigen::VectorXd rho(cells);
    for (int c = 0; c < cells; ++c) rho[c] = s[c] > 0.0 ? std::pow(s[c] / (p * a[c]), e) : 0.0;
    return rho;
  };
  auto energy = [&](const Eigen::VectorXd& rho) {
    double s = 0.0;
    for (int c = 0; c < cells; ++c) s += a[c] * std::pow(rho[c], p);
    return s;
  };
  auto dual = [&](const Eigen::VectorXd& lam, const Eigen::VectorXd& rho) { return lam.sum() - (p - 1.0) * energy(rho); };

  // start from the value each curve would get on its own
  Eigen::VectorXd lam(rows);
  for (int k = 0; k < rows; ++k) {
    double s = 0.0;
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(A, k); it; ++it)
      s += it.value() * std::pow(it.value() / (p * a[it.col()]), e);
    lam[k] = std::pow(1.0 / s, p - 1.0);
  }

  double lower = -kInf, upper = kInf, gap = kInf, violation = kInf;
  Eigen::VectorXd best;
  int iter = 0;
  Eigen::VectorXd rho = primal(lam);
  double dval = dual(lam, rho);
  // minus the dual Hessian, A diag(rho / ((p - 1) A^T lambda)) A^T; curves are few, so it is kept dense
  const Eigen::SparseMatrix<double> Ac = A;
  auto hessian = [&](const Eigen::VectorXd& l, const Eigen::VectorXd& r) {
    const Eigen::VectorXd s = At * l;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(rows, rows);
    for (int c = 0; c < cells; ++c) {
      if (!(s[c] > 0.0)) continue;
      const double w = e * r[c] / s[c];
      for (Eigen::SparseMatrix<double>::InnerIterator i(Ac, c); i; ++i)
        for (Eigen::SparseMatrix<double>::InnerIterator j(Ac, c); j; ++j)
          H(i.row(), j.row()) += w * i.value() * j.value();
    }
    return H;
  };
  for (; iter < opts.max_iterations; ++iter) {
    const Eigen::VectorXd Arho = A * rho;
    const double smin = Arho.minCoeff();
    violation = std::max(0.0, 1.0 - smin);
    if (smin > 0.0) {
      const double u = energy(rho) / std::pow(smin, p);
      if (u < upper) {
        upper = u;
        best = rho / smin;
      }
    }
    lower = std::max(lower, dval);
    gap = (upper - lower) / upper;
    if (gap <= opts.tolerance) break;

    // projected Newton step on the dual: curves pinned at lambda = 0 with a descending gradient stay fixed
    const Eigen::VectorXd grad = Eigen::VectorXd::Ones(rows) - Arho;
    const Eigen::MatrixXd H = hessian(lam, rho);
    std::vector<int> free;
    for (int k = 0; k < rows; ++k)
      if (lam[k] > 0.0 || grad[k] > 0.0) free.push_back(k);
    const int f = static_cast<int>(free.size());
    Eigen::MatrixXd Hf(f, f);
    Eigen::VectorXd gf(f);
    for (int i = 0; i < f; ++i) {
      gf[i] = grad[free[i]];
      for (int j = 0; j < f; ++j) Hf(i, j) = H(free[i], free[j]);
    }
    Hf.diagonal().array() += 1e-14 * Hf.diagonal().maxCoeff() + 1e-300;
    const Eigen::VectorXd df = Hf.ldlt().solve(gf);
    Eigen::VectorXd dir = Eigen::VectorXd::Zero(rows);
    for (int i = 0; i < f; ++i) dir[free[i]] = df[i];
    if (!dir.allFinite() || dir.dot(grad) <= 0.0)
      for (int k = 0; k < rows; ++k) dir[k] = grad[k] / std::max(H(k, k), 1e-300);

    bool moved = false;
    double t = 1.0;
    for (int tries = 0; tries < 60; ++tries, t *= 0.5) {
      Eigen::VectorXd next = (lam + t * dir).cwiseMax(0.0);
      Eigen::VectorXd rn = primal(next);
      const double dn = dual(next, rn);
      if (dn >= dval) {
        moved = dn > dval || (next - lam).norm() > 0.0;
        lam = next;
        rho = rn;
        dval = dn;
        break;
      }
    }
    if (!moved) break;
  }
  if (!(gap <= opts.tolerance)) {
    std::ostringstream os;
    os << "grid modulus: no convergence after " << iter << " iterations (relative gap " << gap
       << ", constraint violation " << violation << ")";
    throw NumericalError(os.str());
  }

  ModulusResult res;
  res.method = Method::Grid;
  res.value = upper;
  const Eigen::VectorXd x0 = ring.center;
  const auto edges = g.edges;
  const int N = g.N;
  const double r1 = ring.r1, r2 = ring.r2;
  res.extremal.family = Family::Curves;
  res.extremal.eval = [best, edges, N, x0, r1, r2](const Eigen::VectorXd& x) {
    const Eigen::VectorXd d = x - x0;
    const double r = d.norm();
    if (!(r > r1 && r < r2)) return 0.0;
    const int M = static_cast<int>(edges.size()) - 1;
    int i = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), r) - edges.begin()) - 1;
    i = std::clamp(i, 0, M - 1);
    double th = std::atan2(d[1], d[0]);
    if (th < 0.0) th += 2.0 * kPi;
    const int j = std::clamp(static_cast<int>(th / (2.0 * kPi) * N), 0, N - 1);
    return best[i * N + j];
  };
  const Eigen::VectorXd lengths = A * best;
  res.certificate.push_back(make_check("modulus.grid.admissible", anchor, lengths.minCoeff(), Relation::GreaterEq, 1.0,
                                       1e-12, "smallest discrete length of an admissible curve"));
  res.certificate.push_back(make_check("modulus.grid.duality-gap", anchor, gap, Relation::LessEq, opts.tolerance, 0.0,
                                       "relative gap between primal value and dual bound"));
  const char* names[] = {"joining", "separating", "both"};
  res.data = {{"family", names[static_cast<int>(family)]},
              {"p", p},
              {"resolution", opts.resolution},
              {"curves", rows},
              {"value", upper},
              {"dual_bound", lower},
              {"iterations", iter}};
  if (p == 2.0 && family != GridFamily::Both) {
    const double L = std::log(ring.r2 / ring.r1);
    res.data["continuum"] =
        family == GridFamily::Joining ? 2.0 * kPi / L * (se - sb) / static_cast<double>(g.N) : L / (2.0 * kPi);
  }
  return res;
}

ReportList hesse_ziemer_check(const RingDomain& ring, const std::string& map_spec, int grid_resolution) {
  ring.validate();
  const ModelMap map = parse_map(map_spec);
  if (map.kind != MapKind::Identity && map.kind != MapKind::RadialStretch)
    throw PreconditionError("Hesse-Ziemer check: unsupported map " + map.description);
  if (map.n != ring.n) throw PreconditionError("Hesse-Ziemer check: map and ring dimensions differ");
  const int n = ring.n;
  const std::string anchor = "modulus:hesse-ziemer";
  ReportList rows;

  // images of the boundary spheres, checked on sampled points
  const double s1 = std::pow(ring.r1, map.alpha), s2 = std::pow(ring.r2, map.alpha);
  double spread = 0.0;
  for (int i = 0; i < 64; ++i) {
    Eigen::VectorXd d(n);
    for (int c = 0; c < n; ++c) d[c] = std::cos(2.0 * kPi * radical_inverse(i + 1, 2 + c) + c);
    d.normalize();
    spread = std::max(spread, std::abs(map(ring.center + ring.r1 * d).norm() - s1) / s1);
    spread = std::max(spread, std::abs(map(ring.center + ring.r2 * d).norm() - s2) / s2);
  }
  rows.push_back(make_check("hz.image-spheres", anchor, spread, Relation::LessEq, 1e-12, 0.0,
                            "relative deviation of mapped boundary points from the image radii"));

  const RingDomain image = RingDomain::make(s1, s2, n);
  const auto one = RadialWeight::radial(n, [](double) { return 1.0; }, "const:c=1");
  const double MD = ring_upper_bound(one, image).value;
  const double MS = spheres_lower_bound(one, s1, s2).value;
  const double rhs = 1.0 / std::pow(MS, n - 1.0);
  auto ineq = make_check("hz.inequality", anchor, MD, Relation::LessEq, rhs, 1e-9 * rhs,
                         "M(Delta) against 1 / M(Sigma)^{n-1} on the image ring");
  ineq.slack.push_back({"image-r1", s1});
  ineq.slack.push_back({"image-r2", s2});
  rows.push_back(ineq);
  rows.push_back(make_check("hz.equality", anchor, MD, Relation::ApproxEq, rhs, 1e-9 * rhs,
                            "spherically symmetric case"));

  if (n == 2) {
    GridOptions o;
    o.resolution = grid_resolution;
    const double gj = grid_modulus_2d(image, 2.0, GridFamily::Joining, o).value;
    const double gs = grid_modulus_2d(image, 2.0, GridFamily::Separating, o).value;
    rows.push_back(make_check("hz.grid.joining", anchor, gj, Relation::ApproxEq, MD, 0.02 * MD));
    rows.push_back(make_check("hz.grid.separating", anchor, gs, Relation::ApproxEq, MS, 0.02 * MS));
    rows.push_back(make_check("hz.grid.product", anchor, gj * gs, Relation::ApproxEq, 1.0, 0.05,
                              "grid M(Delta) M(Sigma)"));
  }
  return rows;
}

}  // namespace orliczlab
