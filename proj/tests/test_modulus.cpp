#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "orliczlab/modulus.hpp"
#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"

using namespace orliczlab;

namespace {

const double E = std::exp(1.0);

RadialWeight constant(double c, int n) { return RadialWeight::radial(n, [c](double) { return c; }, "const"); }

bool rows_pass(const ReportList& rows) {
  bool ok = true;
  for (const auto& r : rows) {
    CHECK_MESSAGE(r.status == Status::Pass, r.check_id << " " << r.lhs << " " << r.rhs << " " << r.note);
    ok = ok && r.status == Status::Pass;
  }
  return ok;
}

// exact value of the discrete p = 2 program when every curve owns its cells:
// a curve with lengths l_i over cells of area a_i contributes 1 / sum(l_i^2 / a_i)
double discrete_joining(double r1, double r2, int res) {
  const double dth = 2.0 * kPi / res;
  double s = 0.0;
  for (int i = 0; i < res; ++i) {
    const double a = r1 * std::pow(r2 / r1, double(i) / res), b = r1 * std::pow(r2 / r1, double(i + 1) / res);
    s += (b - a) * (b - a) / (0.5 * dth * (b * b - a * a));
  }
  return res / s;
}

double discrete_separating(double r1, double r2, int res) {
  const double dth = 2.0 * kPi / res;
  double total = 0.0;
  for (int i = 0; i < res; ++i) {
    const double a = r1 * std::pow(r2 / r1, double(i) / res), b = r1 * std::pow(r2 / r1, double(i + 1) / res);
    const double l = 0.5 * (a + b) * dth, area = 0.5 * dth * (b * b - a * a);
    total += 1.0 / (res * l * l / area);
  }
  return total;
}

}  // namespace

TEST_CASE("surface norms") {
  CHECK(surface_norm(constant(1.0, 3), 2.0) == doctest::Approx(4.0 * std::sqrt(kPi)).epsilon(1e-10));
  CHECK(surface_norm(constant(2.5, 3), 2.0) == doctest::Approx(2.5 * 4.0 * std::sqrt(kPi)).epsilon(1e-10));
  CHECK(surface_norm(constant(1.0, 2), 1.0) == doctest::Approx(2.0 * kPi).epsilon(1e-12));
  CHECK_THROWS_AS(surface_norm(constant(1.0, 3), 0.0), PreconditionError);
}

TEST_CASE("closed-form bounds") {
  auto s = spheres_lower_bound(constant(1.0, 3), 1.0, E);
  CHECK(s.value == doctest::Approx(1.0 / std::sqrt(4.0 * kPi)).epsilon(1e-10));
  CHECK(rows_pass(s.certificate));
  Eigen::VectorXd x(3);
  x << 0.3, 1.1, -0.7;
  CHECK(s.extremal(x) * surface_norm(constant(1.0, 3), x.norm()) == doctest::Approx(1.0));

  // Q -> cQ: the extremal is unchanged and the value scales by 1/c
  auto s3 = spheres_lower_bound(constant(3.0, 3), 1.0, E);
  CHECK(s3.value == doctest::Approx(s.value / 3.0).epsilon(1e-10));
  CHECK(s3.extremal(x) == doctest::Approx(s.extremal(x)));
  CHECK(rows_pass(s3.certificate));

  // Q = r^2: surface norm sqrt(4 pi) r^3
  auto w = parse_weight("pow:a=2", 3);
  auto sw = spheres_lower_bound(w, 0.5, 2.0);
  const double ref = oracle::richardson([](double r) { return 1.0 / (std::sqrt(4.0 * kPi) * r * r * r); }, 0.5, 2.0);
  CHECK(sw.value == doctest::Approx(ref).epsilon(1e-9));
  CHECK(rows_pass(sw.certificate));

  auto ring = RingDomain::make(1.0, E, 3);
  auto u = ring_upper_bound(constant(1.0, 3), ring);
  CHECK(u.value == doctest::Approx(4.0 * kPi).epsilon(1e-10));
  CHECK(rows_pass(u.certificate));
  CHECK(std::abs(u.certificate[0].lhs - 1.0) <= 1e-9);
  CHECK(ring_upper_bound(constant(2.0, 3), ring).value == doctest::Approx(8.0 * kPi).epsilon(1e-10));

  // q = r^2: I = 1 - 1/e
  const double I = oracle::richardson([](double r) { return 1.0 / (r * r); }, 1.0, E);
  auto uw = ring_upper_bound(w, ring);
  CHECK(uw.value == doctest::Approx(4.0 * kPi / (I * I)).epsilon(1e-9));
  CHECK(rows_pass(uw.certificate));

  CHECK_THROWS_AS(RingDomain::make(2.0, 1.0, 3), PreconditionError);
  CHECK_THROWS_AS(spheres_lower_bound(constant(1.0, 3), 2.0, 1.0), PreconditionError);
  CHECK_THROWS_AS(ring_upper_bound(constant(0.0, 3), ring), PreconditionError);
}

TEST_CASE("grid modulus of the annulus") {
  auto ring = RingDomain::make(1.0, E, 2);
  std::vector<double> joining;
  for (int res : {64, 128, 256}) {
    GridOptions o;
    o.resolution = res;
    auto j = grid_modulus_2d(ring, 2.0, GridFamily::Joining, o);
    auto s = grid_modulus_2d(ring, 2.0, GridFamily::Separating, o);
    CHECK(rows_pass(j.certificate));
    CHECK(rows_pass(s.certificate));
    CHECK(j.value == doctest::Approx(discrete_joining(1.0, E, res)).epsilon(1e-9));
    CHECK(s.value == doctest::Approx(discrete_separating(1.0, E, res)).epsilon(1e-9));
    CHECK(std::abs(j.value / (2.0 * kPi) - 1.0) <= 0.02);
    CHECK(std::abs(s.value * 2.0 * kPi - 1.0) <= 0.02);
    CHECK(std::abs(j.value * s.value - 1.0) <= 0.05);
    joining.push_back(j.value);
  }
  CHECK(std::abs(joining[2] - joining[1]) * 2.0 <= std::abs(joining[1] - joining[0]));

  GridOptions o;
  o.resolution = 128;
  const double base = grid_modulus_2d(ring, 2.0, GridFamily::Joining, o).value;
  // a larger ring has smaller joining modulus
  CHECK(grid_modulus_2d(RingDomain::make(1.0, std::exp(1.5), 2), 2.0, GridFamily::Joining, o).value < base);
  // sector subadditivity
  GridOptions left = o, right = o;
  left.sector_end = 64;
  right.sector_begin = 64;
  const double sum = grid_modulus_2d(ring, 2.0, GridFamily::Joining, left).value +
                     grid_modulus_2d(ring, 2.0, GridFamily::Joining, right).value;
  CHECK(base <= sum * (1.0 + 1e-9));

  // spheres_lower_bound in the plane matches the separating grid modulus
  const double closed = spheres_lower_bound(constant(1.0, 2), 1.0, E).value;
  CHECK(std::abs(grid_modulus_2d(ring, 2.0, GridFamily::Separating).value / closed - 1.0) <= 0.02);

  CHECK_THROWS_AS(grid_modulus_2d(ring, 1.0, GridFamily::Joining, o), PreconditionError);
  CHECK_THROWS_AS(grid_modulus_2d(RingDomain::make(1.0, E, 3), 2.0, GridFamily::Joining, o), PreconditionError);
}

TEST_CASE("grid solver on coupled constraints") {
  // joining curves in half of the sectors plus all circles: with log(r2/r1) = 1.6 pi
  // neither single-family extremal is admissible for the union
  auto ring = RingDomain::make(1.0, std::exp(1.6 * kPi), 2);
  GridOptions o;
  o.resolution = 64;
  o.sector_end = 32;
  for (double p : {1.5, 2.0, 3.0}) {
    auto j = grid_modulus_2d(ring, p, GridFamily::Joining, o);
    auto s = grid_modulus_2d(ring, p, GridFamily::Separating, o);
    auto b = grid_modulus_2d(ring, p, GridFamily::Both, o);
    CHECK(rows_pass(b.certificate));
    CHECK(b.value > std::max(j.value, s.value) * (1.0 + 1e-6));
    CHECK(b.value <= (j.value + s.value) * (1.0 + 1e-9));
    CHECK(b.data["dual_bound"].get<double>() <= b.value);
    CHECK(b.data["iterations"].get<int>() > 0);
  }
  // the discrete extremal is admissible: every radial polyline has length >= 1
  auto b = grid_modulus_2d(ring, 2.0, GridFamily::Both, o);
  const int steps = 20000;
  double len = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double t = (i + 0.5) / steps;
    const double r = std::exp(1.6 * kPi * t);
    Eigen::VectorXd x(2);
    x << r * std::cos(0.3), r * std::sin(0.3);
    len += b.extremal(x) * r * 1.6 * kPi / steps;
  }
  CHECK(len >= 1.0 - 1e-3);
}

TEST_CASE("Hesse-Ziemer check") {
  CHECK(rows_pass(hesse_ziemer_check(RingDomain::make(1.0, E, 3), "identity:n=3")));
  auto rows = hesse_ziemer_check(RingDomain::make(1.0, E, 3), "stretch:alpha=2,n=3");
  CHECK(rows_pass(rows));
  // image ring (1, e^2): 4 pi / 2^2
  CHECK(rows[1].lhs == doctest::Approx(kPi).epsilon(1e-10));
  CHECK(rows_pass(hesse_ziemer_check(RingDomain::make(1.0, E, 2), "identity:n=2", 128)));
  CHECK(rows_pass(hesse_ziemer_check(RingDomain::make(1.0, E, 2), "stretch:alpha=0.5,n=2", 128)));
  CHECK_THROWS_AS(hesse_ziemer_check(RingDomain::make(1.0, E, 3), "stretch:alpha=2,n=2"), PreconditionError);
  CHECK_THROWS_AS(hesse_ziemer_check(RingDomain::make(1.0, E, 3), "shear:k=2,depth=2"), PreconditionError);
}
