#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "orliczlab/numerics.hpp"
#include "orliczlab/orlicz.hpp"
#include "orliczlab/oscillation.hpp"

using namespace orliczlab;

namespace {

Eigen::VectorXd pt(double x, double y) {
  Eigen::VectorXd v(2);
  v << x, y;
  return v;
}

bool rows_pass(const ReportList& rows) {
  bool ok = true;
  for (const auto& r : rows) {
    CHECK_MESSAGE(r.status == Status::Pass, r.check_id << " " << r.lhs << " " << r.rhs);
    ok = ok && r.status == Status::Pass;
  }
  return ok;
}

// mean of |u - c| over the unit disk for a radial u, by Simpson in the radius
double radial_deviation(const std::function<double(double)>& u, double c) {
  return oracle::richardson([&](double r) { return r == 0.0 ? 0.0 : 2.0 * r * std::abs(u(r) - c); }, 0.0, 1.0, 1 << 16);
}

// area of the intersection of disks of radii a and b with centers d apart
double lens_area(double a, double b, double d) {
  if (d >= a + b) return 0.0;
  if (d <= std::abs(a - b)) return kPi * std::min(a, b) * std::min(a, b);
  const double x = std::acos((d * d + a * a - b * b) / (2.0 * d * a));
  const double y = std::acos((d * d + b * b - a * a) / (2.0 * d * b));
  return a * a * (x - 0.5 * std::sin(2.0 * x)) + b * b * (y - 0.5 * std::sin(2.0 * y));
}

}  // namespace

TEST_CASE("mean oscillation basics") {
  const auto z = pt(0.0, 0.0);
  CHECK(mean_oscillation(constant_field(3.0), z, 0.7) <= 1e-14);
  CHECK(mean_oscillation(half_plane_field(), z, 1.0) == doctest::Approx(0.5).epsilon(1e-12));

  // log(1/|z|) on B(0, eps): mean log(1/eps) + 1/2, oscillation 2 * e^{-1}/2
  auto u = log_recip_field();
  for (double eps : {1.0, 0.25, 1e-3}) {
    CHECK(ball_mean(u, z, eps) == doctest::Approx(-std::log(eps) + 0.5).epsilon(1e-6));
    const double ref = radial_deviation([](double r) { return -std::log(r); }, 0.5);
    CHECK(mean_oscillation(u, z, eps) == doctest::Approx(ref).epsilon(1e-4));
  }

  // off-center ball: oscillation stays bounded and is invariant under adding a constant
  auto shifted = u;
  shifted.eval = [](const Eigen::VectorXd& x) { return -std::log(x.norm()) + 7.0; };
  const auto c = pt(0.3, 0.1);
  const double a = mean_oscillation(u, c, 0.5), b = mean_oscillation(shifted, c, 0.5);
  CHECK(a > 0.0);
  CHECK(a < 1.0);
  CHECK(std::abs(a - b) <= 1e-12);

  // oscillation about the mean never exceeds twice the deviation from any constant
  for (double k : {-1.0, 0.0, 0.5, 2.0}) CHECK(a <= 2.0 * mean_deviation(u, c, 0.5, k) + 1e-12);

  CHECK_THROWS_AS(mean_oscillation(u, z, 2.0), PreconditionError);
  CHECK_THROWS_AS(ball_mean(inverse_square_field(), z, 0.5), NumericalError);
}

TEST_CASE("three dimensional balls") {
  Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
  BallQuadrature q;
  q.radial = 64;
  q.angular = 64;
  auto u = constant_field(1.0, 3);
  u.eval = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  // mean of |x|^2 over the unit ball is 3/5
  CHECK(ball_mean(u, z, 1.0, q) == doctest::Approx(0.6).epsilon(1e-10));
  CHECK(mean_oscillation(half_plane_field(3), z, 1.0, q) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fmo at a point") {
  const auto z = pt(0.0, 0.0);
  auto grid = dyadic_grid(0.5, 8);
  auto r = fmo_at_point(log_recip_field(), z, grid, [](double e) { return -std::log(e); });
  CHECK(r.evidence == "EVIDENCE-FOR");
  CHECK(r.means.back() > r.means.front());
  for (std::size_t i = 1; i < r.means.size(); ++i) CHECK(r.means[i] - r.means[i - 1] == doctest::Approx(std::log(2.0)));
  CHECK(r.max_oscillation < 1.0);
  CHECK(rows_pass(r.rows));
  REQUIRE(r.rows.size() == 2);

  auto c = fmo_at_point(constant_field(2.0), z, grid);
  for (double o : c.oscillation) CHECK(o <= 1e-14);
  CHECK(c.evidence == "EVIDENCE-FOR");

  // continuous field: oscillation tends to zero
  auto smooth = constant_field(0.0);
  smooth.eval = [](const Eigen::VectorXd& x) { return std::sin(3.0 * x[0]) + x[1] * x[1]; };
  auto s = fmo_at_point(smooth, pt(0.2, 0.1), grid);
  CHECK(s.oscillation.back() < 1e-2 * s.oscillation.front());

  auto inv = fmo_at_point(inverse_square_field(), z, grid);
  CHECK(inv.evidence == "NOT-FMO-EVIDENCE");
  CHECK(inv.rows[0].status == Status::Fail);
  CHECK(inv.rows[0].note.find("not converged") != std::string::npos);
  CHECK_THROWS_AS(fmo_at_point(log_recip_field(), z, {0.5}), PreconditionError);
}

TEST_CASE("example 1") {
  auto ex = build_example1(2.0);
  CHECK(rows_pass(ex.rows));
  const auto disk = ex.data["disk_lp"].get<std::vector<double>>();
  REQUIRE(disk.size() == 6);
  for (double v : disk) CHECK(std::abs(v - kPi) <= 1e-9 * kPi);
  const auto partial = ex.data["partial_lp"].get<std::vector<double>>();
  for (std::size_t i = 0; i < partial.size(); ++i) CHECK(partial[i] == doctest::Approx(kPi * (i + 1)).epsilon(1e-9));
  // integral over D(eps_N) against the direct series pi sum_{n >= N} 2^{-2 n^2}
  const auto ball = ex.data["ball_integral"].get<std::vector<double>>();
  for (int N = 3; N <= 6; ++N) {
    double ref = 0.0;
    for (int n = N; n <= 40; ++n) ref += kPi * std::ldexp(1.0, -2 * n * n);
    CHECK(ball[N - 2] == doctest::Approx(ref).epsilon(1e-9));
  }
  CHECK(ex.field(pt(0.9, 0.9)) == 0.0);
  CHECK(ex.field(pt(0.5, 0.0)) == 4.0);
  CHECK_THROWS_AS(build_example1(1.1, 6), PreconditionError);
  CHECK_THROWS_AS(build_example1(1.0), PreconditionError);
}

TEST_CASE("example 2") {
  auto ex = build_example2(0.5);
  CHECK(rows_pass(ex.rows));
  // integral of exp(1/(|z|^2 - 1)) over the unit disk is pi (e^{-1} - E_1(1))
  const double I = kPi * (std::exp(-1.0) + std::expint(-1.0));
  CHECK(ex.data["I"].get<double>() == doctest::Approx(I).epsilon(1e-10));
  const auto lp = ex.data["ball_lp"].get<std::vector<double>>();
  for (double v : lp) CHECK(std::abs(v / lp.front() - 1.0) <= 1e-6);
  const double Ip = 2.0 * kPi * oracle::richardson([](double r) {
    return r >= 1.0 ? 0.0 : r * std::exp(1.5 / (r * r - 1.0));
  }, 0.0, 1.0, 1 << 14);
  CHECK(lp.front() == doctest::Approx(Ip).epsilon(1e-8));
  for (const auto& r : ex.rows)
    if (r.check_id.rfind("example2.J-bound", 0) == 0) CHECK(r.lhs <= r.rhs);
  CHECK(ex.data["k_max"] == 5);
  CHECK_THROWS_AS(build_example2(0.5, 2), PreconditionError);
}

TEST_CASE("ball integrals of bump fields") {
  // indicator bumps: exact lens areas
  const auto ex = build_example1(2.0, 3);
  const auto& u = ex.field;
  for (auto [cx, eps] : {std::pair{0.5, 0.3}, {0.3, 0.2}, {0.0, 0.5}, {0.0, 0.25}, {0.12, 0.13}}) {
    const auto c = pt(cx, 0.0);
    double integral = 0.0, covered = 0.0;
    for (const auto& b : u.bumps) {
      const double l = lens_area(eps, b.radius, std::abs(b.center[0] - cx));
      integral += std::exp(b.log_amplitude) * l;
      covered += l;
    }
    const double area = kPi * eps * eps;
    const double mean = integral / area;
    CHECK(ball_mean(u, c, eps) == doctest::Approx(mean).epsilon(1e-9));
    double dev = std::abs(mean) * (area - covered);
    for (const auto& b : u.bumps)
      dev += std::abs(std::exp(b.log_amplitude) - mean) * lens_area(eps, b.radius, std::abs(b.center[0] - cx));
    CHECK(mean_oscillation(u, c, eps) == doctest::Approx(dev / area).epsilon(1e-9));
    CHECK(mean_deviation(u, c, eps, 1.0) > 0.0);
  }

  // both examples look like FMO at the origin
  for (const char* spec : {"example1:p=2", "example2:delta=0.5"}) {
    auto r = fmo_at_point(parse_field(spec), pt(0.0, 0.0), dyadic_grid(0.5, 8));
    CHECK(r.evidence == "EVIDENCE-FOR");
    CHECK(rows_pass(r.rows));
    CHECK(r.max_oscillation < 1.0);
  }
}

TEST_CASE("field specs") {
  CHECK(parse_field("log-recip").description == "log(1/|z|)");
  CHECK(parse_field("const:c=2")(pt(0.1, 0.1)) == 2.0);
  CHECK(parse_field("example2:delta=0.5").bumps.size() == 4);
  CHECK_THROWS_AS(parse_field("nope"), ValidationError);

  const std::string path = "oscillation_table_test.csv";
  {
    std::ofstream out(path);
    out << "x,y,value\n";
    for (int i = 0; i <= 4; ++i)
      for (int j = 0; j <= 4; ++j) out << -1.0 + 0.5 * i << "," << -1.0 + 0.5 * j << "," << 2.0 * (-1.0 + 0.5 * i) << "\n";
  }
  auto t = parse_field("table:" + path);
  CHECK(t(pt(0.3, -0.2)) == doctest::Approx(0.6));
  CHECK(ball_mean(t, pt(0.0, 0.0), 1.0) == doctest::Approx(0.0).epsilon(1e-12));
  std::remove(path.c_str());
}
