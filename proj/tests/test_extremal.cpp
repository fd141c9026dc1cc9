#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "orliczlab/extremal.hpp"
#include "orliczlab/numerics.hpp"

using namespace orliczlab;

namespace {

const ExtremalProfile& square_profile(int k, bool rescale = false) {
  static std::map<std::pair<int, bool>, ExtremalProfile> cache;
  auto key = std::make_pair(k, rescale);
  auto it = cache.find(key);
  if (it == cache.end()) {
    ProfileOptions o;
    o.rescale = rescale;
    it = cache.emplace(key, build_profile(OrliczFunction::power(2), k, o)).first;
  }
  return it->second;
}

// log h at s = e^{-kappa}: s t log t = 1 solved by bisection in u = log t
double log_h_oracle_k2(double kappa) {
  double lo = 1e-300, hi = kappa + 50.0;
  for (int i = 0; i < 300; ++i) {
    double mid = 0.5 * (lo + hi);
    (mid + std::log(mid) > kappa ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double h_oracle_k2(double s) { return std::exp(log_h_oracle_k2(-std::log(s))); }

// 2 s (t - sqrt t) = 1
double h_oracle_k3(double s) {
  const double x = 0.5 * (1.0 + std::sqrt(1.0 + 2.0 / s));
  return x * x;
}

}  // namespace

TEST_CASE("big phi and psi match closed forms") {
  const auto& p2 = square_profile(2);
  const auto& p3 = square_profile(3);
  for (double t : {1.0 + 1e-9, 1.001, 1.5, 10.0, 1e3, 1e8, 1e100}) {
    CHECK(p2.big_phi(t) == doctest::Approx(std::log(t)).epsilon(1e-8));
    CHECK(p2.psi(t) == doctest::Approx(1.0 / (t * std::log(t))).epsilon(1e-8));
    CHECK(p3.big_phi(t) == doctest::Approx(2.0 * (std::sqrt(t) - 1.0)).epsilon(1e-8));
    CHECK(p3.psi(t) == doctest::Approx(1.0 / (std::sqrt(t) * 2.0 * (std::sqrt(t) - 1.0))).epsilon(1e-8));
  }
  CHECK(p2.big_phi(1.0) == 0.0);
  double prev = 0.0, prev_psi = kInf;
  for (int j = 30; j >= 0; --j) {
    const double t = 1.0 + std::ldexp(1.0, -j);
    CHECK(p2.big_phi(t) > prev);
    CHECK(p2.psi(t) < prev_psi);
    prev = p2.big_phi(t);
    prev_psi = p2.psi(t);
  }
}

TEST_CASE("h inverts psi") {
  for (int k : {2, 3}) {
    const auto& p = square_profile(k);
    double prev = 1.0 / 0.0;
    for (double ls = -12; ls <= 1.0; ls += 0.25) {
      const double s = std::pow(10.0, ls);
      const double h = p.h(s);
      CHECK(h > 1.0);
      CHECK(h < prev);
      prev = h;
      CHECK(std::abs(p.psi(h) / s - 1.0) <= 1e-9);
      const double ref = k == 2 ? h_oracle_k2(s) : h_oracle_k3(s);
      CHECK(h == doctest::Approx(ref).epsilon(1e-8));
    }
  }
  // far below the double range of s
  const auto& p2 = square_profile(2);
  const double lam = 1e6;
  const double lh = p2.log_h_at(lam);
  const double v = lh + std::log(-std::expm1(-lh));
  CHECK(std::abs(p2.log_psi_v(v) + lam) <= 1e-9 * lam);
}

TEST_CASE("reduced variable far below the double range") {
  ProfileOptions o;
  o.lambda_max = 1e30;
  auto p = build_profile(OrliczFunction::power(2), 2, o);
  for (double kappa : {50.0, 99.0, 101.0, 1e3, 1e8, 1e15, 1e20, 1e29}) {
    // L + log L = kappa with D = log L
    double L = kappa;
    for (int i = 0; i < 100; ++i) L = kappa - std::log(L);
    CHECK(p.reduced_at(kappa) == doctest::Approx(std::log(L)).epsilon(1e-10));
  }
  CHECK(p.reduced_at(100.0 - 1e-9) == doctest::Approx(p.reduced_at(100.0)).epsilon(1e-9));
  // F grows like log(lambda) deep down
  const double d = p.F_at(1e25) - p.F_at(1e20);
  CHECK(d == doctest::Approx(std::log(1e5)).epsilon(1e-6));
}

TEST_CASE("F chain and closed values") {
  for (int k : {2, 3}) {
    const auto& p = square_profile(k);
    CHECK(p.F(1.0) == 0.0);
    CHECK(p.F(2.0) == 0.0);
    double prevF = 0.0, prevD = -kInf;
    for (double ls = 0.0; ls >= -12.0; ls -= 0.125) {
      const double t = std::pow(10.0, ls);
      const double F = p.F(t);
      CHECK(F >= prevF);
      prevF = F;
    }
    for (double ls = -12.0; ls < 0.0; ls += 0.125) {
      const double d = p.dF(std::pow(10.0, ls));
      CHECK(d <= 0.0);
      CHECK(d >= prevD);
      prevD = d;
    }
    auto href = [k](double s) { return k == 2 ? h_oracle_k2(s) : h_oracle_k3(s); };
    const double h1 = href(1.0);
    CHECK(p.h1() == doctest::Approx(h1).epsilon(1e-10));
    for (double t : {0.5, 0.1, 1e-3}) {
      const double ref = oracle::richardson_log([&](double s) { return href(s) - h1; }, t, 1.0, 1 << 12);
      CHECK(p.F(t) == doctest::Approx(ref).epsilon(1e-8));
    }
  }
}

TEST_CASE("energy tables") {
  const auto& p3 = square_profile(3);
  // sigma_2 int_0^1 (h - h1)^2 t^2 dt, integrand bounded near 0
  const double h1 = h_oracle_k3(1.0);
  const double ref = 4.0 * kPi * oracle::richardson([&](double t) {
    if (t == 0.0) return 0.25;
    const double d = h_oracle_k3(t) - h1;
    return d * d * t * t;
  }, 0.0, 1.0, 1 << 14);
  CHECK(p3.raw_energy() == doctest::Approx(ref).epsilon(1e-5));

  for (int k : {2, 3}) {
    const auto& raw = square_profile(k);
    const auto& p = square_profile(k, true);
    CHECK(radial_energy(p, 1.0) <= 1.0);
    CHECK(radial_energy(p, 5.0) == radial_energy(p, 1.0));
    if (raw.raw_energy() > 1.0) {
      CHECK(p.scale() > 1.0);
      CHECK(radial_energy(p, 1.0) == doctest::Approx(1.0).epsilon(1e-9));
    } else {
      CHECK(p.scale() == 1.0);
    }
    CHECK(radial_energy(raw, 1.0) == doctest::Approx(raw.raw_energy()).epsilon(1e-12));
    CHECK(radial_energy(p, 0.5) <= radial_energy(p, 0.7));
    double prev = radial_energy(p, 1.0);
    for (int j = 1; j <= 60; ++j) {
      const double e = radial_energy(p, std::ldexp(1.0, -j));
      CHECK(e < prev);
      prev = e;
    }
    CHECK(p.energy_at(1e8) < 1e-6);
    CHECK(p.F(0.1) * p.scale() == doctest::Approx(raw.F(0.1)).epsilon(1e-12));
    // off-node and on-node evaluation agree
    CHECK(p.energy_at(40.0) == doctest::Approx(p.energy_at(40.0 + 1e-9)).epsilon(1e-6));
    CHECK_THROWS_AS(radial_energy(p, 0.0), PreconditionError);
  }
}

TEST_CASE("calderon pair") {
  for (int k : {2, 3}) {
    const auto& p = square_profile(k);
    auto rows = verify_calderon_pair(p, 1e-100);
    REQUIRE(rows.size() == 3);
    for (const auto& r : rows) CHECK_MESSAGE(r.status == Status::Pass, r.check_id << " " << r.note);
  }
  const auto& p = square_profile(2);
  CHECK(p.h_integral_at(std::log(2.0)) > 0.0);
  CHECK(p.h_integral_at(std::log(2.0)) < p.h_integral_at(std::log(4.0)));

  auto rows = verify_calderon_pair(p, 1e-100);
  double value = 0.0;
  for (const auto& s : rows[2].slack)
    if (s.name == "value") value = s.value;
  // int_0^1 h^2 s ds in kappa = log(1/s); the integrand decays like 1/kappa^2
  auto f = [](double kappa) {
    const double hs = std::exp(log_h_oracle_k2(kappa) - kappa);
    return hs * hs;
  };
  const double K = 1e5;
  const double ref = oracle::richardson(f, 0.0, 1.0, 1 << 12) + oracle::richardson_log(f, 1.0, K, 1 << 14) + K * f(K);
  CHECK(value == doctest::Approx(ref).epsilon(0.01));
}

TEST_CASE("build preconditions") {
  CHECK_THROWS_AS(build_profile(OrliczFunction::power(3), 2), PreconditionError);
  CHECK_THROWS_AS(build_profile(OrliczFunction::power(2), 1), PreconditionError);
  const auto& p = square_profile(2);
  CHECK_THROWS_AS(p.F(std::exp(-2e10)), PreconditionError);
  CHECK_THROWS_AS(p.log_h_at(2e10), DepthError);
  auto j = p.to_json();
  CHECK(j["k"] == 2);
  CHECK(j["radial_table"]["lambda"].size() == j["radial_table"]["F"].size());
}

TEST_CASE("diameter and area bounds") {
  ConstantsConfig c;
  auto phi = OrliczFunction::power(3);
  CHECK(cube_diameter_bound(phi, 2, 1, 1.0, c) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-6));
  CHECK(cube_diameter_bound(phi, 2, 2, 1.0, c) == 2.0 * cube_diameter_bound(phi, 2, 1, 1.0, c));
  CHECK(cube_diameter_bound(phi, 2, 1, 0.0, c) == 0.0);
  CHECK(hausdorff_area_bound(phi, 2, 1, 1.0, c) == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(hausdorff_area_bound(phi, 2, 1, 0.0, c) == 0.0);
  CHECK(hausdorff_area_bound(phi, 2, 1, 2.0, c) == doctest::Approx(2.0 * hausdorff_area_bound(phi, 2, 1, 1.0, c)));
  c.set("alpha_k", 1.7);
  for (double e : {0.3, 1.0, 4.0}) {
    const double d = cube_diameter_bound(phi, 2, 1, e, c);
    CHECK(hausdorff_area_bound(phi, 2, 1, e, c) == doctest::Approx(d * d).epsilon(1e-12));
  }
  CHECK_THROWS_AS(cube_diameter_bound(OrliczFunction::power(2), 2, 1, 1.0, c), PreconditionError);
}
