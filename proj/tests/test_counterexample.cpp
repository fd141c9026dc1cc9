#include <doctest.h>

#include <cmath>
#include <map>

#include "oracles.hpp"
#include "orliczlab/counterexample.hpp"
#include "orliczlab/numerics.hpp"

using namespace orliczlab;

namespace {

const CounterexampleModel& model(int k, int depth) {
  static std::map<std::pair<int, int>, CounterexampleModel> cache;
  auto key = std::make_pair(k, depth);
  auto it = cache.find(key);
  if (it == cache.end()) {
    CounterexampleOptions o;
    o.depth = depth;
    it = cache.emplace(key, build_sequences("pow:p=2", k, o)).first;
  }
  return it->second;
}

// For phi(t) = t^2 and k = 2 the shifted gauge is t^2 + 4t, g = 1/(t + 4) and
// s h(s) = 1/w - 4 s with w + log w = log(1/s) - log 5.
double w_of(double kappa) {
  const double rhs = kappa - std::log(5.0);
  double lo = 1e-300, hi = std::max(1.0, rhs + 1.0);
  for (int i = 0; i < 400; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid + std::log(mid) > rhs ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

double h1_oracle() { return 5.0 * std::exp(w_of(0.0)) - 4.0; }

// (h(s) - h(1)) s at s = e^{-kappa}
double q_oracle(double kappa) { return 1.0 / w_of(kappa) - (4.0 + h1_oracle()) * std::exp(-kappa); }

// c (F(e^{-b}) - F(e^{-a}))
double F_diff_oracle(double a, double b) {
  return oracle::richardson_log(q_oracle, a, b, 1 << 12);
}

// sigma int_0^{e^{-lambda}} phi_*(|F'|) t dt for the scaled profile
double energy_oracle(double lambda, double c) {
  auto dens = [c](double kappa) {
    const double q = q_oracle(kappa);
    return 2.0 * kPi * (q * q / (c * c) + 4.0 * q * std::exp(-kappa) / c);
  };
  // beyond K the density is 2 pi / (c w)^2 with w close to kappa - log kappa
  const double K = 1e15;
  const double tail = 2.0 * kPi / (c * c * (K - std::log(K)));
  return oracle::richardson_log(dens, lambda, K, 1 << 14) + tail;
}

bool all_pass_msg(const ReportList& rows) {
  bool ok = true;
  for (const auto& r : rows) {
    CHECK_MESSAGE(r.status == Status::Pass, r.check_id << " " << r.lhs << " " << r.rhs << " " << r.note);
    ok = ok && r.status == Status::Pass;
  }
  return ok;
}

}  // namespace

TEST_CASE("counterexample sequences") {
  const auto& m = model(2, 5);
  REQUIRE(m.depth() == 5);
  CHECK(m.level(1).log_r <= std::log(0.25));
  CHECK(all_pass_msg(check_invariants(m)));
  CHECK(all_pass_msg(check_invariants(model(2, 3))));
  for (int l = 1; l <= 5; ++l) {
    const auto& L = m.level(l);
    CHECK(L.F_rho - L.F_r == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(L.F_rho_star - L.F_r == doctest::Approx(0.75).epsilon(1e-10));
    CHECK(L.log_rho < L.log_rho_star);
    CHECK(L.log_rho_star < L.log_r);
  }
}

TEST_CASE("counterexample radii against closed-form oracle") {
  const auto& m = model(2, 5);
  const double c = m.profile().scale();
  CHECK(m.profile().h1() == doctest::Approx(h1_oracle()).epsilon(1e-10));
  for (int l = 1; l <= 3; ++l) {
    const auto& L = m.level(l);
    CHECK(F_diff_oracle(-L.log_r, -L.log_rho) / c == doctest::Approx(1.0).epsilon(1e-7));
    CHECK(F_diff_oracle(-L.log_r, -L.log_rho_star) / c == doctest::Approx(0.75).epsilon(1e-7));
  }
  // energy caps re-evaluated by independent quadrature
  for (int l = 1; l <= 3; ++l) {
    const double lam = -m.level(l).log_r;
    const double e = energy_oracle(lam, c);
    CHECK(m.profile().energy_at(lam) == doctest::Approx(e).epsilon(1e-5));
    CHECK(e <= std::ldexp(1.0, -2 * l) * (1.0 + 1e-5));
  }
  // the level-1 cap is active and tight
  CHECK(m.level(1).active == "energy");
  CHECK(energy_oracle(-m.level(1).log_r, c) == doctest::Approx(0.25).epsilon(1e-5));
}

TEST_CASE("construction values") {
  const auto& m = model(2, 5);
  Eigen::VectorXd o = Eigen::VectorXd::Zero(2);
  CHECK(eval_construction(m, o, 0.0).f == 1.0 - std::ldexp(1.0, -5));
  Eigen::VectorXd far(2);
  far << 0.3, 0.27;
  CHECK(eval_construction(m, far, 0.0).f == 0.0);
  Eigen::VectorXd x(2);
  x << 0.61, 0.47;
  const auto a = eval_construction(m, x, -1.0), b = eval_construction(m, x, 2.5);
  CHECK(a.f > 0.0);
  CHECK(a.f < 0.5);
  CHECK(a.g.head(2) == x);
  CHECK(a.g[2] == a.f);
  CHECK((b.H - a.H).head(2).norm() == 0.0);
  CHECK(b.H[2] - a.H[2] == doctest::Approx(3.5));
  // level-1 value at distance d equals the capped profile
  const double d = std::hypot(0.61 - 0.5, 0.47 - 0.5);
  const double c = m.profile().scale();
  const double ref = F_diff_oracle(-m.level(1).log_r, -std::log(d)) / c;
  CHECK(a.f == doctest::Approx(0.5 * ref).epsilon(1e-7));
}

TEST_CASE("counterexample checks at depth 5") {
  const auto& m = model(2, 5);
  for (int p = 2; p <= 4; ++p) {
    CHECK(all_pass_msg(check_oscillation(m, p)));
    CHECK(all_pass_msg(check_diameter(m, p)));
  }
  CHECK(all_pass_msg(energy_budget(m)));
  for (int l = 1; l <= 4; ++l) CHECK(all_pass_msg(hausdorff_lower(m, l)));
  auto deepest = hausdorff_lower(m, 5);
  CHECK(deepest[0].status == Status::Inconclusive);
  CHECK(deepest[0].note.find("depth >= 6") != std::string::npos);
  auto beyond = check_oscillation(m, 6);
  REQUIRE(beyond.size() == 1);
  CHECK(beyond[0].status == Status::Inconclusive);
  CHECK_THROWS_AS(check_oscillation(m, 1), PreconditionError);

  auto e = energy_budget(m);
  CHECK(e.back().rhs == 5.0);
  CHECK(e.back().lhs <= 5.0);
  auto h = hausdorff_lower(m, 3);
  CHECK(h[0].rhs == std::ldexp(1.0, -10));
}

TEST_CASE("counterexample in three dimensions") {
  const auto& m = model(3, 3);
  CHECK(all_pass_msg(check_invariants(m)));
  CHECK(all_pass_msg(check_oscillation(m, 2)));
  CHECK(all_pass_msg(check_diameter(m, 2)));
  CHECK(all_pass_msg(energy_budget(m)));
  auto h = hausdorff_lower(m, 2);
  CHECK(h[0].rhs == std::ldexp(1.0, -15));
  CHECK(all_pass_msg(h));
  CHECK(m.lattice_in_cube(2).size() == 64);
}

TEST_CASE("counterexample depth limits and json") {
  CounterexampleOptions o;
  o.depth = 5;
  o.lambda_max = 1e10;
  try {
    build_sequences("pow:p=2", 2, o);
    FAIL("expected a depth error");
  } catch (const DepthError& e) {
    CHECK(std::string(e.what()).find("maximal feasible depth is 2") != std::string::npos);
  }
  const auto& m = model(2, 3);
  auto j = m.to_json();
  CHECK(j["levels"].size() == 3);
  auto back = model_from_json(j);
  for (int l = 1; l <= 3; ++l) CHECK(back.level(l).log_r == m.level(l).log_r);
  j["levels"][1]["log_r"] = -1.0;
  CHECK_THROWS_AS(model_from_json(j), ValidationError);
  CHECK_THROWS_AS(build_sequences("pow:p=3", 2), PreconditionError);
}
