#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "orliczlab/conditions.hpp"
#include "orliczlab/numerics.hpp"

using namespace orliczlab;

TEST_CASE("calderon condition on powers") {
  CHECK(calderon_condition(OrliczFunction::power(3), 2).classification == Classification::Convergent);
  CHECK(calderon_condition(OrliczFunction::power(2), 2).classification == Classification::Divergent);
  for (int k : {2, 3, 4})
    for (double p : {k - 0.5, double(k), k + 0.5, k + 2.0}) {
      auto v = calderon_condition(OrliczFunction::power(p), k);
      CHECK(v.classification == (p > k ? Classification::Convergent : Classification::Divergent));
      if (v.classification != Classification::Inconclusive) CHECK(std::abs(v.tail_exponent_estimate + 1) > v.margin);
    }
  OrliczFunction ramp("ramp", [](double t) { return std::max(0.0, t - 2.0); }, nullptr);
  CHECK_THROWS_AS(calderon_condition(ramp, 2), PreconditionError);
}

TEST_CASE("calderon partial value for a power-log gauge") {
  auto phi = OrliczFunction::power_log(2, 2);
  auto v = calderon_condition(phi, 2);
  REQUIRE(v.classification == Classification::Convergent);
  // integrand 1/(t log^2(e+t)); oracle on the same cutoff
  const double ref = oracle::richardson_log([](double t) { return 1.0 / (t * std::pow(std::log(std::exp(1.0) + t), 2)); },
                                            1.0, v.cutoff, 1 << 16);
  CHECK(v.partial_value == doctest::Approx(ref).epsilon(0.01));
}

TEST_CASE("partial value monotone in cutoff and comparison") {
  ClassifierOptions a, b;
  a.cutoff = 1e6;
  b.cutoff = 1e9;
  auto phi1 = OrliczFunction::power(3), phi2 = OrliczFunction::power(4);
  CHECK(calderon_condition(phi1, 2, a).partial_value <= calderon_condition(phi1, 2, b).partial_value);
  for (auto o : {a, b})
    CHECK(calderon_condition(phi1, 2, o).partial_value >= calderon_condition(phi2, 2, o).partial_value);
}

TEST_CASE("a_star") {
  CHECK(a_star(OrliczFunction::power(3), 2) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(a_star(OrliczFunction::power(4), 2) == doctest::Approx(1.5).epsilon(1e-9));
  CHECK_THROWS_AS(a_star(OrliczFunction::power(3), 3), PreconditionError);
}

TEST_CASE("condition equivalence, exponential p=2") {
  auto rep = condition_equivalence_report(OrliczFunction::exponential(1), 2.0, 1.0);
  REQUIRE(rep.forms.size() == 6);
  for (const auto& f : rep.forms) CHECK_MESSAGE(f.classification == Classification::Divergent, f.condition);
  // oracle for the log-over-square form: H ~ t^2 so the partial integral up to T is about T
  const double ref = oracle::richardson_log([](double t) { const double x = t * t; return (x + std::log1p(-std::exp(-x))) / x; }, 1.0, 1e4, 1 << 14);
  ClassifierOptions o;
  o.cutoff = 1e4;
  auto r2 = condition_equivalence_report(OrliczFunction::exponential(1), 2.0, 1.0, o);
  CHECK(r2.forms[2].partial_value == doctest::Approx(ref).epsilon(1e-6));
}

TEST_CASE("condition equivalence, identity gauge") {
  auto rep = condition_equivalence_report(OrliczFunction::power(1), 1.0, 1.0);
  for (const auto& f : rep.forms) CHECK_MESSAGE(f.classification == Classification::Convergent, f.condition);
  CHECK(rep.agree);
  // log t / t^2 integrates to 1 - (1 + log T)/T
  const double T = rep.forms[2].cutoff;
  CHECK(rep.forms[2].partial_value == doctest::Approx(1.0 - (1.0 + std::log(T)) / T).epsilon(1e-8));
  CHECK(rep.forms[0].partial_value == doctest::Approx(1.0 - 1.0 / T).epsilon(1e-8));
  CHECK(rep.forms[1].partial_value == doctest::Approx(1.0 - 1.0 / T).epsilon(1e-5));
  CHECK(rep.forms[5].partial_value == doctest::Approx(1.0 - 1.0 / T).epsilon(1e-6));
}

TEST_CASE("condition equivalence, constant gauge") {
  auto rep = condition_equivalence_report(OrliczFunction::constant(1), 1.0, 1.0);
  for (const auto& f : rep.forms) {
    CHECK_MESSAGE(f.classification == Classification::Convergent, f.condition);
    CHECK(f.partial_value == 0.0);
  }
}

TEST_CASE("condition equivalence precondition") {
  CHECK_THROWS_AS(condition_equivalence_report(shift_normalize(OrliczFunction::power(1), 0.0), 1.0, 0.0), PreconditionError);
}

TEST_CASE("weakening in p") {
  auto Phi = OrliczFunction::exponential(1);
  bool divergent_seen = false;
  for (double p : {0.5, 1.0, 2.0, 3.0}) {
    auto rep = condition_equivalence_report(Phi, p, 1.0);
    const bool div = rep.forms[2].classification == Classification::Divergent;
    if (divergent_seen) CHECK(div);
    divergent_seen |= div;
  }
  CHECK(divergent_seen);
}

TEST_CASE("inverse tail condition") {
  auto v1 = inverse_tail_condition(OrliczFunction::exponential_raw(1), 2.0, std::exp(1.0));
  CHECK(v1.classification == Classification::Divergent);
  // antiderivative 2 sqrt(log tau)
  CHECK(v1.partial_value == doctest::Approx(2.0 * (std::sqrt(std::log(1e12)) - 1.0)).epsilon(1e-6));
  CHECK(inverse_tail_condition(OrliczFunction::exponential_raw(2), 1.0, std::exp(1.0)).classification ==
        Classification::Divergent);
  // 1/(tau log log tau) still diverges
  auto v3 = inverse_tail_condition(OrliczFunction::double_exponential(), 1.0, std::exp(std::exp(1.0)));
  CHECK(v3.classification == Classification::Divergent);
  const double ref = oracle::richardson_log([](double t) { return 1.0 / (t * std::log(std::log(t))); },
                                            std::exp(std::exp(1.0)), 1e12, 1 << 16);
  CHECK(v3.partial_value == doctest::Approx(ref).epsilon(1e-6));
  CHECK_THROWS_AS(inverse_tail_condition(OrliczFunction::exponential_raw(1), 1.0, 1.0), PreconditionError);
}

TEST_CASE("lehto integral") {
  CHECK(lehto_integral(parse_weight("const:c=1", 2), 1.0).classification == Classification::Divergent);
  CHECK(lehto_integral(parse_weight("const:c=1", 2), 3.0).classification == Classification::Divergent);
  auto v = lehto_integral(parse_weight("logpow:a=2", 2), 1.0, std::exp(-1.0));
  CHECK(v.classification == Classification::Convergent);
  // antiderivative 1/log(1/r): from r = 1/T to 1/e gives 1 - 1/log T
  CHECK(v.partial_value == doctest::Approx(1.0 - 1.0 / std::log(v.cutoff)).epsilon(1e-8));
  CHECK(lehto_integral(parse_weight("logpow:a=2", 3), 2.0).classification == Classification::Divergent);
  auto gap = RadialWeight::radial(2, [](double r) { return (r > 0.3 && r < 0.4) ? 0.0 : 1.0; }, "gap");
  auto vg = lehto_integral(gap, 1.0);
  CHECK(vg.classification == Classification::Divergent);
  CHECK(vg.evidence.find("vanishes") != std::string::npos);
}

TEST_CASE("lemma bound on a battery") {
  InverseTailBoundOptions o;
  auto r1 = inverse_tail_bound_check(parse_weight("const:c=1", 2), OrliczFunction::power(1), 1.0, o);
  CHECK(r1.status == Status::Pass);
  CHECK(r1.lhs == doctest::Approx(std::log(1.0 / o.delta)).epsilon(1e-8));
  const double e = std::exp(1.0);
  CHECK(r1.rhs == doctest::Approx(0.5 * (1.0 / e - 1.0 / o.tau_max)).epsilon(1e-8));

  auto r2 = inverse_tail_bound_check(parse_weight("const:c=3", 3), OrliczFunction::power(2), 1.5, o);
  CHECK(r2.status == Status::Pass);

  auto r3 = inverse_tail_bound_check(parse_weight("logpow:a=1", 2), OrliczFunction::exponential_raw(1), 1.0, o);
  CHECK(r3.status == Status::Pass);
  CHECK(std::isinf(r3.lhs));
  // M = 2 for Phi(Q) = 1/|x| on the unit disk
  CHECK(r3.rhs == doctest::Approx(0.5 * (std::log(std::log(1e12)) - std::log(std::log(2 * e)))).epsilon(1e-6));

  auto r4 = inverse_tail_bound_check(parse_weight("pow:a=-0.5", 2), OrliczFunction::power(2), 2.0, o);
  CHECK(r4.status == Status::Pass);
  CHECK(r4.lhs == doctest::Approx(4.0 * (1.0 - std::pow(o.delta, 0.25))).epsilon(1e-8));

  auto r5 = inverse_tail_bound_check(parse_weight("loge:a=1", 3), OrliczFunction::power(1), 1.0, o);
  CHECK(r5.status == Status::Pass);
  CHECK(r5.lhs == doctest::Approx(std::log(1.0 + std::log(1.0 / o.delta))).epsilon(1e-8));
}

TEST_CASE("ball average oracle") {
  CHECK(ball_average(parse_weight("loge:a=1", 3), OrliczFunction::power(1)) == doctest::Approx(4.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("boundary criterion") {
  CHECK(boundary_criterion(parse_weight("const:c=1", 3), 0.5).classification == Classification::Divergent);
  auto w = parse_weight("const:c=1", 3);
  CHECK(w.sphere_norm(2.0) == doctest::Approx(4.0 * std::sqrt(kPi)));
  CHECK(boundary_criterion(parse_weight("pow:a=-2", 3), 0.5).classification == Classification::Convergent);
  CHECK(boundary_criterion(parse_weight("logpow:a=1", 3), 0.5).classification == Classification::Divergent);
}

TEST_CASE("sphere means of a full field match the profile") {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(3);
  auto w = RadialWeight::from_field(3, [](const Eigen::VectorXd& x) { return 1.0 + x.squaredNorm(); }, "1+r^2", c);
  for (double r : {0.1, 0.5, 2.0}) CHECK(w.profile(r) == doctest::Approx(1.0 + r * r).epsilon(1e-6));
  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(2);
  auto w2 = RadialWeight::from_field(2, [](const Eigen::VectorXd& x) { return x(0) * x(0); }, "x^2", c2);
  CHECK(w2.profile(2.0) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("equivalence battery agrees for convex gauges") {
  struct Case {
    OrliczFunction Phi;
    double p;
    Classification expected;
  };
  std::vector<Case> battery{{OrliczFunction::power(1), 1.0, Classification::Convergent},
                            {OrliczFunction::power(3), 1.0, Classification::Convergent},
                            {OrliczFunction::power_log(2, 2), 1.0, Classification::Convergent},
                            {OrliczFunction::exponential(1), 1.0, Classification::Divergent},
                            {OrliczFunction::exponential(2), 1.0, Classification::Divergent},
                            {OrliczFunction::exponential(1), 0.5, Classification::Convergent}};
  for (const auto& c : battery) {
    auto rep = condition_equivalence_report(c.Phi, c.p, 1.0);
    CHECK(rep.convex);
    for (const auto& f : rep.forms)
      CHECK_MESSAGE(f.classification == c.expected, c.Phi.description() << " p=" << c.p << " " << f.condition << " "
                                                                         << to_string(f.classification) << " "
                                                                         << f.evidence);
  }
}
