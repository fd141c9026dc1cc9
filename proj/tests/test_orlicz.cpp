#include <doctest.h>

#include <cmath>

#include "orliczlab/orlicz.hpp"

using namespace orliczlab;

TEST_CASE("generalized inverse") {
  auto sq = OrliczFunction::power(2);
  CHECK(eval_inverse(sq, 4.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eval_inverse(sq, 0.0) == 0.0);

  auto cap = OrliczFunction::capped_linear(1.0);
  // a dense scan finds no t with min(t,1) >= 2
  bool hit = false;
  for (int i = 0; i <= 100000; ++i) hit |= cap(i * 0.01) >= 2.0;
  CHECK_FALSE(hit);
  CHECK(std::isinf(eval_inverse(cap, 2.0)));
}

TEST_CASE("inverse round trip and monotonicity") {
  for (auto phi : {OrliczFunction::power(3), OrliczFunction::exponential(1), OrliczFunction::power_log(2, 2),
                   OrliczFunction::capped_linear(2)}) {
    double prev = 0.0;
    for (double t = 0.0; t < 5.0; t += 0.137) {
      const double back = eval_inverse(phi, phi(t));
      CHECK(back <= t + 1e-12);
      if (t < 2.0 || phi.description().rfind("cap", 0) != 0) CHECK(back == doctest::Approx(t).epsilon(1e-9));
      CHECK(back >= prev);
      prev = back;
    }
  }
  // constant stretch: inverse lands on the left end of the interval of constancy
  auto cap = OrliczFunction::capped_linear(2);
  CHECK(eval_inverse(cap, cap(3.0)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("non-monotone input is rejected") {
  CHECK_THROWS_AS(OrliczFunction("bump", [](double t) { return t * std::exp(-t); }, nullptr), ValidationError);
  CHECK_THROWS_AS(OrliczFunction::from_table({0, 1, 2, 3}, {0, 2, 1, 3}, "bad"), ValidationError);
}

TEST_CASE("flags") {
  CHECK(OrliczFunction::power(2).convex());
  CHECK_FALSE(OrliczFunction::power(0.5).convex());
  CHECK(OrliczFunction::exponential(1).convex());
  CHECK(OrliczFunction::power_log(2, 2).convex());
  CHECK(OrliczFunction::power(2).zero_at_zero());
  CHECK_FALSE(OrliczFunction::constant(1).zero_at_zero());
  CHECK_THROWS_AS(OrliczFunction("one", [](double) { return 1.0; }, nullptr), ValidationError);
}

TEST_CASE("saturation") {
  auto e = OrliczFunction::exponential(2);
  CHECK(std::isinf(e(100.0)));
  CHECK(e.log_eval(100.0) == doctest::Approx(1e4));
  auto p = OrliczFunction::power(3);
  CHECK(std::isinf(p(1e120)));
  CHECK(p.log_eval(1e120) == doctest::Approx(360 * std::log(10.0)));
}

TEST_CASE("clamp below one") {
  auto c = clamp_below_one(OrliczFunction::power(3));
  CHECK(c(0.5) == 1.0);
  CHECK(c(2.0) == 8.0);
  CHECK(c(0.0) == 0.0);
  CHECK(c.monotone());
}

TEST_CASE("shift normalize") {
  auto sq = OrliczFunction::power(2);
  auto s1 = shift_normalize(sq, 1.0);
  CHECK(s1(1.0) == doctest::Approx(3.0));
  auto s0 = shift_normalize(sq, 0.0);
  for (double t = 0; t < 10; t += 0.31) CHECK(s0(t) == doctest::Approx(sq(t)).epsilon(1e-14));
  auto s2 = shift_normalize(sq, 2.0);
  CHECK(s2(0.0) == 0.0);
  CHECK(s2.convex());
  CHECK(s2.monotone());
  // log evaluation far beyond the double range agrees with the leading term
  CHECK(s2.log_at_log(1e3) == doctest::Approx(2e3).epsilon(1e-12));
}

TEST_CASE("power compose") {
  auto id = OrliczFunction::power(1);
  auto c = power_compose(id, 2);
  CHECK(c.phi_p(3.0) == doctest::Approx(9.0));
  CHECK(c.h_p(3.0) == doctest::Approx(std::log(9.0)));
  auto e = OrliczFunction::exponential(1);
  CHECK(power_compose(e, 2).phi_p(1.0) == doctest::Approx(std::exp(1.0) - 1.0));
  auto p1 = power_compose(e, 1);
  for (double t = 0; t < 5; t += 0.23) CHECK(p1.phi_p(t) == doctest::Approx(e(t)).epsilon(1e-14));
  // composing exponents multiplies them
  auto a = power_compose(power_compose(e, 1.5).phi_p, 2.0).phi_p;
  auto b = power_compose(e, 3.0).phi_p;
  for (double t = 0.01; t < 2.5; t += 0.07) CHECK(a(t) == doctest::Approx(b(t)).epsilon(1e-12));
  // H_p derivative convention where Phi_p vanishes
  auto cap0 = shift_normalize(OrliczFunction::power(1), 0.0);
  CHECK(power_compose(OrliczFunction::capped_linear(1), 1).h_p.derivative(0.0) == 0.0);
  (void)cap0;
}

TEST_CASE("family specs") {
  CHECK(parse_gauge("pow:p=3")(2.0) == doctest::Approx(8.0));
  CHECK(parse_gauge("powlog:p=2,s=2")(1.0) == doctest::Approx(std::pow(std::log(std::exp(1.0) + 1.0), 2)));
  CHECK(parse_gauge("exp:a=1")(1.0) == doctest::Approx(std::exp(1.0) - 1.0));
  CHECK_THROWS_AS(parse_gauge("nope:p=1"), ValidationError);
}
