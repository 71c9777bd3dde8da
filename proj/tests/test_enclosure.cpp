/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <random>

#include "enclosure.hpp"
#include "error.hpp"

using namespace retrace;

namespace {

using Real = boost::multiprecision::cpp_bin_float_50;

// independent high-precision value of a dyadic, for soundness cross-checks
Real to_real(const Dyadic& d) {
  Real m(d.mantissa().str());
  return ldexp(m, static_cast<int>(d.exponent()));
}

bool contains_real(const Enclosure& e, const Real& v) {
  return to_real(e.lo()) <= v && v <= to_real(e.hi());
}

}  // namespace

TEST_CASE("interval addition on dyadics is exact") {
  Enclosure a(Dyadic(0)), b(Dyadic(1));
  Enclosure s = a + b;
  CHECK(s.lo() == Dyadic(1));
  CHECK(s.hi() == Dyadic(1));

  Enclosure c(Dyadic::parse("0.5"), Dyadic::parse("0.75"));
  Enclosure d(Dyadic::parse("0.25"), Dyadic::parse("0.25"));
  Enclosure e = c + d;
  CHECK(e.lo() == Dyadic::parse("0.75"));
  CHECK(e.hi() == Dyadic(1));

  Enclosure sym(Dyadic(-1), Dyadic(1));
  Enclosure t = sym + sym;
  CHECK(t.lo() == Dyadic(-2));
  CHECK(t.hi() == Dyadic(2));
}

TEST_CASE("interval multiplication takes corner extremes") {
  Enclosure two(Dyadic(2)), three(Dyadic(3));
  CHECK((two * three).lo() == Dyadic(6));
  CHECK((two * three).hi() == Dyadic(6));

  Enclosure sym(Dyadic(-1), Dyadic(1));
  Enclosure p = sym * sym;
  CHECK(p.lo() == Dyadic(-1));
  CHECK(p.hi() == Dyadic(1));

  Enclosure unit(Dyadic(0), Dyadic(1));
  Enclosure q = unit * unit;
  CHECK(q.lo() == Dyadic(0));
  CHECK(q.hi() == Dyadic(1));
}

TEST_CASE("point intervals stay points under ring ops") {
  Enclosure x(Dyadic::parse("0b10.01")), y(Dyadic::parse("-0b0.111"));
  CHECK((x + y).is_point());
  CHECK((x * y).is_point());
}

TEST_CASE("sin enclosures: anchors") {
  Precision r10(10);
  Enclosure s0 = enc_sin(Enclosure(Dyadic(0)), r10);
  CHECK(s0.contains(Dyadic(0)));
  CHECK(s0.width() <= Dyadic::pow2(-10));

  // pi/2 passed as a (pi enclosure)/2
  Enclosure half_pi = enc_pi(Precision(30)).mul_pow2(-1);
  Enclosure s1 = enc_sin(half_pi, Precision(20));
  CHECK(s1.contains(Dyadic(1)));
  CHECK(s1.width() <= Dyadic::pow2(-20));

  Enclosure s2 = enc_sin(Enclosure(Dyadic(1)), Precision(30));
  // 0.8414709848078965... from an independent evaluation
  Real ref = sin(Real(1));
  CHECK(contains_real(s2, ref));
  CHECK(s2.width() <= Dyadic::pow2(-30));
}

TEST_CASE("sin refuses arguments wider than its precision allows") {
  Enclosure wide(Dyadic(0), Dyadic::parse("0.5"));
  CHECK_THROWS_AS(enc_sin(wide, Precision(10)), Error);
}

TEST_CASE("exp(-n) enclosures") {
  Enclosure e0 = enc_exp_neg(0, Precision(10));
  CHECK(e0.lo() == Dyadic(1));
  CHECK(e0.hi() == Dyadic(1));

  Enclosure e1 = enc_exp_neg(1, Precision(30));
  CHECK(contains_real(e1, exp(Real(-1))));
  CHECK(e1.width() <= Dyadic::pow2(-30));

  Enclosure e40 = enc_exp_neg(40, Precision(10));
  CHECK(e40.lo() >= Dyadic(0));
  CHECK(e40.hi() <= Dyadic::pow2(-10));
  CHECK(contains_real(e40, exp(Real(-40))));
}

TEST_CASE("pi and e enclosures") {
  Enclosure pi10 = enc_pi(Precision(10));
  CHECK(contains_real(pi10, Real("3.14159265358979323846")));
  CHECK(pi10.width() <= Dyadic::pow2(-10));

  Enclosure e10 = enc_e(Precision(10));
  CHECK(contains_real(e10, exp(Real(1))));
  CHECK(e10.width() <= Dyadic::pow2(-10));

  Enclosure pi0 = enc_pi(Precision(0));
  CHECK(pi0.width() <= Dyadic(1));
  CHECK(contains_real(pi0, Real("3.14159265358979323846")));
}

TEST_CASE("soundness against independent evaluation, randomized") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 120; ++i) {
    long mant = static_cast<long>(rng() % 4096) - 2048;  // [-8, 8] at 2^-8
    Dyadic x(BigInt(mant), -8);
    int r = 4 + static_cast<int>(rng() % 36);
    Enclosure s = enc_sin(Enclosure(x), Precision(r));
    Enclosure c = enc_cos(Enclosure(x), Precision(r));
    CHECK(contains_real(s, sin(to_real(x))));
    CHECK(contains_real(c, cos(to_real(x))));
    CHECK(s.width() <= Dyadic::pow2(-r));
    CHECK(c.width() <= Dyadic::pow2(-r));
  }
}

TEST_CASE("monotone refinement") {
  for (int r = 6; r <= 36; r += 10) {
    Enclosure coarse = enc_sin(Enclosure(Dyadic(1)), Precision(r));
    Enclosure fine = enc_sin(Enclosure(Dyadic(1)), Precision(r + 8));
    CHECK(fine.width() <= coarse.width());
    CHECK(coarse.intersects(fine));

    Enclosure pc = enc_pi(Precision(r)), pf = enc_pi(Precision(r + 8));
    CHECK(pc.intersects(pf));
    CHECK(pf.width() <= pc.width());
  }
}

TEST_CASE("division by a positive enclosure brackets") {
  Enclosure num(Dyadic(1)), den(Dyadic(3));
  Enclosure q = div_pos(num, den, 40);
  CHECK(q.width() <= Dyadic::pow2(-39));
  CHECK(contains_real(q, Real(1) / 3));
  CHECK_THROWS_AS(div_pos(num, Enclosure(Dyadic(-1), Dyadic(1)), 20), Error);
}

TEST_CASE("enclosure printing tags the width") {
  Enclosure v(Dyadic::parse("0.25"));
  CHECK(v.str(Precision(20)) == "0.25 \xC2\xB1 2^-20");
}
