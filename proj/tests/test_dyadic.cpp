/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <random>

#include "dyadic.hpp"
#include "error.hpp"

using namespace retrace;

TEST_CASE("canonical form: odd or zero mantissa") {
  Dyadic a(BigInt(12), 0);  // 12 = 3 * 2^2
  CHECK(a.mantissa() == 3);
  CHECK(a.exponent() == 2);
  Dyadic z(BigInt(0), 17);
  CHECK(z.is_zero());
  CHECK(z.exponent() == 0);
}

TEST_CASE("ring operations are exact") {
  Dyadic half = Dyadic::pow2(-1);
  Dyadic q = Dyadic::pow2(-2);
  CHECK(half + q == Dyadic(BigInt(3), -2));
  CHECK(half - half == Dyadic(0));
  CHECK(half * half == q);
  CHECK((half + q) * Dyadic(4) == Dyadic(3));
}

TEST_CASE("comparisons") {
  CHECK(Dyadic(BigInt(1), -30) > Dyadic(0));
  CHECK(Dyadic(-3) < Dyadic(BigInt(-5), -1));
  CHECK(Dyadic(BigInt(7), -3) == Dyadic(BigInt(7), -3));
}

TEST_CASE("directed rounding") {
  Dyadic v(BigInt(5), -3);  // 0.625
  CHECK(v.floor_to(1) == Dyadic(BigInt(1), -1));
  CHECK(v.ceil_to(1) == Dyadic(1));
  Dyadic neg = -v;
  CHECK(neg.floor_to(1) == Dyadic(-1));
  CHECK(neg.ceil_to(1) == Dyadic(BigInt(-1), -1));
  // already representable: unchanged
  CHECK(v.floor_to(3) == v);
  CHECK(v.ceil_to(3) == v);
}

TEST_CASE("directed division brackets the quotient") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 200; ++i) {
    Dyadic a(BigInt(static_cast<long>(rng() % 4000) - 2000), -4);
    Dyadic b(BigInt(static_cast<long>(rng() % 1000) + 1), -3);
    Dyadic lo = div_floor(a, b, 40);
    Dyadic hi = div_ceil(a, b, 40);
    CHECK(lo <= hi);
    CHECK(hi - lo <= Dyadic::pow2(-39));
    CHECK(lo * b <= a);
    CHECK(hi * b >= a);
  }
}

TEST_CASE("directed square roots bracket") {
  std::mt19937_64 rng(8);
  for (int i = 0; i < 200; ++i) {
    Dyadic x(BigInt(static_cast<long>(rng() % 100000)), -6);
    Dyadic lo = sqrt_floor(x, 40);
    Dyadic hi = sqrt_ceil(x, 40);
    CHECK(lo <= hi);
    CHECK(hi - lo <= Dyadic::pow2(-39));
    CHECK(lo * lo <= x);
    CHECK(hi * hi >= x);
  }
  CHECK(sqrt_floor(Dyadic(25), 10) == Dyadic(5));
  CHECK(sqrt_ceil(Dyadic(25), 10) == Dyadic(5));
}

TEST_CASE("decimal and binary parsing") {
  CHECK(Dyadic::parse("0.25") == Dyadic::pow2(-2));
  CHECK(Dyadic::parse("-3") == Dyadic(-3));
  CHECK(Dyadic::parse("0b0.01") == Dyadic::pow2(-2));
  CHECK(Dyadic::parse("-0b1.1") == Dyadic(BigInt(-3), -1));
  CHECK(Dyadic::parse("2.5") == Dyadic(BigInt(5), -1));
  CHECK_THROWS_AS(Dyadic::parse("0.1"), Error);   // not dyadic
  CHECK_THROWS_AS(Dyadic::parse("1/4"), Error);   // fraction form forbidden
  CHECK_THROWS_AS(Dyadic::parse(""), Error);
  CHECK_THROWS_AS(Dyadic::parse("0b"), Error);
}

TEST_CASE("printing is exact for short fractions and trims zeros") {
  CHECK(Dyadic::parse("0.25").str(10) == "0.25");
  CHECK(Dyadic(0).str(5) == "0");
  CHECK(Dyadic(-3).str(5) == "-3");
  CHECK(Dyadic(BigInt(3), -1).str(6) == "1.5");
}

TEST_CASE("parse/print round trip on random dyadics") {
  std::mt19937_64 rng(9);
  for (int i = 0; i < 100; ++i) {
    Dyadic v(BigInt(static_cast<long>(rng() % 2000000) - 1000000), -12);
    Dyadic back = Dyadic::parse(v.str(12));
    CHECK(back == v);
  }
}
