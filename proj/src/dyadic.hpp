/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>
#include <string_view>

namespace retrace {

using BigInt = boost::multiprecision::cpp_int;

// Dyadic rational mant * 2^exp, kept canonical: mant odd or zero (zero has
// exp 0).  Addition, subtraction and multiplication are exact; every rounding
// step in the library goes through the explicit floor_to/ceil_to helpers or
// the directed division / square root functions below.
class Dyadic {
 public:
  Dyadic() : mant_(0), exp_(0) {}
  Dyadic(long v) : mant_(v), exp_(0) { normalize(); }  // NOLINT(runtime/explicit)
  Dyadic(BigInt mant, std::int64_t exp) : mant_(std::move(mant)), exp_(exp) {
    normalize();
  }

  static Dyadic pow2(std::int64_t e) { return Dyadic(BigInt(1), e); }

  const BigInt& mantissa() const { return mant_; }
  std::int64_t exponent() const { return exp_; }

  bool is_zero() const { return mant_.is_zero(); }
  int sign() const { return mant_.sign(); }

  Dyadic operator-() const;
  friend Dyadic operator+(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator-(const Dyadic& a, const Dyadic& b);
  friend Dyadic operator*(const Dyadic& a, const Dyadic& b);
  Dyadic& operator+=(const Dyadic& o) { return *this = *this + o; }
  Dyadic& operator-=(const Dyadic& o) { return *this = *this - o; }
  Dyadic& operator*=(const Dyadic& o) { return *this = *this * o; }

  // Exact scaling by 2^k.
  Dyadic mul_pow2(std::int64_t k) const;

  Dyadic abs() const { return sign() < 0 ? -*this : *this; }

  // Largest multiple of 2^-frac_bits that is <= value (resp. smallest >=).
  Dyadic floor_to(std::int64_t frac_bits) const;
  Dyadic ceil_to(std::int64_t frac_bits) const;
  // Nearest multiple of 2^-frac_bits (ties away from zero).
  Dyadic round_to(std::int64_t frac_bits) const;

  // Exponent k with 2^(k-1) <= |value| < 2^k; meaningless for zero.
  std::int64_t mag_exponent() const;

  int compare(const Dyadic& o) const;
  friend bool operator==(const Dyadic& a, const Dyadic& b) {
    return a.compare(b) == 0;
  }
  friend bool operator!=(const Dyadic& a, const Dyadic& b) {
    return a.compare(b) != 0;
  }
  friend bool operator<(const Dyadic& a, const Dyadic& b) {
    return a.compare(b) < 0;
  }
  friend bool operator<=(const Dyadic& a, const Dyadic& b) {
    return a.compare(b) <= 0;
  }
  friend bool operator>(const Dyadic& a, const Dyadic& b) {
    return a.compare(b) > 0;
  }
  friend bool operator>=(const Dyadic& a, const Dyadic& b) {
    return a.compare(b) >= 0;
  }

  double to_double() const;  // nearest double, for diagnostics only

  // Fixed-point decimal rendering, round-to-nearest at `digits` fractional
  // decimal digits, trailing zeros trimmed ("0.25", "-3", "0.0061206").
  std::string str(int digits = 18) const;

  // Accepts decimal ("0.25", "-3") and binary ("0b0.01", "-0b1.1") forms.
  // Decimal strings must denote an exact dyadic (denominator a power of two
  // after reduction); "0.1" is rejected.  Throws Error(invalid_argument).
  static Dyadic parse(std::string_view s);

 private:
  void normalize();

  BigInt mant_;
  std::int64_t exp_;
};

// Directed integer shifts: value m / 2^s rounded toward -inf / +inf.
BigInt shift_floor(const BigInt& m, std::int64_t s);
BigInt shift_ceil(const BigInt& m, std::int64_t s);

// Directed quotients a/b as multiples of 2^-frac_bits; b must be nonzero.
Dyadic div_floor(const Dyadic& a, const Dyadic& b, std::int64_t frac_bits);
Dyadic div_ceil(const Dyadic& a, const Dyadic& b, std::int64_t frac_bits);

// Directed square roots of x >= 0 as multiples of 2^-frac_bits.
Dyadic sqrt_floor(const Dyadic& x, std::int64_t frac_bits);
Dyadic sqrt_ceil(const Dyadic& x, std::int64_t frac_bits);

inline Dyadic min(const Dyadic& a, const Dyadic& b) { return a <= b ? a : b; }
inline Dyadic max(const Dyadic& a, const Dyadic& b) { return a >= b ? a : b; }

}  // namespace retrace
