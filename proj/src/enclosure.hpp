/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <string>

#include "dyadic.hpp"

namespace retrace {

// Target error bound 2^-bits.
struct Precision {
  int bits = 0;
  constexpr Precision() = default;
  constexpr explicit Precision(int b) : bits(b) {}
  Dyadic eps() const { return Dyadic::pow2(-bits); }
};

// Guard bits carried by internal computations beyond the requested precision.
inline constexpr int kGuardBits = 16;

// A dyadic interval [lo, hi] certified to contain a real value.  An operation
// documented "at precision r" returns an enclosure of width <= 2^-r.
class Enclosure {
 public:
  Enclosure() = default;
  explicit Enclosure(const Dyadic& point) : lo_(point), hi_(point) {}
  Enclosure(Dyadic lo, Dyadic hi);

  static Enclosure of(const Dyadic& a, const Dyadic& b) {
    return a <= b ? Enclosure(a, b) : Enclosure(b, a);
  }

  const Dyadic& lo() const { return lo_; }
  const Dyadic& hi() const { return hi_; }
  Dyadic width() const { return hi_ - lo_; }
  bool is_point() const { return lo_ == hi_; }

  // Exact center rounded to 2^-frac_bits, clamped into [lo, hi].
  Dyadic midpoint(std::int64_t frac_bits = 96) const {
    Dyadic m = (lo_ + hi_).mul_pow2(-1).round_to(frac_bits);
    return max(lo_, min(hi_, m));
  }

  bool contains(const Dyadic& v) const { return lo_ <= v && v <= hi_; }
  bool contains(const Enclosure& o) const {
    return lo_ <= o.lo_ && o.hi_ <= hi_;
  }
  bool intersects(const Enclosure& o) const {
    return lo_ <= o.hi_ && o.lo_ <= hi_;
  }

  // [lo,hi] is entirely below (above) the other interval.
  bool strictly_below(const Enclosure& o) const { return hi_ < o.lo_; }
  bool strictly_above(const Enclosure& o) const { return lo_ > o.hi_; }

  Enclosure operator-() const { return Enclosure(-hi_, -lo_); }
  friend Enclosure operator+(const Enclosure& a, const Enclosure& b) {
    return Enclosure(a.lo_ + b.lo_, a.hi_ + b.hi_);
  }
  friend Enclosure operator-(const Enclosure& a, const Enclosure& b) {
    return Enclosure(a.lo_ - b.hi_, a.hi_ - b.lo_);
  }
  friend Enclosure operator*(const Enclosure& a, const Enclosure& b);

  Enclosure mul_pow2(std::int64_t k) const {
    return Enclosure(lo_.mul_pow2(k), hi_.mul_pow2(k));
  }

  Enclosure abs() const;

  // Smallest interval containing both.
  static Enclosure hull(const Enclosure& a, const Enclosure& b) {
    return Enclosure(min(a.lo_, b.lo_), max(a.hi_, b.hi_));
  }

  // Outward rounding to multiples of 2^-frac_bits; contains the original.
  Enclosure rounded(std::int64_t frac_bits) const {
    return Enclosure(lo_.floor_to(frac_bits), hi_.ceil_to(frac_bits));
  }

  // Symmetric widening by eps >= 0 on both sides.
  Enclosure widened(const Dyadic& eps) const {
    return Enclosure(lo_ - eps, hi_ + eps);
  }

  // "0.0061206 ± 2^-20": midpoint tagged with the width bound 2^-r.
  std::string str(Precision r) const;

 private:
  Dyadic lo_, hi_;
};

// Division a / b for an enclosure b with b.lo > 0, outward-rounded at
// 2^-frac_bits.
Enclosure div_pos(const Enclosure& a, const Enclosure& b,
                  std::int64_t frac_bits);

// x^n with outward rounding; n >= 0.
Enclosure pow_n(const Enclosure& x, unsigned n, std::int64_t frac_bits);

// sqrt over an enclosure with lo >= 0.
Enclosure sqrt_enc(const Enclosure& x, std::int64_t frac_bits);

// --- enclosures of elementary functions -----------------------------------
//
// All results contain the exact real value and have width <= 2^-r.bits.

// Requires width(x) <= 2^-(r+2); callers refine their argument first.
Enclosure enc_sin(const Enclosure& x, Precision r);
Enclosure enc_cos(const Enclosure& x, Precision r);

// e^-n for integer n >= 0.
Enclosure enc_exp_neg(unsigned n, Precision r);

Enclosure enc_pi(Precision r);
Enclosure enc_e(Precision r);

}  // namespace retrace
