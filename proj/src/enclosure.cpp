/* SPDX-License-Identifier: Apache-2.0 */
#include "enclosure.hpp"

#include <cmath>
#include <cstdlib>

#include "error.hpp"

namespace retrace {

Enclosure::Enclosure(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {
  if (hi_ < lo_) fail(ErrorCode::internal, "enclosure with lo > hi");
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  Dyadic p1 = a.lo_ * b.lo_, p2 = a.lo_ * b.hi_;
  Dyadic p3 = a.hi_ * b.lo_, p4 = a.hi_ * b.hi_;
  return Enclosure(min(min(p1, p2), min(p3, p4)),
                   max(max(p1, p2), max(p3, p4)));
}

Enclosure Enclosure::abs() const {
  if (lo_.sign() >= 0) return *this;
  if (hi_.sign() <= 0) return -*this;
  return Enclosure(Dyadic(), max(-lo_, hi_));
}

std::string Enclosure::str(Precision r) const {
  int digits = static_cast<int>(r.bits * 0.302) + 2;
  return midpoint(r.bits + 8).str(digits) + " \xC2\xB1 2^-" +
         std::to_string(r.bits);
}

Enclosure div_pos(const Enclosure& a, const Enclosure& b,
                  std::int64_t frac_bits) {
  if (b.lo().sign() <= 0)
    fail(ErrorCode::precondition, "div_pos: denominator not strictly positive");
  Dyadic lo, hi;
  if (a.lo().sign() >= 0) lo = div_floor(a.lo(), b.hi(), frac_bits);
  else lo = div_floor(a.lo(), b.lo(), frac_bits);
  if (a.hi().sign() >= 0) hi = div_ceil(a.hi(), b.lo(), frac_bits);
  else hi = div_ceil(a.hi(), b.hi(), frac_bits);
  return Enclosure(lo, hi);
}

Enclosure pow_n(const Enclosure& x, unsigned n, std::int64_t frac_bits) {
  Enclosure result(Dyadic(1));
  Enclosure base = x;
  while (n > 0) {
    if (n & 1u) result = (result * base).rounded(frac_bits);
    n >>= 1u;
    if (n > 0) base = (base * base).rounded(frac_bits);
  }
  return result;
}

Enclosure sqrt_enc(const Enclosure& x, std::int64_t frac_bits) {
  if (x.lo().sign() < 0)
    fail(ErrorCode::precondition, "sqrt_enc: negative lower bound");
  return Enclosure(sqrt_floor(x.lo(), frac_bits), sqrt_ceil(x.hi(), frac_bits));
}

namespace {

// atan(1/q) for integer q >= 2, width <= 2^-wbits.  Alternating series
// sum (-1)^k / ((2k+1) q^(2k+1)); the remainder is bounded by the next term.
Enclosure atan_inv(unsigned q, std::int64_t wbits) {
  std::int64_t f = wbits + 8;
  Enclosure qinv = div_pos(Enclosure(Dyadic(1)), Enclosure(Dyadic(static_cast<long>(q))), f);
  Enclosure qinv2 = (qinv * qinv).rounded(f);
  Enclosure power = qinv;  // q^-(2k+1)
  Enclosure sum{Dyadic()};
  Dyadic eps = Dyadic::pow2(-(wbits + 4));
  for (unsigned k = 0;; ++k) {
    Enclosure term =
        div_pos(power, Enclosure(Dyadic(static_cast<long>(2 * k + 1))), f);
    if (term.hi() <= eps) {
      sum = sum.widened(term.hi());
      break;
    }
    sum = (k % 2 == 0) ? sum + term : sum - term;
    power = (power * qinv2).rounded(f);
  }
  return sum;
}

// sin(c) for a dyadic |c| <= 8 by the Taylor series at 0, width <= 2^-wbits.
Enclosure sin_core(const Dyadic& c, std::int64_t wbits) {
  bool neg = c.sign() < 0;
  Dyadic a = c.abs();
  std::int64_t f = wbits + 8;
  Enclosure a2 = (Enclosure(a) * Enclosure(a)).rounded(f);
  Enclosure term(a.round_to(f));
  Enclosure sum{Dyadic()};
  Dyadic eps = Dyadic::pow2(-(wbits + 4));
  for (unsigned k = 0;; ++k) {
    sum = (k % 2 == 0) ? sum + term : sum - term;
    // term_{k+1} = term_k * a^2 / ((2k+2)(2k+3))
    long den = static_cast<long>(2 * k + 2) * static_cast<long>(2 * k + 3);
    term = div_pos((term * a2).rounded(f), Enclosure(Dyadic(den)), f);
    if (term.hi() <= eps && a * a <= Dyadic(den)) {
      sum = sum.widened(term.hi());  // alternating remainder
      break;
    }
  }
  return neg ? -sum : sum;
}

Enclosure cos_core(const Dyadic& c, std::int64_t wbits) {
  Dyadic a = c.abs();
  std::int64_t f = wbits + 8;
  Enclosure a2 = (Enclosure(a) * Enclosure(a)).rounded(f);
  Enclosure term(Dyadic(1));
  Enclosure sum{Dyadic()};
  Dyadic eps = Dyadic::pow2(-(wbits + 4));
  for (unsigned k = 0;; ++k) {
    sum = (k % 2 == 0) ? sum + term : sum - term;
    long den = static_cast<long>(2 * k + 1) * static_cast<long>(2 * k + 2);
    term = div_pos((term * a2).rounded(f), Enclosure(Dyadic(den)), f);
    if (term.hi() <= eps && a * a <= Dyadic(den)) {
      sum = sum.widened(term.hi());
      break;
    }
  }
  return sum;
}

// Shared argument handling: reduce x mod 2*pi to a dyadic center plus a
// radius, then evaluate `core` and widen by the radius (Lip <= 1).
template <class Core>
Enclosure sin_cos_eval(const Enclosure& x, Precision r, Core core,
                       const char* name) {
  Dyadic maxw = Dyadic::pow2(-(r.bits + 2));
  if (x.width() > maxw)
    fail(ErrorCode::precondition,
         std::string(name) + ": argument width exceeds 2^-(r+2); refine the "
                             "argument before calling");
  std::int64_t w = r.bits + kGuardBits;
  Dyadic mid = x.midpoint(w + 8);
  Dyadic radius = max(x.hi() - mid, mid - x.lo());

  double approx = mid.to_double() / 6.283185307179586;
  if (std::abs(approx) > 1e12)
    fail(ErrorCode::precondition, std::string(name) + ": argument too large");
  long k = std::lround(approx);
  if (k != 0) {
    Enclosure two_pi = enc_pi(Precision(static_cast<int>(w) + 12)).mul_pow2(1);
    Enclosure reduced = Enclosure(mid) - two_pi * Enclosure(Dyadic(k));
    mid = reduced.midpoint(w + 8);
    radius = radius + max(reduced.hi() - mid, mid - reduced.lo());
  }
  Enclosure val = core(mid, w + 4);
  val = val.widened(radius);
  // clamp to [-1, 1]
  Dyadic one(1);
  return Enclosure(max(val.lo(), -one), min(val.hi(), one)).rounded(w);
}

}  // namespace

Enclosure enc_sin(const Enclosure& x, Precision r) {
  return sin_cos_eval(x, r, sin_core, "enc_sin");
}

Enclosure enc_cos(const Enclosure& x, Precision r) {
  return sin_cos_eval(x, r, cos_core, "enc_cos");
}

Enclosure enc_pi(Precision r) {
  std::int64_t w = r.bits + 8;
  // Machin: pi = 16 atan(1/5) - 4 atan(1/239)
  Enclosure p = atan_inv(5, w + 6).mul_pow2(4) - atan_inv(239, w + 6).mul_pow2(2);
  return p.rounded(w);
}

Enclosure enc_e(Precision r) {
  std::int64_t w = r.bits + 8;
  std::int64_t f = w + 8;
  Enclosure term(Dyadic(1));
  Enclosure sum{Dyadic()};
  Dyadic eps = Dyadic::pow2(-(w + 4));
  for (long k = 1;; ++k) {
    sum = sum + term;
    term = div_pos(term, Enclosure(Dyadic(k)), f);
    if (term.hi() <= eps && k >= 2) {
      // remainder sum_{j>k} 1/j! <= 2/(k+1)! <= 2 term
      sum = Enclosure(sum.lo(), sum.hi() + term.hi().mul_pow2(1));
      break;
    }
  }
  return sum.rounded(w);
}

Enclosure enc_exp_neg(unsigned n, Precision r) {
  if (n == 0) return Enclosure(Dyadic(1));
  int extra = 4;
  unsigned m = n;
  while (m > 0) {
    ++extra;
    m >>= 1u;
  }
  std::int64_t w = r.bits + kGuardBits + extra;
  std::int64_t f = w + 8;
  // e^-1 by the alternating series sum (-1)^k / k!
  Enclosure term(Dyadic(1));
  Enclosure sum{Dyadic()};
  Dyadic eps = Dyadic::pow2(-(w + 4));
  for (long k = 1;; ++k) {
    sum = (k % 2 == 1) ? sum + term : sum - term;
    term = div_pos(term, Enclosure(Dyadic(k)), f);
    if (term.hi() <= eps && k >= 2) {
      sum = sum.widened(term.hi());
      break;
    }
  }
  Enclosure result = pow_n(sum, n, f);
  // e^-n in (0, 1)
  Dyadic zero;
  return Enclosure(max(result.lo(), zero), result.hi()).rounded(r.bits + kGuardBits);
}

}  // namespace retrace
