/* SPDX-License-Identifier: Apache-2.0 */
#include "dyadic.hpp"

#include <algorithm>
#include <cmath>

#include "error.hpp"

namespace retrace {

namespace mp = boost::multiprecision;

void Dyadic::normalize() {
  if (mant_.is_zero()) {
    exp_ = 0;
    return;
  }
  std::size_t k = mp::lsb(mant_ < 0 ? BigInt(-mant_) : mant_);
  if (k > 0) {
    mant_ >>= k;
    exp_ += static_cast<std::int64_t>(k);
  }
}

Dyadic Dyadic::operator-() const {
  Dyadic r;
  r.mant_ = -mant_;
  r.exp_ = exp_;
  return r;
}

Dyadic operator+(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  std::int64_t e = std::min(a.exp_, b.exp_);
  BigInt m = (a.mant_ << static_cast<unsigned>(a.exp_ - e)) +
             (b.mant_ << static_cast<unsigned>(b.exp_ - e));
  return Dyadic(std::move(m), e);
}

Dyadic operator-(const Dyadic& a, const Dyadic& b) { return a + (-b); }

Dyadic operator*(const Dyadic& a, const Dyadic& b) {
  if (a.is_zero() || b.is_zero()) return Dyadic();
  return Dyadic(a.mant_ * b.mant_, a.exp_ + b.exp_);
}

Dyadic Dyadic::mul_pow2(std::int64_t k) const {
  if (is_zero()) return *this;
  Dyadic r;
  r.mant_ = mant_;
  r.exp_ = exp_ + k;
  return r;
}

BigInt shift_floor(const BigInt& m, std::int64_t s) {
  if (s <= 0) return m << static_cast<unsigned>(-s);
  if (m >= 0) return m >> static_cast<unsigned>(s);
  BigInt a = -m;
  BigInt mask = (BigInt(1) << static_cast<unsigned>(s)) - 1;
  BigInt q = a >> static_cast<unsigned>(s);
  BigInt rem = a & mask;
  if (!rem.is_zero()) ++q;
  return -q;
}

BigInt shift_ceil(const BigInt& m, std::int64_t s) {
  return -shift_floor(-m, s);
}

Dyadic Dyadic::floor_to(std::int64_t frac_bits) const {
  if (is_zero() || exp_ + frac_bits >= 0) return *this;
  std::int64_t s = -(exp_ + frac_bits);
  return Dyadic(shift_floor(mant_, s), -frac_bits);
}

Dyadic Dyadic::ceil_to(std::int64_t frac_bits) const {
  if (is_zero() || exp_ + frac_bits >= 0) return *this;
  std::int64_t s = -(exp_ + frac_bits);
  return Dyadic(shift_ceil(mant_, s), -frac_bits);
}

Dyadic Dyadic::round_to(std::int64_t frac_bits) const {
  if (is_zero() || exp_ + frac_bits >= 0) return *this;
  std::int64_t s = -(exp_ + frac_bits);
  BigInt a = mant_ < 0 ? BigInt(-mant_) : mant_;
  BigInt q = (a + (BigInt(1) << static_cast<unsigned>(s - 1))) >>
             static_cast<unsigned>(s);
  if (mant_ < 0) q = -q;
  return Dyadic(std::move(q), -frac_bits);
}

std::int64_t Dyadic::mag_exponent() const {
  if (is_zero()) return 0;
  BigInt a = mant_ < 0 ? BigInt(-mant_) : mant_;
  return static_cast<std::int64_t>(mp::msb(a)) + 1 + exp_;
}

int Dyadic::compare(const Dyadic& o) const {
  if (sign() != o.sign()) return sign() < o.sign() ? -1 : 1;
  Dyadic d = *this - o;
  return d.sign();
}

double Dyadic::to_double() const {
  return static_cast<double>(mant_) * std::ldexp(1.0, static_cast<int>(exp_));
}

std::string Dyadic::str(int digits) const {
  if (is_zero()) return "0";
  BigInt ten_d = mp::pow(BigInt(10), static_cast<unsigned>(digits));
  // round(value * 10^digits)
  BigInt scaled;
  if (exp_ >= 0) {
    scaled = (mant_ << static_cast<unsigned>(exp_)) * ten_d;
  } else {
    BigInt num = mant_ * ten_d;
    BigInt a = num < 0 ? BigInt(-num) : num;
    BigInt q = (a + (BigInt(1) << static_cast<unsigned>(-exp_ - 1))) >>
               static_cast<unsigned>(-exp_);
    scaled = num < 0 ? BigInt(-q) : q;
  }
  bool neg = scaled < 0;
  if (neg) scaled = -scaled;
  std::string s = scaled.str();
  if (static_cast<int>(s.size()) <= digits)
    s.insert(0, static_cast<std::size_t>(digits) + 1 - s.size(), '0');
  s.insert(s.size() - static_cast<std::size_t>(digits), ".");
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  if (s == "0") return "0";  // rounded all the way down
  return neg ? "-" + s : s;
}

namespace {

Dyadic parse_binary(std::string_view s, bool neg) {
  // s is the part after "0b"
  BigInt m = 0;
  std::int64_t frac = 0;
  bool seen_dot = false, seen_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) fail(ErrorCode::invalid_argument, "malformed binary literal");
      seen_dot = true;
    } else if (c == '0' || c == '1') {
      m = (m << 1) + (c - '0');
      if (seen_dot) ++frac;
      seen_digit = true;
    } else {
      fail(ErrorCode::invalid_argument, "malformed binary literal");
    }
  }
  if (!seen_digit) fail(ErrorCode::invalid_argument, "empty binary literal");
  if (neg) m = -m;
  return Dyadic(std::move(m), -frac);
}

Dyadic parse_decimal(std::string_view s, bool neg) {
  BigInt m = 0;
  int frac = 0;
  bool seen_dot = false, seen_digit = false;
  for (char c : s) {
    if (c == '.') {
      if (seen_dot) fail(ErrorCode::invalid_argument, "malformed decimal literal");
      seen_dot = true;
    } else if (c >= '0' && c <= '9') {
      m = m * 10 + (c - '0');
      if (seen_dot) ++frac;
      seen_digit = true;
    } else {
      fail(ErrorCode::invalid_argument,
           "malformed number: '" + std::string(s) + "'");
    }
  }
  if (!seen_digit) fail(ErrorCode::invalid_argument, "empty number");
  // value = m / 10^frac = m / (2^frac 5^frac); needs 5^frac | m to be dyadic
  BigInt five_f = mp::pow(BigInt(5), static_cast<unsigned>(frac));
  BigInt rem = m % five_f;
  if (!rem.is_zero())
    fail(ErrorCode::invalid_argument,
         "'" + std::string(s) +
             "' is not a dyadic rational; use a binary literal (0b0.01) or a "
             "power-of-two denominator");
  m /= five_f;
  if (neg) m = -m;
  return Dyadic(std::move(m), -frac);
}

}  // namespace

Dyadic Dyadic::parse(std::string_view s) {
  bool neg = false;
  if (!s.empty() && (s[0] == '+' || s[0] == '-')) {
    neg = s[0] == '-';
    s.remove_prefix(1);
  }
  if (s.size() >= 2 && s[0] == '0' && (s[1] == 'b' || s[1] == 'B'))
    return parse_binary(s.substr(2), neg);
  return parse_decimal(s, neg);
}

Dyadic div_floor(const Dyadic& a, const Dyadic& b, std::int64_t frac_bits) {
  if (b.is_zero()) fail(ErrorCode::invalid_argument, "division by zero");
  if (a.is_zero()) return Dyadic();
  // floor(a/b * 2^frac_bits) * 2^-frac_bits
  BigInt num = a.mantissa();
  BigInt den = b.mantissa();
  if (den < 0) {
    num = -num;
    den = -den;
  }
  std::int64_t shift = a.exponent() - b.exponent() + frac_bits;
  if (shift > 0) num <<= static_cast<unsigned>(shift);
  else den <<= static_cast<unsigned>(-shift);
  BigInt q = num / den;           // truncates toward zero
  if (num < 0 && q * den != num) --q;
  return Dyadic(std::move(q), -frac_bits);
}

Dyadic div_ceil(const Dyadic& a, const Dyadic& b, std::int64_t frac_bits) {
  return -div_floor(-a, b, frac_bits);
}

Dyadic sqrt_floor(const Dyadic& x, std::int64_t frac_bits) {
  if (x.sign() < 0) fail(ErrorCode::domain, "sqrt of negative value");
  if (x.is_zero()) return Dyadic();
  // floor(sqrt(m 2^e) * 2^f) = isqrt(floor(m 2^(e+2f)))
  std::int64_t s = x.exponent() + 2 * frac_bits;
  BigInt v = shift_floor(x.mantissa(), -s);
  if (v < 0) v = 0;
  return Dyadic(mp::sqrt(v), -frac_bits);
}

Dyadic sqrt_ceil(const Dyadic& x, std::int64_t frac_bits) {
  if (x.sign() < 0) fail(ErrorCode::domain, "sqrt of negative value");
  if (x.is_zero()) return Dyadic();
  std::int64_t s = x.exponent() + 2 * frac_bits;
  BigInt v = shift_ceil(x.mantissa(), -s);
  BigInt r = mp::sqrt(v);
  if (r * r != v) ++r;
  return Dyadic(std::move(r), -frac_bits);
}

}  // namespace retrace
