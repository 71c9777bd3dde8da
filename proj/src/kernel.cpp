/* SPDX-License-Identifier: Apache-2.0 */
#include "kernel.hpp"

#include <cmath>
#include <deque>

#include "error.hpp"

namespace retrace {

namespace {

// pi and 1/(8 pi) are needed by every piece evaluation; memoize per
// precision bucket.
const int kConstBucket = 32;

Enclosure cached_pi(int w) {
  int b = ((w + kConstBucket - 1) / kConstBucket) * kConstBucket;
  static std::mutex mu;
  static std::map<int, Enclosure> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(b);
  if (it == cache.end()) it = cache.emplace(b, enc_pi(Precision(b))).first;
  return it->second;
}

Enclosure enc_two_pi(int w) { return cached_pi(w).mul_pow2(1); }

// 1/(8 pi) at 2^-w.
Enclosure enc_inv8pi(int w) {
  int b = ((w + kConstBucket - 1) / kConstBucket) * kConstBucket;
  static std::mutex mu;
  static std::map<int, Enclosure> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(b);
  if (it == cache.end()) {
    Enclosure pi8 = enc_pi(Precision(b + 8)).mul_pow2(3);
    it = cache.emplace(b, div_pos(Enclosure(Dyadic(1)), pi8, b + 4)).first;
  }
  return it->second;
}

// Precision usable for sin/cos of an argument enclosure: the argument width
// must stay below 2^-(r+2).
int trig_prec(const Enclosure& arg, int w) {
  Dyadic width = arg.width();
  if (width.is_zero()) return w + 4;
  std::int64_t k = width.mag_exponent();  // width <= 2^k
  std::int64_t r = -k - 2;
  if (r > w + 4) r = w + 4;
  return static_cast<int>(r);
}

// One phi bump on [A, B] (B - A enclosed, strictly positive).
struct Bump {
  Enclosure A, B;

  Enclosure span() const { return B - A; }

  Enclosure arg(const Enclosure& t, int w) const {
    return div_pos(enc_two_pi(w + 6) * (t - A), span(), w + 6);
  }

  // phi = ((B-A)/4) sin(arg)
  Enclosure value(const Enclosure& t, int w) const {
    Enclosure a = arg(t, w);
    int rp = trig_prec(a, w);
    Enclosure s = rp >= 1 ? enc_sin(a, Precision(rp))
                          : Enclosure(Dyadic(-1), Dyadic(1));
    return (span().mul_pow2(-2) * s).rounded(w + 4);
  }

  // d phi / dt = (pi/2) cos(arg)
  Enclosure slope(const Enclosure& t, int w) const {
    Enclosure a = arg(t, w);
    int rp = trig_prec(a, w);
    Enclosure c = rp >= 1 ? enc_cos(a, Precision(rp))
                          : Enclosure(Dyadic(-1), Dyadic(1));
    return (enc_pi(Precision(w + 6)).mul_pow2(-1) * c).rounded(w + 4);
  }

  // I1 = ((B-A)^2/8pi) (1 - cos(arg)), the running integral of phi from A.
  Enclosure integral1(const Enclosure& t, int w) const {
    Enclosure a = arg(t, w);
    int rp = trig_prec(a, w);
    Enclosure c = rp >= 1 ? enc_cos(a, Precision(rp))
                          : Enclosure(Dyadic(-1), Dyadic(1));
    Enclosure one_minus = Enclosure(Dyadic(1)) - c;
    // 1 - cos >= 0
    one_minus = Enclosure(max(one_minus.lo(), Dyadic()), one_minus.hi());
    Enclosure coef =
        (pow_n(span(), 2, w + 8) * enc_inv8pi(w + 6)).rounded(w + 6);
    return (coef * one_minus).rounded(w + 4);
  }

  // I2 = ((B-A)^2/8pi) ((t-A) - ((B-A)/2pi) sin(arg)), integral of I1 from A.
  Enclosure integral2(const Enclosure& t, int w) const {
    Enclosure a = arg(t, w);
    int rp = trig_prec(a, w);
    Enclosure s = rp >= 1 ? enc_sin(a, Precision(rp))
                          : Enclosure(Dyadic(-1), Dyadic(1));
    Enclosure lin =
        (t - A) - div_pos(span() * s, enc_two_pi(w + 6), w + 6);
    Enclosure coef =
        (pow_n(span(), 2, w + 8) * enc_inv8pi(w + 6)).rounded(w + 6);
    return (coef * lin).rounded(w + 4);
  }

  // I2 over the whole bump: (B-A)^3/(8 pi).
  Enclosure integral2_full(int w) const {
    return (pow_n(span(), 3, w + 8) * enc_inv8pi(w + 6)).rounded(w + 4);
  }
};

void check_bump_domain(const Enclosure& a, const Enclosure& b,
                       const Enclosure& t) {
  if (!(a.lo() < b.hi()))
    fail(ErrorCode::invalid_argument, "interval endpoints must satisfy a < b");
  if (t.hi() < a.lo() || t.lo() > b.hi())
    fail(ErrorCode::domain, "argument outside [a, b]");
}

}  // namespace

Enclosure phi(const Enclosure& a, const Enclosure& b, const Enclosure& t,
              Precision r) {
  check_bump_domain(a, b, t);
  int w = r.bits + kGuardBits;
  return Bump{a, b}.value(t, w).rounded(w);
}

Enclosure phi_antideriv(const Enclosure& a, const Enclosure& b,
                        const Enclosure& t, Precision r) {
  check_bump_domain(a, b, t);
  int w = r.bits + kGuardBits;
  return Bump{a, b}.integral1(t, w).rounded(w);
}

Enclosure phi_antideriv2(const Enclosure& a, const Enclosure& b,
                         const Enclosure& t, Precision r) {
  check_bump_domain(a, b, t);
  int w = r.bits + kGuardBits;
  return Bump{a, b}.integral2(t, w).rounded(w);
}

Enclosure xi(const Enclosure& a, const Enclosure& b, const Enclosure& t,
             Precision r) {
  check_bump_domain(a, b, t);
  int w = r.bits + kGuardBits;
  Enclosure mid = (a + b).mul_pow2(-1);
  bool left_possible = t.lo() < mid.hi();
  bool right_possible = t.hi() > mid.lo();
  mid = mid.rounded(w + 8);
  Enclosure result;
  bool have = false;
  if (left_possible) {
    Enclosure tc(t.lo(), min(t.hi(), mid.hi()));
    result = -Bump{a, mid}.value(tc, w);
    have = true;
  }
  if (right_possible) {
    Enclosure tc(max(t.lo(), mid.lo()), t.hi());
    Enclosure v = Bump{mid, b}.value(tc, w);
    result = have ? Enclosure::hull(result, v) : v;
  }
  return result.rounded(w);
}

Enclosure psi(const Enclosure& a, const Enclosure& b, unsigned n,
              const Enclosure& t, Precision r) {
  if (n == 0) fail(ErrorCode::invalid_argument, "psi needs n >= 1");
  check_bump_domain(a, b, t);
  int w = r.bits + kGuardBits;
  // d_0 = (a + 5b)/6, d_i = d_0 + i (b-a)/(6n)
  Enclosure six(Dyadic(6));
  Enclosure d0 = div_pos(a + b * Enclosure(Dyadic(5)), six, w + 8);
  Enclosure step =
      div_pos(b - a, Enclosure(Dyadic(static_cast<long>(6 * n))), w + 8);
  Enclosure result;
  bool have = false;
  if (t.lo() < d0.hi()) {
    Enclosure tc(t.lo(), min(t.hi(), d0.hi()));
    result = Bump{a, d0}.value(tc, w);
    have = true;
  }
  for (unsigned i = 0; i < n && t.hi() > d0.lo(); ++i) {
    Enclosure di = (d0 + step * Enclosure(Dyadic(static_cast<long>(i))))
                       .rounded(w + 8);
    Enclosure di1 = i + 1 == n
                        ? b
                        : (d0 + step * Enclosure(Dyadic(static_cast<long>(i + 1))))
                              .rounded(w + 8);
    if (t.hi() < di.lo() || t.lo() > di1.hi()) continue;
    Enclosure tc(max(t.lo(), di.lo()), min(t.hi(), di1.hi()));
    Enclosure v = xi(di, di1, tc, Precision(r.bits + 2));
    result = have ? Enclosure::hull(result, v) : v;
    have = true;
  }
  if (!have) fail(ErrorCode::internal, "psi: no piece matched");
  return result.rounded(w);
}

// --- closed forms -----------------------------------------------------------

namespace {

// (e-1)^3 at 2^-w.
Enclosure em1_cubed(int w) {
  return pow_n(enc_e(Precision(w + 8)) - Enclosure(Dyadic(1)), 3, w + 8);
}

// sum_{i=1..n} e^-3i = (1 - e^-3n) / (e^3 - 1).
Enclosure exp3_partial_sum(unsigned n, int w) {
  Enclosure e3 = pow_n(enc_e(Precision(w + 10)), 3, w + 10);
  Enclosure num = Enclosure(Dyadic(1)) - enc_exp_neg(3 * n, Precision(w + 8));
  return div_pos(num, e3 - Enclosure(Dyadic(1)), w + 6);
}

}  // namespace

Enclosure sy_at_tn(unsigned n, Precision r) {
  int w = r.bits + kGuardBits;
  if (n == 0) return Enclosure(Dyadic());
  Enclosure num = (em1_cubed(w) * Enclosure(Dyadic(125))).rounded(w + 8);
  Enclosure den =
      (Enclosure(Dyadic(216 * 8)) * enc_pi(Precision(w + 10))).rounded(w + 8);
  Enclosure c = div_pos(num, den, w + 6);
  return (c * exp3_partial_sum(n, w)).rounded(w);
}

Enclosure sy_limit(Precision r) {
  int w = r.bits + kGuardBits;
  Enclosure num = (em1_cubed(w) * Enclosure(Dyadic(125))).rounded(w + 8);
  Enclosure e3 = pow_n(enc_e(Precision(w + 10)), 3, w + 10);
  Enclosure den = (Enclosure(Dyadic(216 * 8)) * enc_pi(Precision(w + 10)) *
                   (e3 - Enclosure(Dyadic(1))))
                      .rounded(w + 8);
  return div_pos(num, den, w).rounded(w);
}

Enclosure sx_at_tn(const TauTable& tau, unsigned n, Precision r) {
  if (n == 0) fail(ErrorCode::invalid_argument, "sx_at_tn needs n >= 1");
  int w = r.bits + kGuardBits;
  Enclosure den = (Enclosure(Dyadic(1000)) * enc_pi(Precision(w + 10)))
                      .rounded(w + 8);
  Enclosure base = div_pos(em1_cubed(w + 4), den, w + 6);
  Enclosure scaled =
      (base * enc_exp_neg(3 * n, Precision(w + 8))).rounded(w + 4);
  return (scaled * tau.coefficient_enclosure(n, Precision(w + 4))).rounded(w);
}

Enclosure marker_gap(unsigned n, Precision r) {
  if (n == 0) fail(ErrorCode::invalid_argument, "marker_gap needs n >= 1");
  int w = r.bits + kGuardBits;
  long n3 = static_cast<long>(n) * n * n;
  Enclosure den = (Enclosure(Dyadic(1728 * 8)) * Enclosure(Dyadic(n3)) *
                   enc_pi(Precision(w + 10)))
                      .rounded(w + 8);
  Enclosure base = div_pos(em1_cubed(w + 4), den, w + 6);
  return (base * enc_exp_neg(3 * n, Precision(w + 8))).rounded(w);
}

BreakpointLattice breakpoints(unsigned n, Precision r) {
  if (n == 0) fail(ErrorCode::invalid_argument, "breakpoints needs n >= 1");
  int w = r.bits + kGuardBits;
  BreakpointLattice lat;
  lat.n = n;
  Enclosure one(Dyadic(1));
  lat.t_prev = (n == 1) ? Enclosure(Dyadic())
                        : one - enc_exp_neg(n - 1, Precision(w + 8));
  lat.t_cur = one - enc_exp_neg(n, Precision(w + 8));
  Enclosure five(Dyadic(5));
  lat.t_minus = div_pos(lat.t_prev + lat.t_cur * Enclosure(Dyadic(4)), five,
                        w + 4);
  lat.t_plus = div_pos(lat.t_cur * Enclosure(Dyadic(6)) - lat.t_prev, five,
                       w + 4);
  Enclosure d0 =
      div_pos(lat.t_prev + lat.t_cur * five, Enclosure(Dyadic(6)), w + 4);
  Enclosure step = div_pos(lat.t_cur - lat.t_prev,
                           Enclosure(Dyadic(static_cast<long>(6 * n))), w + 6);
  Enclosure half = step.mul_pow2(-1);
  for (unsigned i = 0; i <= n; ++i) {
    Enclosure di =
        i == n ? lat.t_cur
               : (d0 + step * Enclosure(Dyadic(static_cast<long>(i))))
                     .rounded(w + 4);
    lat.d.push_back(di.rounded(w));
    if (i < n) lat.e.push_back((di + half).rounded(w));
  }
  lat.t_prev = lat.t_prev.rounded(w);
  lat.t_cur = lat.t_cur.rounded(w);
  lat.t_minus = lat.t_minus.rounded(w);
  lat.t_plus = lat.t_plus.rounded(w);
  return lat;
}

// --- the constructed curve ---------------------------------------------------

struct ConstructedCurve::Table {
  int w = 0;      // working precision of queries
  int fbits = 0;  // entry precision: deep segments are e^-n short, so the
                  // table carries enough bits that even the last span's
                  // enclosure stays strictly positive
  unsigned count = 0;   // stored segments 1..count; zones used to count-1
  struct Seg {
    Enclosure t_prev, t_cur;    // t_{n-1}, t_n
    Enclosure t_minus, t_plus;  // lateral zone endpoints
    Enclosure d0;               // end of the arch
    Enclosure step, half;       // lobe pitch and half-pitch
    Enclosure sy_base;          // s_y(t_{n-1})
    Enclosure arch;             // s_y jump over the arch
    Enclosure lobe;             // depth of one lobe dip
    Enclosure coeff;            // budgeted 2^-(n+tau(n))
  };
  std::vector<Seg> seg;  // seg[k] is segment n = k+1
  Enclosure inv8pi, two_pi, sy_lim;

  // Bounds for everything past t_count (all dyadic upper bounds).
  Dyadic ay_tail, ax_tail, vy_tail, vx_tail, sx_tail, dip_tail, xarc_tail;

  const Seg& at(unsigned n) const { return seg[n - 1]; }

  Bump arch_bump(unsigned n) const {
    return Bump{at(n).t_prev, at(n).d0};
  }
  // lobe i of segment n: [d_i, e_i] (down) and [e_i, d_{i+1}] (up)
  Enclosure d_i(unsigned n, unsigned i) const {
    const Seg& s = at(n);
    if (i >= n) return s.t_cur;
    return (s.d0 + s.step * Enclosure(Dyadic(static_cast<long>(i))))
        .rounded(fbits);
  }
  Enclosure e_i(unsigned n, unsigned i) const {
    return (d_i(n, i) + s_half(n)).rounded(fbits);
  }
  const Enclosure& s_half(unsigned n) const { return at(n).half; }
};

ConstructedCurve::ConstructedCurve(std::shared_ptr<const TauTable> tau,
                                   unsigned segment_cutoff)
    : tau_(std::move(tau)), cutoff_(segment_cutoff) {
  if (!tau_) fail(ErrorCode::invalid_argument, "null tau table");
  if (cutoff_ < 4) fail(ErrorCode::invalid_argument, "segment cutoff < 4");
}

const ConstructedCurve::Table& ConstructedCurve::table_for(int wbits) const {
  int w = ((wbits + 15) / 16) * 16;  // bucket to limit cache churn
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = cache_.find(w);
    if (it != cache_.end()) return *it->second;
  }
  auto tab = std::make_shared<Table>();
  tab->w = w;
  // Enough segments that every tail bound is below 2^-(w+2); the binding
  // constraint is the acceleration amplitude ~ 0.36 e^-n.
  unsigned need = static_cast<unsigned>(0.6932 * (w + 4)) + 2;
  if (need + 1 > cutoff_)
    fail(ErrorCode::precondition,
         "segment cutoff " + std::to_string(cutoff_) +
             " too small for working precision " + std::to_string(w));
  tab->count = need + 1;
  // segment count's span is ~ e^-count = 2^(-1.443 count): carry that many
  // extra bits so every stored span has a strictly positive lower bound
  int f = w + 24 + (29 * static_cast<int>(tab->count)) / 20;
  tab->fbits = f;
  tab->inv8pi = enc_inv8pi(w + 8);
  tab->two_pi = enc_two_pi(w + 8);
  tab->sy_lim = sy_limit(Precision(w + 4));

  Enclosure e1 = enc_exp_neg(1, Precision(f + 8));
  Enclosure one(Dyadic(1));
  Enclosure en_prev = one;  // e^-(n-1)
  Enclosure sy_base{Dyadic()};
  Enclosure five(Dyadic(5)), six(Dyadic(6));
  for (unsigned n = 1; n <= tab->count; ++n) {
    Enclosure en = (en_prev * e1).rounded(f);
    Table::Seg s;
    s.t_prev = (one - en_prev).rounded(f);
    s.t_cur = (one - en).rounded(f);
    s.t_minus = div_pos(s.t_prev + s.t_cur * Enclosure(Dyadic(4)), five, f);
    s.t_plus = div_pos(s.t_cur * six - s.t_prev, five, f);
    s.d0 = div_pos(s.t_prev + s.t_cur * five, six, f);
    Enclosure delta = s.t_cur - s.t_prev;
    s.step = div_pos(delta, Enclosure(Dyadic(static_cast<long>(6 * n))), f);
    s.half = s.step.mul_pow2(-1);
    s.sy_base = sy_base.rounded(f);
    s.arch = (pow_n(s.d0 - s.t_prev, 3, f) * tab->inv8pi).rounded(f);
    s.lobe = (pow_n(s.half, 3, f) * tab->inv8pi).rounded(f);
    s.coeff = tau_->coefficient_enclosure(n, Precision(w + 8));
    sy_base = sy_base + s.arch;
    tab->seg.push_back(std::move(s));
    en_prev = en;
  }
  // tail bounds from segment count+1 (amplitudes decrease geometrically)
  {
    Enclosure en = (en_prev * e1).rounded(f);
    Enclosure t_next = (one - en).rounded(f);
    const Table::Seg& last = tab->seg.back();
    Enclosure delta = t_next - last.t_cur;
    Dyadic dh = delta.hi().ceil_to(f);
    // arch amplitude (5 delta/6)/4, I1 max (5 delta/6)^2/(4 pi)
    Dyadic five_sixth = div_ceil(dh * Dyadic(5), Dyadic(6), f);
    tab->ay_tail = div_ceil(five_sixth, Dyadic(4), f);
    Dyadic i1max = (five_sixth * five_sixth * tab->inv8pi.hi()).mul_pow2(1)
                       .ceil_to(f);
    tab->vy_tail = i1max;
    Dyadic fifth = div_ceil(dh, Dyadic(5), f);
    std::int64_t cexp = -static_cast<std::int64_t>(tab->count + 2);
    Dyadic cbound = Dyadic::pow2(cexp);
    tab->ax_tail = (cbound * div_ceil(fifth, Dyadic(4), f)).ceil_to(f);
    tab->vx_tail =
        (cbound * (fifth * fifth * tab->inv8pi.hi()).mul_pow2(1)).ceil_to(f);
    Dyadic sxp = (cbound * fifth * fifth * fifth * tab->inv8pi.hi()).ceil_to(f);
    // sums over n > count: consecutive ratios < e^-3 (and < e^-3/2 with the
    // coefficient), so first-term * 17/16 covers the series
    tab->sx_tail = (sxp * Dyadic(17)).mul_pow2(-4).ceil_to(f);
    tab->xarc_tail = (sxp * Dyadic(34)).mul_pow2(-4).ceil_to(f);
    Dyadic lobe1 = (div_ceil(dh, Dyadic(12 * (tab->count + 1)), f) *
                    div_ceil(dh, Dyadic(12 * (tab->count + 1)), f) *
                    div_ceil(dh, Dyadic(12 * (tab->count + 1)), f) *
                    tab->inv8pi.hi())
                       .ceil_to(f);
    tab->dip_tail = (lobe1 * Dyadic(2 * (tab->count + 1)) * Dyadic(17))
                        .mul_pow2(-4)
                        .ceil_to(f);
  }
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, _] = cache_.emplace(w, std::move(tab));
  return *it->second;
}

namespace {

// A clipped span of the parameter interval inside one formula piece.
struct YSpan {
  enum Kind { arch, lobe_down, lobe_up, tail } kind;
  unsigned n = 0;
  unsigned i = 0;
  Enclosure t;
};

struct XSpan {
  enum Kind { rising, falling, tail } kind;  // v_x >= 0 resp. <= 0 half
  unsigned n = 0;
  Enclosure t;
};

}  // namespace

// Locate helpers need Table internals, so they are members via free functions
// taking the table explicitly.
namespace {

using Tab = ConstructedCurve::Table;

// smallest n with u <= t_n.hi (clamped to count+1 when beyond the last)
unsigned first_segment(const Tab& tab, const Dyadic& u) {
  double ud = u.to_double();
  double est = ud >= 1.0 ? tab.count + 1 : -std::log1p(-ud);
  unsigned n = est < 1 ? 1
                       : static_cast<unsigned>(
                             std::min<double>(est + 1, tab.count + 1));
  while (n > 1 && u <= tab.at(n - 1).t_cur.hi()) --n;
  while (n <= tab.count && u > tab.at(n).t_cur.hi()) ++n;
  return n;
}

void locate_y(const Tab& tab, const Enclosure& t, std::vector<YSpan>& out) {
  out.clear();
  const Dyadic& u = t.lo();
  const Dyadic& v = t.hi();
  for (unsigned n = first_segment(tab, u); n <= tab.count; ++n) {
    const Tab::Seg& s = tab.at(n);
    if (s.t_prev.lo() > v) break;
    Dyadic cu = max(u, s.t_prev.lo());
    Dyadic cv = min(v, s.t_cur.hi());
    if (cu > cv) continue;
    if (cu <= s.d0.hi()) {
      out.push_back(
          {YSpan::arch, n, 0, Enclosure(cu, min(cv, s.d0.hi()))});
    }
    if (cv >= s.d0.lo()) {
      // lobe index window by binary search on d_i lower bounds
      unsigned lo = 0, hi = n - 1;
      while (lo < hi) {  // largest i with d_i.lo <= cu
        unsigned mid = (lo + hi + 1) / 2;
        if (tab.d_i(n, mid).lo() <= cu) lo = mid;
        else hi = mid - 1;
      }
      for (unsigned i = lo; i < n; ++i) {
        Enclosure di = tab.d_i(n, i);
        if (di.lo() > cv) break;
        Enclosure ei = tab.e_i(n, i);
        Enclosure di1 = tab.d_i(n, i + 1);
        if (cu <= ei.hi() && cv >= di.lo())
          out.push_back({YSpan::lobe_down, n, i,
                         Enclosure(max(cu, di.lo()), min(cv, ei.hi()))});
        if (cv >= ei.lo() && cu <= di1.hi())
          out.push_back({YSpan::lobe_up, n, i,
                         Enclosure(max(cu, ei.lo()), min(cv, di1.hi()))});
      }
    }
  }
  const Enclosure& t_last = tab.at(tab.count).t_cur;
  if (v >= t_last.lo())
    out.push_back({YSpan::tail, tab.count, 0, Enclosure(max(u, t_last.lo()), v)});
  if (out.empty()) fail(ErrorCode::internal, "locate_y: no piece");
}

// Lateral zones; also reports whether part of t may lie outside every zone.
void locate_x(const Tab& tab, const Enclosure& t, std::vector<XSpan>& out,
              bool& outside_possible) {
  out.clear();
  const Dyadic& u = t.lo();
  const Dyadic& v = t.hi();
  outside_possible = true;
  unsigned n0 = first_segment(tab, u);
  for (unsigned n = n0 > 1 ? n0 - 1 : 1; n <= tab.count; ++n) {
    const Tab::Seg& s = tab.at(n);
    if (s.t_minus.lo() > v) break;
    if (s.t_plus.hi() < u) continue;
    if (s.t_minus.hi() <= u && v <= s.t_plus.lo()) outside_possible = false;
    Dyadic cu = max(u, s.t_minus.lo());
    Dyadic cv = min(v, s.t_plus.hi());
    if (cu > cv) continue;
    if (cu <= s.t_cur.hi())
      out.push_back({XSpan::rising, n, Enclosure(cu, min(cv, s.t_cur.hi()))});
    if (cv >= s.t_cur.lo())
      out.push_back({XSpan::falling, n, Enclosure(max(cu, s.t_cur.lo()), cv)});
  }
  const Enclosure& t_last = tab.at(tab.count).t_cur;
  if (v >= t_last.lo()) out.push_back({XSpan::tail, tab.count, Enclosure()});
}

Bump lobe_bump(const Tab& tab, const YSpan& sp) {
  if (sp.kind == YSpan::lobe_down)
    return Bump{tab.d_i(sp.n, sp.i), tab.e_i(sp.n, sp.i)};
  return Bump{tab.e_i(sp.n, sp.i), tab.d_i(sp.n, sp.i + 1)};
}

Bump x_bump(const Tab& tab, const XSpan& sp) {
  const Tab::Seg& s = tab.at(sp.n);
  if (sp.kind == XSpan::rising) return Bump{s.t_minus, s.t_cur};
  return Bump{s.t_cur, s.t_plus};
}

void check_curve_domain(const Enclosure& t) {
  if (t.lo() < Dyadic(0) || t.hi() > Dyadic(1))
    fail(ErrorCode::domain, "curve parameter outside [0, 1]");
}

}  // namespace

std::pair<Enclosure, Enclosure> ConstructedCurve::accel_enc(const Enclosure& t,
                                                            Precision r) const {
  check_curve_domain(t);
  int w = r.bits + kGuardBits;
  const Table& tab = table_for(w);
  std::vector<YSpan> ys;
  locate_y(tab, t, ys);
  Enclosure ay;
  bool have = false;
  for (const YSpan& sp : ys) {
    Enclosure v;
    switch (sp.kind) {
      case YSpan::arch: v = tab.arch_bump(sp.n).value(sp.t, w); break;
      case YSpan::lobe_down: v = -lobe_bump(tab, sp).value(sp.t, w); break;
      case YSpan::lobe_up: v = lobe_bump(tab, sp).value(sp.t, w); break;
      case YSpan::tail:
        v = Enclosure(-tab.ay_tail, tab.ay_tail);
        break;
    }
    ay = have ? Enclosure::hull(ay, v) : v;
    have = true;
  }
  std::vector<XSpan> xs;
  bool outside = false;
  locate_x(tab, t, xs, outside);
  Enclosure ax{Dyadic()};
  have = false;
  for (const XSpan& sp : xs) {
    Enclosure v;
    if (sp.kind == XSpan::tail) {
      v = Enclosure(-tab.ax_tail, tab.ax_tail);
    } else {
      // a_x = -coeff * xi_{t-,t+}; xi = -phi on the rising half, +phi after
      Enclosure raw = x_bump(tab, sp).value(sp.t, w);
      v = tab.at(sp.n).coeff * (sp.kind == XSpan::rising ? raw : -raw);
    }
    ax = have ? Enclosure::hull(ax, v) : v;
    have = true;
  }
  if (outside || !have)
    ax = have ? Enclosure::hull(ax, Enclosure(Dyadic())) : Enclosure(Dyadic());
  return {ax.rounded(w), ay.rounded(w)};
}

std::pair<Enclosure, Enclosure> ConstructedCurve::velocity_enc(
    const Enclosure& t, Precision r) const {
  check_curve_domain(t);
  int w = r.bits + kGuardBits;
  const Table& tab = table_for(w);
  std::vector<YSpan> ys;
  locate_y(tab, t, ys);
  Enclosure vy;
  bool have = false;
  for (const YSpan& sp : ys) {
    Enclosure v;
    switch (sp.kind) {
      case YSpan::arch: v = tab.arch_bump(sp.n).integral1(sp.t, w); break;
      case YSpan::lobe_down: v = -lobe_bump(tab, sp).integral1(sp.t, w); break;
      case YSpan::lobe_up: v = lobe_bump(tab, sp).integral1(sp.t, w); break;
      case YSpan::tail: v = Enclosure(-tab.vy_tail, tab.vy_tail); break;
    }
    vy = have ? Enclosure::hull(vy, v) : v;
    have = true;
  }
  std::vector<XSpan> xs;
  bool outside = false;
  locate_x(tab, t, xs, outside);
  Enclosure vx{Dyadic()};
  have = false;
  for (const XSpan& sp : xs) {
    Enclosure v;
    if (sp.kind == XSpan::tail) {
      v = Enclosure(-tab.vx_tail, tab.vx_tail);
    } else {
      Enclosure raw = x_bump(tab, sp).integral1(sp.t, w);
      v = tab.at(sp.n).coeff * (sp.kind == XSpan::rising ? raw : -raw);
    }
    vx = have ? Enclosure::hull(vx, v) : v;
    have = true;
  }
  if (outside || !have)
    vx = have ? Enclosure::hull(vx, Enclosure(Dyadic())) : Enclosure(Dyadic());
  return {vx.rounded(w), vy.rounded(w)};
}

std::pair<Enclosure, Enclosure> ConstructedCurve::position_enc(
    const Enclosure& t, Precision r) const {
  check_curve_domain(t);
  int w = r.bits + kGuardBits;
  const Table& tab = table_for(w);
  std::vector<YSpan> ys;
  locate_y(tab, t, ys);
  Enclosure sy;
  bool have = false;
  for (const YSpan& sp : ys) {
    Enclosure v;
    const Tab::Seg* s = sp.kind == YSpan::tail ? nullptr : &tab.at(sp.n);
    switch (sp.kind) {
      case YSpan::arch:
        v = s->sy_base + tab.arch_bump(sp.n).integral2(sp.t, w);
        break;
      case YSpan::lobe_down:
        v = s->sy_base + s->arch - lobe_bump(tab, sp).integral2(sp.t, w);
        break;
      case YSpan::lobe_up:
        v = s->sy_base + s->arch - s->lobe +
            lobe_bump(tab, sp).integral2(sp.t, w);
        break;
      case YSpan::tail: {
        const Tab::Seg& last = tab.at(tab.count);
        v = Enclosure((last.sy_base + last.arch).lo(), tab.sy_lim.hi());
        break;
      }
    }
    sy = have ? Enclosure::hull(sy, v) : v;
    have = true;
  }
  std::vector<XSpan> xs;
  bool outside = false;
  locate_x(tab, t, xs, outside);
  Enclosure sx{Dyadic()};
  have = false;
  for (const XSpan& sp : xs) {
    Enclosure v;
    if (sp.kind == XSpan::tail) {
      v = Enclosure(Dyadic(), tab.sx_tail);
    } else {
      const Tab::Seg& s = tab.at(sp.n);
      Bump b = x_bump(tab, sp);
      if (sp.kind == XSpan::rising) {
        v = s.coeff * b.integral2(sp.t, w);
      } else {
        v = s.coeff * (b.integral2_full(w) - b.integral2(sp.t, w));
      }
    }
    sx = have ? Enclosure::hull(sx, v) : v;
    have = true;
  }
  if (outside || !have)
    sx = have ? Enclosure::hull(sx, Enclosure(Dyadic())) : Enclosure(Dyadic());
  return {sx.rounded(w), sy.rounded(w)};
}

std::pair<Enclosure, Enclosure> ConstructedCurve::position(const Dyadic& t,
                                                           Precision r) const {
  return position_enc(Enclosure(t), r);
}

// --- speed quadrature --------------------------------------------------------

namespace {

struct SpeedEval {
  const ConstructedCurve& curve;
  Precision prec;

  // |v| over the interval J.
  Enclosure speed(const Enclosure& J) const {
    auto [vx, vy] = curve.velocity_enc(J, prec);
    Enclosure s2 = vx * vx + vy * vy;
    s2 = Enclosure(max(s2.lo(), Dyadic()), s2.hi());
    return sqrt_enc(s2, prec.bits + 8);
  }
};

}  // namespace

// d a / dt over t (both components); only called inside lateral zones where
// the second-derivative remainder of the midpoint rule is needed.
namespace {

std::pair<Enclosure, Enclosure> accel_slope(const ConstructedCurve::Table& tab,
                                            const Enclosure& t, int w) {
  std::vector<YSpan> ys;
  locate_y(tab, t, ys);
  Enclosure ay;
  bool have = false;
  for (const YSpan& sp : ys) {
    Enclosure v;
    switch (sp.kind) {
      case YSpan::arch: v = tab.arch_bump(sp.n).slope(sp.t, w); break;
      case YSpan::lobe_down: v = -lobe_bump(tab, sp).slope(sp.t, w); break;
      case YSpan::lobe_up: v = lobe_bump(tab, sp).slope(sp.t, w); break;
      case YSpan::tail: {
        Dyadic b = Dyadic(2);  // |phi'| <= pi/2 < 2
        v = Enclosure(-b, b);
        break;
      }
    }
    ay = have ? Enclosure::hull(ay, v) : v;
    have = true;
  }
  std::vector<XSpan> xs;
  bool outside = false;
  locate_x(tab, t, xs, outside);
  Enclosure ax{Dyadic()};
  have = false;
  for (const XSpan& sp : xs) {
    Enclosure v;
    if (sp.kind == XSpan::tail) {
      // |a_x'| <= coeff * pi/2 past the last stored segment
      Dyadic b = Dyadic::pow2(-static_cast<std::int64_t>(tab.count));
      v = Enclosure(-b, b);
    } else {
      Enclosure raw = x_bump(tab, sp).slope(sp.t, w);
      v = tab.at(sp.n).coeff * (sp.kind == XSpan::rising ? raw : -raw);
    }
    ax = have ? Enclosure::hull(ax, v) : v;
    have = true;
  }
  if (outside || !have)
    ax = have ? Enclosure::hull(ax, Enclosure(Dyadic())) : Enclosure(Dyadic());
  return {ax, ay};
}

}  // namespace

Enclosure ConstructedCurve::lateral_speed_integral(const Table& tab,
                                                   unsigned n,
                                                   int tolbits) const {
  int w = tolbits + 12;
  const Table::Seg& s = tab.at(n);
  SpeedEval ev{*this, Precision(w)};

  // Integrate between dyadic anchors inside the endpoint enclosures and
  // account for the missing slivers with the global speed bound |v| < 2^-5.
  Dyadic a0 = s.t_minus.midpoint(w + 8);
  Dyadic b0 = s.t_plus.midpoint(w + 8);
  Dyadic sliver =
      ((s.t_minus.width() + s.t_plus.width()) * Dyadic(1)).mul_pow2(-5);

  // Natural cut points: piece seams inside the zone.
  std::vector<Dyadic> cuts;
  cuts.push_back(a0);
  cuts.push_back(s.d0.midpoint(w + 8));
  for (unsigned i = 0; i < n; ++i) {
    cuts.push_back(tab.e_i(n, i).midpoint(w + 8));
    if (i + 1 < n) cuts.push_back(tab.d_i(n, i + 1).midpoint(w + 8));
  }
  cuts.push_back(s.t_cur.midpoint(w + 8));
  cuts.push_back(b0);
  for (std::size_t i = 0; i + 1 < cuts.size();)
    if (cuts[i + 1] <= cuts[i]) cuts.erase(cuts.begin() + i + 1);
    else ++i;

  Dyadic total_len = b0 - a0;
  Dyadic tol_total = Dyadic::pow2(-tolbits);
  // accept err for interval length h iff err * total_len <= tol_total * h
  auto within_budget = [&](const Dyadic& err, const Dyadic& h) {
    return err * total_len <= tol_total * h;
  };

  Enclosure total{Dyadic()};
  long steps = 0;
  const long step_cap = 4000000;
  struct Item {
    Dyadic u, v;
  };
  std::deque<Item> work;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    work.push_back({cuts[i], cuts[i + 1]});
  while (!work.empty()) {
    Item it = work.front();
    work.pop_front();
    ++steps;
    Dyadic h = it.v - it.u;
    if (h.sign() <= 0) continue;
    Enclosure J(it.u, it.v);
    Enclosure g = ev.speed(J);
    Enclosure first_order = Enclosure(h) * g;
    bool force_accept = steps > step_cap || h <= Dyadic::pow2(-(w + 2));
    if (force_accept || within_budget(first_order.width(), h)) {
      total = total + first_order;
      continue;
    }
    // midpoint rule with the second-derivative remainder, when usable
    if (g.lo().sign() > 0) {
      auto [vx, vy] = velocity_enc(J, Precision(w));
      auto [axx, ayy] = accel_enc(J, Precision(w));
      auto [apx, apy] = accel_slope(tab, J, w);
      Dyadic aa = (axx.abs().hi() * axx.abs().hi() +
                   ayy.abs().hi() * ayy.abs().hi());
      Dyadic vap = (vx.abs().hi() * apx.abs().hi() +
                    vy.abs().hi() * apy.abs().hi());
      Dyadic va = (vx.abs().hi() * axx.abs().hi() +
                   vy.abs().hi() * ayy.abs().hi());
      Dyadic glo = g.lo();
      Dyadic g2 = div_ceil(aa + vap, glo, w + 8) +
                  div_ceil(va * va, glo * glo * glo, w + 8);
      Dyadic err = div_ceil(h * h * h * g2, Dyadic(24), w + tolbits + 8);
      if (within_budget(err, h)) {
        Dyadic m = (it.u + it.v).mul_pow2(-1);
        Enclosure gm = ev.speed(Enclosure(m));
        total = total + (Enclosure(h) * gm).widened(err);
        continue;
      }
    }
    Dyadic m = (it.u + it.v).mul_pow2(-1).round_to(w + 16);
    if (m <= it.u || m >= it.v) {
      total = total + first_order;
      continue;
    }
    work.push_back({it.u, m});
    work.push_back({m, it.v});
  }
  return total.widened(sliver).rounded(w);
}

Enclosure ConstructedCurve::traversal_length(Precision r) const {
  int w = r.bits + kGuardBits;
  const Table& tab = table_for(w + 8);
  unsigned zones = tab.count - 1;

  unsigned quad_count = 0;
  for (unsigned n = 1; n <= zones; ++n)
    if (tab.at(n).coeff.lo().sign() > 0) ++quad_count;
  int tolbits = r.bits + 4;
  unsigned q = quad_count + 1;
  while (q > 1) {
    ++tolbits;
    q /= 2;
  }

  Enclosure total{Dyadic()};
  for (unsigned n = 1; n <= zones; ++n) {
    const Table::Seg& s = tab.at(n);
    Bump arch = tab.arch_bump(n);
    // on-axis run [start, t_n^-], inside the arch, v_y > 0
    Enclosure start_val =
        n == 1 ? Enclosure(Dyadic())
               : arch.integral2(tab.at(n - 1).t_plus, w + 8);
    Enclosure axis = arch.integral2(s.t_minus, w + 8) - start_val;
    total = total + axis;

    if (s.coeff.lo().sign() > 0) {
      total = total + lateral_speed_integral(tab, n, tolbits);
    } else {
      // vertical travel of the zone plus the dips; x adds at most
      // coeff.hi * I1x * zone length on top
      Enclosure vert = (s.arch - arch.integral2(s.t_minus, w + 8)) +
                       Enclosure(Dyadic(2 * static_cast<long>(n))) * s.lobe +
                       tab.arch_bump(n + 1).integral2(s.t_plus, w + 8);
      Dyadic zone_len = (s.t_plus.hi() - s.t_minus.lo()).ceil_to(w + 8);
      Dyadic fifth = div_ceil((s.t_cur - s.t_prev).hi(), Dyadic(5), w + 8);
      Dyadic i1x =
          (fifth * fifth * tab.inv8pi.hi()).mul_pow2(1).ceil_to(w + 8);
      Dyadic x_extra = (s.coeff.hi() * i1x * zone_len).ceil_to(w + 8);
      total = total + Enclosure(vert.lo(), (vert.hi() + x_extra));
    }
  }
  // tail beyond t_zones^+ : vertical + dips + lateral arcs
  {
    const Table::Seg& s = tab.at(zones);
    const Table::Seg& next = tab.at(zones + 1);
    Enclosure sy_at_tplus =
        next.sy_base + tab.arch_bump(zones + 1).integral2(s.t_plus, w + 8);
    Enclosure vert = tab.sy_lim - sy_at_tplus;
    total =
        total + Enclosure(vert.lo(),
                          vert.hi() + tab.dip_tail + tab.xarc_tail);
  }
  Enclosure out = total.rounded(w);
  if (out.width() > Dyadic::pow2(-r.bits))
    fail(ErrorCode::budget,
         "traversal_length: quadrature budget exhausted before reaching "
         "2^-" + std::to_string(r.bits));
  return out;
}

Enclosure ConstructedCurve::pointset_length(Precision r) const {
  int w = r.bits + kGuardBits;
  const Table& tab = table_for(w + 8);
  unsigned zones = tab.count - 1;

  unsigned quad_count = 0;
  for (unsigned n = 1; n <= zones; ++n)
    if (tau_->query_budgeted(n, 1u << 20).halted) ++quad_count;
  int tolbits = r.bits + 4;
  unsigned q = quad_count + 1;
  while (q > 1) {
    ++tolbits;
    q /= 2;
  }

  Enclosure total{Dyadic()};
  for (unsigned n = 1; n <= zones; ++n) {
    const Table::Seg& s = tab.at(n);
    Bump arch = tab.arch_bump(n);
    Enclosure start_val =
        n == 1 ? Enclosure(Dyadic())
               : arch.integral2(tab.at(n - 1).t_plus, w + 8);
    total = total + (arch.integral2(s.t_minus, w + 8) - start_val);

    bool in_k = tau_->query_budgeted(n, 1u << 20).halted;
    if (in_k) {
      // genuine forward arc; the parametrization is one-to-one here
      total = total + lateral_speed_integral(tab, n, tolbits);
    } else {
      // retraced: the zone's pointset is the vertical extent only
      Enclosure vert = (s.arch - arch.integral2(s.t_minus, w + 8)) +
                       tab.arch_bump(n + 1).integral2(s.t_plus, w + 8);
      total = total + vert;
    }
  }
  {
    const Table::Seg& s = tab.at(zones);
    const Table::Seg& next = tab.at(zones + 1);
    Enclosure sy_at_tplus =
        next.sy_base + tab.arch_bump(zones + 1).integral2(s.t_plus, w + 8);
    Enclosure vert = tab.sy_lim - sy_at_tplus;
    total = total + Enclosure(vert.lo(),
                              vert.hi() + tab.dip_tail + tab.xarc_tail);
  }
  Enclosure out = total.rounded(w);
  if (out.width() > Dyadic::pow2(-r.bits))
    fail(ErrorCode::budget, "pointset_length: budget exhausted");
  return out;
}

// --- straightened surrogate ---------------------------------------------------

StraightenedCurve::StraightenedCurve(std::shared_ptr<const TauTable> tau,
                                     unsigned segment_cutoff)
    : ConstructedCurve(std::move(tau), segment_cutoff) {}

std::pair<Enclosure, Enclosure> StraightenedCurve::position(
    const Dyadic& t, Precision r) const {
  int w = r.bits + kGuardBits + 4;
  const Table& tab = table_for(w);
  Enclosure te(t);
  check_curve_domain(te);

  unsigned n0 = first_segment(tab, t);
  for (unsigned n = n0 > 1 ? n0 - 1 : 1;
       n <= tab.count - 1 && tab.at(n).t_minus.lo() <= t; ++n) {
    const Table::Seg& s = tab.at(n);
    if (t > s.t_plus.hi() || t < s.t_minus.lo()) continue;
    if (tau_->query_budgeted(n, 1u << 20).halted) continue;  // kept as-is
    // replaced by the straight segment between s(t_n^-) and s(t_n^+)
    auto [x0, y0] = position_enc(s.t_minus, Precision(w));
    auto [x1, y1] = position_enc(s.t_plus, Precision(w));
    Enclosure lam = div_pos(Enclosure(t) - s.t_minus, s.t_plus - s.t_minus,
                            w + 8);
    lam = Enclosure(max(lam.lo(), Dyadic()), min(lam.hi(), Dyadic(1)));
    Enclosure ix = (x0 + lam * (x1 - x0)).rounded(w);
    Enclosure iy = (y0 + lam * (y1 - y0)).rounded(w);
    if (t >= s.t_minus.hi() && t <= s.t_plus.lo()) return {ix, iy};
    // boundary ambiguity: both branches agree at the seam, so hull them
    auto [cx, cy] = position_enc(te, Precision(w));
    return {Enclosure::hull(ix, cx).rounded(w),
            Enclosure::hull(iy, cy).rounded(w)};
  }
  return position_enc(te, Precision(w));
}

}  // namespace retrace
