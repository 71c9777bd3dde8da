/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <chrono>
#include <thread>
#include <memory>
#include <random>

#include "error.hpp"
#include "kernel.hpp"

using namespace retrace;

namespace {

std::shared_ptr<TauTable> table_137() {
  auto t = std::make_shared<TauTable>();
  t->set(1, StepCount::finite(3));
  t->set(2, StepCount::infinite());
  t->set(3, StepCount::finite(7));
  return t;
}

Enclosure E(long v) { return Enclosure(Dyadic(v)); }
Enclosure Ep(const char* s) { return Enclosure(Dyadic::parse(s)); }

bool close(const Enclosure& a, const Enclosure& b, int bits) {
  Dyadic d = (a.midpoint(bits + 16) - b.midpoint(bits + 16)).abs();
  return d <= Dyadic::pow2(-bits);
}

}  // namespace

TEST_CASE("phi anchors on [0,4]") {
  Precision r(20);
  CHECK(phi(E(0), E(4), E(0), r).contains(Dyadic(0)));
  Enclosure quarter = phi(E(0), E(4), E(1), r);  // sin(pi/2): the maximum
  CHECK(quarter.contains(Dyadic(1)));
  CHECK(quarter.width() <= Dyadic::pow2(-20));
  CHECK(phi(E(0), E(4), E(2), r).contains(Dyadic(0)));  // sin(pi)
  CHECK_THROWS_AS(phi(E(0), E(4), E(5), r), Error);
}

TEST_CASE("xi is -phi then +phi around the seam") {
  Precision r(20);
  CHECK(xi(E(0), E(2), E(0), r).contains(Dyadic(0)));
  Enclosure v = xi(E(0), E(2), Ep("0.25"), r);
  CHECK(v.contains(Dyadic::parse("-0.25")));
  CHECK(xi(E(0), E(2), E(1), r).contains(Dyadic(0)));  // seam
  // seam-straddling arguments still come back tight: both branches vanish
  Enclosure seam = xi(E(0), E(2), Enclosure(Dyadic::parse("0.9921875"),
                                            Dyadic::parse("1.0078125")),
                      Precision(5));
  CHECK(seam.contains(Dyadic(0)));
}

TEST_CASE("psi faces one arch then n double lobes") {
  Precision r(20);
  CHECK(psi(E(0), E(5), 1, E(0), r).contains(Dyadic(0)));
  // the arch peaks at the quarter point 25/24 with value 25/24
  Enclosure peak = psi(E(0), E(5), 1, Ep("0b1.00001010101010101010101010101"), r);
  CHECK(close(peak, Ep("0b1.0000101010101010101010101010101010101"), 18));
  CHECK(psi(E(0), E(5), 1, E(5), r).contains(Dyadic(0)));
}

TEST_CASE("double antiderivative of phi over the whole bump is (b-a)^3/8pi") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 8; ++i) {
    Dyadic a(BigInt(static_cast<long>(rng() % 512) - 256), -7);
    Dyadic b = a + Dyadic(BigInt(static_cast<long>(rng() % 384) + 32), -7);
    Enclosure lhs = phi_antideriv2(Enclosure(a), Enclosure(b), Enclosure(b),
                                   Precision(36));
    Enclosure span = Enclosure(b) - Enclosure(a);
    Enclosure rhs = div_pos(pow_n(span, 3, 60),
                            enc_pi(Precision(60)).mul_pow2(3), 52);
    CHECK(close(lhs, rhs, 34));
  }
}

TEST_CASE("breakpoint lattice: values and ordering") {
  BreakpointLattice l1 = breakpoints(1, Precision(40));
  CHECK(l1.t_prev.contains(Dyadic(0)));
  // t_1 = 1 - e^-1 = 0.63212055882...
  Enclosure t1 = Enclosure(Dyadic(1)) - enc_exp_neg(1, Precision(60));
  CHECK(close(l1.t_cur, t1, 38));
  // t_1^- = 4 t_1 / 5 = 0.5056964470...
  CHECK(close(l1.t_minus, div_pos(t1 * Enclosure(Dyadic(4)),
                                  Enclosure(Dyadic(5)), 56), 38));
  CHECK(l1.d.size() == 2);
  CHECK(l1.e.size() == 1);

  BreakpointLattice l2 = breakpoints(2, Precision(40));
  CHECK(l2.d.size() == 3);
  CHECK(l2.e.size() == 2);

  // Ordering with positive separation:
  // t_{n-1} < t_n^- < d_0 < e_0 < ... < t_n < t_n^+
  for (unsigned n = 1; n <= 5; ++n) {
    BreakpointLattice l = breakpoints(n, Precision(40));
    std::vector<Enclosure> chain;
    chain.push_back(l.t_prev);
    chain.push_back(l.t_minus);
    for (unsigned i = 0; i < n; ++i) {
      chain.push_back(l.d[i]);
      chain.push_back(l.e[i]);
    }
    chain.push_back(l.t_cur);
    chain.push_back(l.t_plus);
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      CHECK(chain[i].hi() < chain[i + 1].lo());
    // and t_n^+ < t_{n+1}^-
    BreakpointLattice next = breakpoints(n + 1, Precision(40));
    CHECK(l.t_plus.hi() <= next.t_minus.hi());
  }
}

TEST_CASE("acceleration anchors and signs") {
  ConstructedCurve curve(table_137());
  Precision r(30);
  auto [ax0, ay0] = curve.accel_enc(E(0), r);
  CHECK(ax0.contains(Dyadic(0)));
  CHECK(ay0.contains(Dyadic(0)));
  auto [ax1, ay1] = curve.accel_enc(E(1), r);
  CHECK(ax1.contains(Dyadic(0)));
  CHECK(ay1.contains(Dyadic(0)));
  CHECK(ax1.width() <= Dyadic::pow2(-30));
  CHECK(ay1.width() <= Dyadic::pow2(-30));

  // inside (t_1^-, t_1): a_x > 0 on the first half, < 0 on the second
  // (tau(1) = 3 puts 1 in the halting set)
  BreakpointLattice l = breakpoints(1, Precision(50));
  Enclosure q1 = l.t_minus + (l.t_cur - l.t_minus).mul_pow2(-2);
  Enclosure q3 = l.t_minus + ((l.t_cur - l.t_minus) * Ep("0.75"));
  auto [axq1, _u1] = curve.accel_enc(q1.rounded(40), r);
  auto [axq3, _u2] = curve.accel_enc(q3.rounded(40), r);
  CHECK(axq1.lo() > Dyadic(0));
  CHECK(axq3.hi() < Dyadic(0));
}

TEST_CASE("velocity vanishes at the stationary lattice") {
  ConstructedCurve curve(table_137());
  Precision r(40);
  auto [vx0, vy0] = curve.velocity_enc(E(0), r);
  CHECK(vx0.contains(Dyadic(0)));
  CHECK(vy0.contains(Dyadic(0)));

  for (unsigned n = 1; n <= 3; ++n) {
    BreakpointLattice l = breakpoints(n, Precision(60));
    auto [vx, vy] = curve.velocity_enc(l.t_cur, r);
    CHECK(vx.contains(Dyadic(0)));  // v_x(t_n) = 0: the lateral bump closes
    CHECK(vy.contains(Dyadic(0)));
    for (unsigned i = 0; i < n; ++i) {
      auto [dx, dy] = curve.velocity_enc(l.d[i], r);
      auto [ex, ey] = curve.velocity_enc(l.e[i], r);
      CHECK(dy.contains(Dyadic(0)));
      CHECK(ey.contains(Dyadic(0)));
    }
  }
}

TEST_CASE("position matches the closed forms at the breakpoints") {
  auto tau = table_137();
  ConstructedCurve curve(tau);
  Precision r(40);
  for (unsigned n = 1; n <= 4; ++n) {
    BreakpointLattice l = breakpoints(n, Precision(60));
    auto [sx, sy] = curve.position_enc(l.t_cur, r);
    CHECK(close(sx, sx_at_tn(*tau, n, Precision(48)), 38));
    CHECK(close(sy, sy_at_tn(n, Precision(48)), 38));
  }
  auto [sx1, sy1] = curve.position(Dyadic(1), r);
  CHECK(sx1.contains(Dyadic(0)));
  CHECK(close(sy1, sy_limit(Precision(48)), 38));
}

TEST_CASE("plateau equalities within a segment") {
  ConstructedCurve curve(table_137());
  Precision r(40);
  BreakpointLattice l = breakpoints(3, Precision(60));
  auto [x0, base] = curve.position_enc(l.d[0], r);
  for (unsigned i = 1; i <= 3; ++i) {
    auto [xi_, yi] = curve.position_enc(l.d[i], r);
    CHECK(close(yi, base, 38));  // s_y(d_i) = s_y(d_0)
  }
  auto [ex0, ebase] = curve.position_enc(l.e[0], r);
  auto [ex1, ey1] = curve.position_enc(l.e[1], r);
  CHECK(close(ey1, ebase, 38));
  // and the e-plateau sits exactly one marker gap below the d-plateau
  Enclosure gap = marker_gap(3, Precision(48));
  CHECK(close(base - ebase, gap, 38));
}

TEST_CASE("off the halting intervals the curve hugs the y-axis") {
  auto every_inf = std::make_shared<TauTable>();
  ConstructedCurve curve(every_inf);
  Precision r(40);
  for (const char* t : {"0.25", "0.5", "0.6875", "0.75", "0.9375"}) {
    auto [sx, sy] = curve.position(Dyadic::parse(t), r);
    auto [vx, vy] = curve.velocity_enc(Ep(t), r);
    CHECK(sx.contains(Dyadic(0)));
    CHECK(vx.contains(Dyadic(0)));
    CHECK(sx.width() <= Dyadic::pow2(-39));
  }
}

TEST_CASE("traversal length: bounds and tau sensitivity") {
  auto every_inf = std::make_shared<TauTable>();
  ConstructedCurve inf_curve(every_inf);
  Precision r(14);
  Enclosure total = inf_curve.traversal_length(r);
  CHECK(total.width() <= Dyadic::pow2(-14));

  // lower bound: at least the displacement s_y(1)
  Enclosure sy1 = sy_limit(Precision(40));
  CHECK(total.hi() >= sy1.lo());

  // with every segment retraced: at least s_y(1) + sum 2 n gap_n
  Enclosure dips{Dyadic()};
  for (unsigned n = 1; n <= 20; ++n)
    dips = dips + marker_gap(n, Precision(50)) *
                      Enclosure(Dyadic(2 * static_cast<long>(n)));
  CHECK(total.hi() >= (sy1 + dips).lo());
  CHECK(total.lo() <= (sy1 + dips).hi() + Dyadic::pow2(-13));

  // flipping tau(1) from infinity to 3 moves the total by less than
  // 10 * s_x(t_1)
  auto flipped = std::make_shared<TauTable>();
  flipped->set(1, StepCount::finite(3));
  ConstructedCurve flip_curve(flipped);
  Enclosure flipped_total = flip_curve.traversal_length(r);
  Enclosure sx1 = sx_at_tn(*flipped, 1, Precision(50));
  Dyadic diff = (flipped_total.midpoint(40) - total.midpoint(40)).abs();
  CHECK(diff <= (sx1 * Enclosure(Dyadic(10))).hi() + Dyadic::pow2(-12));
}

TEST_CASE("traversal length against a fixed-grid quadrature oracle") {
  auto tau = table_137();
  ConstructedCurve curve(tau);
  Enclosure total = curve.traversal_length(Precision(12));
  // crude midpoint-rule reference at h = 2^-12 (not rigorous, just a sanity
  // cross-check within its own error scale)
  Precision r(30);
  int mbits = 12;
  Dyadic sum;
  for (long i = 0; i < (1 << mbits); ++i) {
    Dyadic mid(BigInt(2 * i + 1), -(mbits + 1));
    auto [vx, vy] = curve.velocity_enc(Enclosure(mid), r);
    Dyadic x = vx.midpoint(40), y = vy.midpoint(40);
    sum += sqrt_ceil(x * x + y * y, 40);
  }
  Dyadic oracle = sum.mul_pow2(-mbits);
  Dyadic err = (oracle - total.midpoint(40)).abs();
  CHECK(err <= Dyadic(1, -10));
}

TEST_CASE("pointset length counts only genuine forward lobes") {
  auto every_inf = std::make_shared<TauTable>();
  ConstructedCurve inf_curve(every_inf);
  Enclosure h_inf = inf_curve.pointset_length(Precision(24));
  // everything retraces: the pointset is the vertical segment
  CHECK(close(h_inf, sy_limit(Precision(40)), 22));

  auto k1 = std::make_shared<TauTable>();
  k1->set(1, StepCount::finite(3));
  ConstructedCurve k1_curve(k1);
  Enclosure h1 = k1_curve.pointset_length(Precision(24));
  Enclosure gap1 = marker_gap(1, Precision(40));
  Enclosure sy1 = sy_limit(Precision(40));
  // the two forward lobes of segment 1 add at least 2 gap_1 and at most
  // 2 gap_1 + the full lateral excursion budget
  CHECK(h1.hi() >= (sy1 + gap1.mul_pow2(1)).lo());
  Enclosure sx1 = sx_at_tn(*k1, 1, Precision(40));
  CHECK(h1.lo() <=
        (sy1 + gap1.mul_pow2(1) + sx1 * Enclosure(Dyadic(8))).hi());
}

TEST_CASE("straightened curve replaces retraced zones by vertical runs") {
  auto tau = table_137();
  ConstructedCurve canonical(tau);
  StraightenedCurve straight(tau);
  Precision r(36);

  // outside every zone both agree
  auto [cx, cy] = canonical.position(Dyadic::parse("0.25"), r);
  auto [sx, sy] = straight.position(Dyadic::parse("0.25"), r);
  CHECK(cx.intersects(sx));
  CHECK(cy.intersects(sy));

  // inside the never-halting zone of segment 2 the straightened curve is the
  // linear interpolation of the zone endpoints
  BreakpointLattice l2 = breakpoints(2, Precision(60));
  Dyadic t_mid = (l2.t_minus.midpoint(50) + l2.t_plus.midpoint(50))
                     .mul_pow2(-1)
                     .round_to(50);
  auto [ix, iy] = straight.position(t_mid, r);
  CHECK(ix.contains(Dyadic(0)));
  auto [ex0, ey0] = canonical.position_enc(l2.t_minus, r);
  auto [ex1, ey1] = canonical.position_enc(l2.t_plus, r);
  Enclosure expected = (ey0 + ey1).mul_pow2(-1);
  CHECK(close(iy, expected, 30));
  // while the canonical curve is mid-lobe there, far from that height
  auto [mx, my] = canonical.position(t_mid, r);
  CHECK_FALSE(close(my, expected, 20));
}

TEST_CASE("evaluation cost scales polynomially in the precision") {
  auto tau = table_137();
  ConstructedCurve curve(tau);
  auto time_evals = [&](int bits) {
    Precision r(bits);
    // warm the per-precision table
    curve.position(Dyadic::parse("0.40625"), r);
    auto begin = std::chrono::steady_clock::now();
    for (int i = 0; i < 40; ++i) {
      Dyadic t(BigInt(3 * i + 1), -7);
      curve.position(t, r);
    }
    return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                         begin)
        .count();
  };
  double t20 = time_evals(20);
  double t40 = time_evals(40);
  CHECK(t40 <= 64.0 * t20 + 0.25);  // far below squaring
}

TEST_CASE("concurrent position queries agree with serial ones") {
  ConstructedCurve curve(table_137());
  Precision r(30);
  auto at = [&](int i) {
    return curve.position(Dyadic(BigInt(2 * i + 1), -8), r);
  };
  std::vector<std::pair<Enclosure, Enclosure>> serial;
  for (int i = 0; i < 32; ++i) serial.push_back(at(i));
  std::vector<std::pair<Enclosure, Enclosure>> parallel(32,
      {Enclosure(Dyadic(0)), Enclosure(Dyadic(0))});
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w)
    pool.emplace_back([&, w] {
      for (int i = w; i < 32; i += 4) parallel[i] = at(i);
    });
  for (auto& th : pool) th.join();
  for (int i = 0; i < 32; ++i) {
    CHECK(serial[i].first.lo() == parallel[i].first.lo());
    CHECK(serial[i].second.hi() == parallel[i].second.hi());
  }
}

TEST_CASE("segment cutoff too small for the precision is refused") {
  ConstructedCurve curve(table_137(), 8);
  CHECK_THROWS_AS(curve.position(Dyadic::parse("0.5"), Precision(40)), Error);
}
