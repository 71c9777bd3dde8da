/* SPDX-License-Identifier: Apache-2.0 */
#include "curves.hpp"

#include "error.hpp"

namespace retrace {

Point2 PointEvaluator::approx(const Dyadic& t, Precision r) const {
  auto [x, y] = position(t, Precision(r.bits + 2));
  std::int64_t grid = r.bits + 2;
  return Point2{x.midpoint(grid).round_to(grid), y.midpoint(grid).round_to(grid)};
}

namespace {

void check_domain(const Dyadic& t) {
  if (t < Dyadic(0) || t > Dyadic(1))
    fail(ErrorCode::domain, "curve parameter outside [0, 1]");
}

}  // namespace

std::pair<Enclosure, Enclosure> SegmentCurve::position(const Dyadic& t,
                                                       Precision) const {
  check_domain(t);
  return {Enclosure(t), Enclosure(Dyadic())};
}

std::pair<Enclosure, Enclosure> HalfCircleCurve::position(const Dyadic& t,
                                                          Precision r) const {
  check_domain(t);
  int w = r.bits + kGuardBits;
  Enclosure arg = enc_pi(Precision(w + 6)) * Enclosure(t);
  Precision ra(w);
  return {enc_cos(arg, ra), enc_sin(arg, ra)};
}

std::pair<Enclosure, Enclosure> TriangleWaveCurve::position(const Dyadic& t,
                                                            Precision) const {
  check_domain(t);
  Dyadic two_t = t.mul_pow2(1);
  Dyadic x = min(two_t, Dyadic(2) - two_t);
  return {Enclosure(x), Enclosure(Dyadic())};
}

}  // namespace retrace
