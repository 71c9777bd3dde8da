/* SPDX-License-Identifier: Apache-2.0 */
#include "geometry.hpp"

#include "error.hpp"

namespace retrace {

Dyadic dist2(const Point2& p, const Point2& q) {
  Dyadic dx = p.x - q.x;
  Dyadic dy = p.y - q.y;
  return dx * dx + dy * dy;
}

Dyadic dist_up(const Point2& p, const Point2& q, std::int64_t frac_bits) {
  return sqrt_ceil(dist2(p, q), frac_bits);
}

Dyadic polyline_length(const Polyline& p) {
  if (p.empty()) fail(ErrorCode::invalid_argument, "empty polyline");
  Dyadic total;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i)
    total += dist_up(p.vertices[i], p.vertices[i + 1]);
  return total;
}

Point2 arc_point(const Polyline& p, const Dyadic& fraction) {
  if (fraction < Dyadic(0) || fraction > Dyadic(1))
    fail(ErrorCode::domain, "arc fraction outside [0, 1]");
  Dyadic total = polyline_length(p);
  if (total.is_zero())
    fail(ErrorCode::precondition, "arc_point on a zero-length polyline");
  Dyadic target = fraction * total;
  Dyadic walked;
  for (std::size_t i = 0; i + 1 < p.vertices.size(); ++i) {
    Dyadic len = dist_up(p.vertices[i], p.vertices[i + 1]);
    if (walked + len >= target) {
      if (len.is_zero()) return p.vertices[i];
      Dyadic u = div_floor(target - walked, len, kLengthFracBits);
      u = max(Dyadic(0), min(Dyadic(1), u));
      const Point2& a = p.vertices[i];
      const Point2& b = p.vertices[i + 1];
      return Point2{(a.x + u * (b.x - a.x)).round_to(2 * kLengthFracBits),
                    (a.y + u * (b.y - a.y)).round_to(2 * kLengthFracBits)};
    }
    walked += len;
  }
  return p.vertices.back();
}

}  // namespace retrace
