/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <vector>

#include "dyadic.hpp"

namespace retrace {

struct Point2 {
  Dyadic x, y;

  friend bool operator==(const Point2& a, const Point2& b) {
    return a.x == b.x && a.y == b.y;
  }
};

// Exact squared Euclidean distance; every ORDER decision in the library goes
// through this, square roots appear only in reported lengths.
Dyadic dist2(const Point2& p, const Point2& q);

// Number of fractional bits used when a length needs an (irrational) square
// root; each rounding is directed so consumers can subtract the allowance.
inline constexpr std::int64_t kLengthFracBits = 64;

// Euclidean distance rounded up at 2^-frac_bits.
Dyadic dist_up(const Point2& p, const Point2& q,
               std::int64_t frac_bits = kLengthFracBits);

struct Polyline {
  std::vector<Point2> vertices;

  std::size_t size() const { return vertices.size(); }
  bool empty() const { return vertices.empty(); }
};

// Sum of per-edge distances, each rounded UP at 2^-kLengthFracBits, so
// reported lengths never understate.  The exact length lies within
// (edges * 2^-kLengthFracBits) below the result.
Dyadic polyline_length(const Polyline& p);

// The point at arclength fraction*length along p (fraction in [0, 1]),
// measured with the same rounded edge lengths as polyline_length.
// Zero-length polylines are an error.
Point2 arc_point(const Polyline& p, const Dyadic& fraction);

}  // namespace retrace
