/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <memory>
#include <utility>

#include "enclosure.hpp"
#include "geometry.hpp"

namespace retrace {

// Oracle-style evaluator of a parametrization f : [0,1] -> R^2.  position()
// returns per-coordinate enclosures of width <= 2^-r containing f(t);
// modulus() is a modulus of uniform continuity h with
// |s - t| <= 2^-h(r)  =>  |f(s) - f(t)| <= 2^-r.
class PointEvaluator {
 public:
  virtual ~PointEvaluator() = default;

  virtual std::pair<Enclosure, Enclosure> position(const Dyadic& t,
                                                   Precision r) const = 0;
  virtual int modulus(Precision r) const = 0;

  // A dyadic point within 2^-r of f(t); rounded onto the grid 2^-(r+2).
  Point2 approx(const Dyadic& t, Precision r) const;
};

// f(t) = (t, 0): the unit segment, traversed once.
class SegmentCurve final : public PointEvaluator {
 public:
  std::pair<Enclosure, Enclosure> position(const Dyadic& t,
                                           Precision r) const override;
  int modulus(Precision r) const override { return r.bits; }
};

// f(t) = (cos pi t, sin pi t): the upper half unit circle, length pi.
class HalfCircleCurve final : public PointEvaluator {
 public:
  std::pair<Enclosure, Enclosure> position(const Dyadic& t,
                                           Precision r) const override;
  int modulus(Precision r) const override { return r.bits + 2; }  // Lip = pi
};

// f(t) = (min(2t, 2-2t), 0): the unit segment traversed out and back, the
// canonical 1-fold-retracing parametrization.
class TriangleWaveCurve final : public PointEvaluator {
 public:
  std::pair<Enclosure, Enclosure> position(const Dyadic& t,
                                           Precision r) const override;
  int modulus(Precision r) const override { return r.bits + 1; }  // Lip = 2
};

}  // namespace retrace
