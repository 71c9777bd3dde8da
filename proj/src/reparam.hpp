/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <optional>

#include "estimator.hpp"

namespace retrace {

// Oracle for the curve length: |query(n) - H^1| <= 2^-n.
class LengthOracle {
 public:
  virtual ~LengthOracle() = default;
  virtual Dyadic query(Precision n) const = 0;
};

// Backed by a tight enclosure of the true length (analytic test curves,
// pointset-length runs).
class EnclosureLengthOracle final : public LengthOracle {
 public:
  explicit EnclosureLengthOracle(Enclosure value) : value_(std::move(value)) {}
  Dyadic query(Precision n) const override;

 private:
  Enclosure value_;
};

// The Minkowski sausage of a polyline: disks of radius halfwidth around the
// vertices plus halfwidth-thick rectangles around the edges.
struct Sausage {
  Polyline spine;
  Dyadic halfwidth;
};

// Length of a shortest path between p1 and p2 through an 8-connected grid
// discretization of the sausage at the given resolution (cell centers within
// halfwidth of the spine; diagonal steps rounded up).  The result
// overestimates the continuum geodesic by the grid metric distortion, which
// stays within a few percent for resolution <= halfwidth/8 and is near zero
// for axis-aligned corridors.  Errors: endpoints outside the region (domain),
// region disconnected at this resolution (precondition), grid too large
// (budget).
Dyadic sausage_shortest_path(const Sausage& s, const Point2& p1,
                             const Point2& p2, const Dyadic& resolution);

// Orient the path so vertex 0 is the one nearer hint0 and the last vertex
// nearer hint1; ambiguity (both hints nearer the same end, or ties) is an
// error.
Polyline identify_endpoints(Polyline lmst, const Point2& hint0,
                            const Point2& hint1);

struct ReparamResult {
  Precision k;
  Dyadic x;
  Point2 point;  // within 2^-k of the constant-speed parametrization at x
};

// One admitted refinement of the Construction-4.1 pipeline, reusable for
// multiple fractions.  Building the session runs the refinement loop:
// sample at r, take the longest spanning-tree path, and accept once
//   (a) its certified length exceeds O_l(k+8) - delta/2,
//   (b) it does not exceed O_l(k+8) + delta/2, and
//   (c) the sausage geodesic between its endpoints reaches O_l(k+8) - delta/2
// with delta = 2^-(4+k) and sausage halfwidth 2^-r; otherwise r doubles.
// A length oracle corrupted by more than delta in either direction makes the
// checks unsatisfiable, so the session refuses (budget error) rather than
// mis-parametrize.
class ReparamSession {
 public:
  ReparamSession(const PointEvaluator& ev, const ModulusFn& modulus,
                 const LengthOracle& length, const Point2& hint0,
                 const Point2& hint1, Precision k, int max_refine_r = 0);

  ReparamResult point_at(const Dyadic& x) const;

  int admitted_r() const { return admitted_r_; }
  const Polyline& oriented_lmst() const { return lmst_; }

 private:
  Precision k_;
  int admitted_r_ = 0;
  Polyline lmst_;
};

// Single-shot form: build a session and evaluate one fraction.
ReparamResult constant_speed_point(const PointEvaluator& ev,
                                   const ModulusFn& modulus,
                                   const LengthOracle& length,
                                   const Point2& hint0, const Point2& hint1,
                                   Precision k, const Dyadic& x);

}  // namespace retrace
