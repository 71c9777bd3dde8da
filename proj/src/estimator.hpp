/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "curves.hpp"
#include "geometry.hpp"

namespace retrace {

// m(r): how fine to dissect [0,1] so that samples are 2^-r dense along the
// curve; normally the evaluator's modulus of uniform continuity.
using ModulusFn = std::function<int(Precision)>;

inline ModulusFn modulus_of(const PointEvaluator& ev) {
  return [&ev](Precision r) { return ev.modulus(r); };
}

struct SamplePoint {
  std::uint64_t index = 0;
  Dyadic a;   // parameter i * 2^-m
  Point2 x;   // |x - f(a)| <= 2^-(r+m+1)
};

// 2^m+1 evaluator outputs at the dyadic dissection; a multiset (duplicates
// preserved).
struct SampleSet {
  Precision r;
  int m = 0;
  std::vector<SamplePoint> points;
};

SampleSet sample(const PointEvaluator& ev, const ModulusFn& modulus,
                 Precision r);

// Spanning tree of the complete Euclidean graph on the samples.  Structure
// is decided by exact squared-distance comparisons (ties broken by
// lexicographic index pairs); stored weights are distances rounded up at
// 2^-(r+8).
struct WeightedTree {
  struct Edge {
    std::uint32_t a = 0, b = 0;
    Dyadic weight;
  };
  std::vector<Point2> nodes;
  std::vector<Edge> edges;
};

WeightedTree emst(const SampleSet& s);

namespace detail {
// Same tree through a chosen algorithm; the property tests assert that the
// dense Prim and the grid-bucketed Boruvka agree edge for edge.
WeightedTree emst_with(const SampleSet& s, bool force_dense);
}  // namespace detail

// Maximum-weight simple path in the tree (the weighted diameter), via two
// farthest-node sweeps; valid because weights are nonnegative.  Consecutive
// coincident points are pruned from the reported polyline.
Polyline longest_path(const WeightedTree& t);

struct LengthEstimate {
  Precision r;
  Dyadic l_r;          // certified lower bound for H^1(curve)
  Dyadic lmst_length;  // rounded-up length of the longest path
  Polyline lmst;
};

// Construction-4.1 pipeline: sample, spanning tree, longest path,
// l_r = length - (rounding allowance) - 2^-r.  Always l_r <= H^1; l_r -> H^1.
LengthEstimate lower_bound_length(const PointEvaluator& ev,
                                  const ModulusFn& modulus, Precision r);

// Hausdorff distance of two nonempty dyadic point sets: the directed
// sup-inf comparisons are exact on squared distances, the final root is
// rounded up at 2^-64.
Dyadic hausdorff_distance(const std::vector<Point2>& a,
                          const std::vector<Point2>& b);

// CSV/report helpers (external formats: "i,a_i,x,y" / "x,y" / "r l_r len").
std::string sample_csv(const SampleSet& s);
std::string polyline_csv(const Polyline& p);
std::string estimate_line(const LengthEstimate& e);

}  // namespace retrace
