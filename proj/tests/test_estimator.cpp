/* SPDX-License-Identifier: Apache-2.0 */
#include <doctest.h>

#include <algorithm>
#include <random>

#include "error.hpp"
#include "estimator.hpp"
#include "support.hpp"

using namespace retrace;

namespace {

Point2 pt(const char* x, const char* y) {
  return Point2{Dyadic::parse(x), Dyadic::parse(y)};
}

struct ConstantCurve final : PointEvaluator {
  std::pair<Enclosure, Enclosure> position(const Dyadic&, Precision) const override {
    return {Enclosure(Dyadic(0)), Enclosure(Dyadic(0))};
  }
  int modulus(Precision) const override { return 0; }
};

SampleSet set_of(std::vector<Point2> pts, int r = 8) {
  SampleSet s;
  s.r = Precision(r);
  s.m = 4;
  std::uint64_t i = 0;
  for (Point2& p : pts) {
    s.points.push_back({i, Dyadic(BigInt(i), -4), std::move(p)});
    ++i;
  }
  return s;
}

Dyadic tree_weight(const WeightedTree& t) {
  Dyadic sum;
  for (const auto& e : t.edges) sum += e.weight;
  return sum;
}

}  // namespace

TEST_CASE("sampling honours the dissection contract") {
  SegmentCurve seg;
  auto m2 = [](Precision) { return 2; };
  SampleSet s = sample(seg, m2, Precision(4));
  REQUIRE(s.points.size() == 5);
  Dyadic tol = Dyadic::pow2(-7);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(s.points[i].a == Dyadic(BigInt(i), -2));
    if (i > 0) CHECK(s.points[i].a > s.points[i - 1].a);
    CHECK(dist2(s.points[i].x, Point2{s.points[i].a, Dyadic(0)}) <= tol * tol);
  }
}

TEST_CASE("a constant curve yields coincident samples, multiset kept") {
  ConstantCurve c;
  auto m2 = [](Precision) { return 2; };
  SampleSet s = sample(c, m2, Precision(4));
  REQUIRE(s.points.size() == 5);
  Dyadic tol = Dyadic::pow2(-7);
  for (const SamplePoint& p : s.points)
    CHECK(dist2(p.x, Point2{Dyadic(0), Dyadic(0)}) <= tol * tol);
}

TEST_CASE("triangle wave samples increase in parameter, not in x") {
  TriangleWaveCurve tw;
  auto m3 = [](Precision) { return 3; };
  SampleSet s = sample(tw, m3, Precision(6));
  REQUIRE(s.points.size() == 9);
  bool monotone = true;
  for (std::size_t i = 1; i < 9; ++i) {
    CHECK(s.points[i].a > s.points[i - 1].a);
    if (s.points[i].x.x < s.points[i - 1].x.x) monotone = false;
  }
  CHECK_FALSE(monotone);
}

TEST_CASE("emst on three collinear points is the path") {
  WeightedTree t = emst(set_of({pt("0", "0"), pt("1", "0"), pt("2", "0")}));
  REQUIRE(t.edges.size() == 2);
  CHECK(tree_weight(t) == Dyadic(2));
  for (const auto& e : t.edges) CHECK(e.a + 1 == e.b);
}

TEST_CASE("emst picks the two short edges of a triangle") {
  // d(0,1) = 1, d(1,2) = sqrt(0.26), d(0,2) = sqrt(1.06): keep 0-1 and 1-2
  WeightedTree t =
      emst(set_of({pt("0", "0"), pt("1", "0"), pt("0.90625", "0.5")}));
  REQUIRE(t.edges.size() == 2);
  Dyadic expect = Dyadic(1) + sqrt_ceil(dist2(pt("1", "0"),
                                              pt("0.90625", "0.5")), 16);
  CHECK(tree_weight(t) == expect);
  for (const auto& e : t.edges) CHECK(!(e.a == 0 && e.b == 2));
}

TEST_CASE("duplicate points join with a zero-weight edge") {
  WeightedTree t = emst(set_of({pt("0", "0"), pt("0", "0")}));
  REQUIRE(t.edges.size() == 1);
  CHECK(t.edges[0].weight == Dyadic(0));
}

TEST_CASE("longest path in a path tree is the whole path") {
  WeightedTree t;
  t.nodes = {pt("0", "0"), pt("1", "0"), pt("2", "0")};
  t.edges = {{0, 1, Dyadic(1)}, {1, 2, Dyadic(1)}};
  Polyline p = longest_path(t);
  REQUIRE(p.size() == 3);
  CHECK(polyline_length(p) == Dyadic(2));
}

TEST_CASE("longest path in a star takes the two heaviest spokes") {
  WeightedTree t;
  t.nodes = {pt("0", "0"), pt("3", "0"), pt("0", "2"), pt("-1", "0")};
  t.edges = {{0, 1, Dyadic(3)}, {0, 2, Dyadic(2)}, {0, 3, Dyadic(1)}};
  Polyline p = longest_path(t);
  REQUIRE(p.size() == 3);
  CHECK(polyline_length(p) == Dyadic(5));
  CHECK(p.vertices.front() == pt("3", "0"));
  CHECK(p.vertices.back() == pt("0", "2"));
}

TEST_CASE("longest path of a single node is degenerate") {
  WeightedTree t;
  t.nodes = {pt("4", "5")};
  Polyline p = longest_path(t);
  REQUIRE(p.size() == 1);
  CHECK(polyline_length(p) == Dyadic(0));
}

TEST_CASE("lower bounds: unit segment") {
  SegmentCurve seg;
  for (int r : {2, 4, 6, 9}) {
    LengthEstimate est = lower_bound_length(seg, modulus_of(seg), Precision(r));
    CHECK(est.l_r <= Dyadic(1));
    int m = seg.modulus(Precision(r));
    Dyadic slack = Dyadic::pow2(-r) +
                   Dyadic(4).mul_pow2(-(r + m + 1)) + Dyadic(1, -50);
    CHECK(est.l_r >= Dyadic(1) - slack);
  }
}

TEST_CASE("lower bounds: retracing triangle wave converges to 1, not 2") {
  TriangleWaveCurve tw;
  LengthEstimate est = lower_bound_length(tw, modulus_of(tw), Precision(9));
  CHECK(est.l_r <= Dyadic(1));
  CHECK(est.l_r >= Dyadic(1) - Dyadic(1, -6));
}

TEST_CASE("lower bounds: half circle approaches pi") {
  HalfCircleCurve hc;
  auto m_same = [](Precision r) { return r.bits; };  // fixed m(r) = r
  LengthEstimate est = lower_bound_length(hc, m_same, Precision(12));
  Enclosure pi = enc_pi(Precision(40));
  CHECK(est.l_r <= pi.lo());
  CHECK(est.l_r >= pi.lo() - Dyadic(BigInt(5), -9));  // within 0.0098 < 0.01
}

TEST_CASE("emst equals brute force on small random sets") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 40; ++trial) {
    std::size_t n = 2 + rng() % 7;
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(Point2{Dyadic(BigInt(static_cast<long>(rng() % 256)), -6),
                           Dyadic(BigInt(static_cast<long>(rng() % 256)), -6)});
    SampleSet s = set_of(pts, 8);
    WeightedTree t = emst(s);
    Dyadic brute = testsupport::brute_force_mst(pts, 16);
    Dyadic mine = tree_weight(t);
    CHECK(mine >= brute - Dyadic(BigInt(static_cast<long>(n)), -60));
    CHECK(mine <= brute + Dyadic(BigInt(static_cast<long>(n)), -60));
  }
}

TEST_CASE("boruvka and dense prim build trees of equal weight") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 6; ++trial) {
    std::size_t n = 200 + rng() % 900;
    std::vector<Point2> pts;
    for (std::size_t i = 0; i < n; ++i)
      pts.push_back(
          Point2{Dyadic(BigInt(static_cast<long>(rng() % 8192)), -10),
                 Dyadic(BigInt(static_cast<long>(rng() % 8192)), -10)});
    // duplicates on purpose
    for (int d = 0; d < 8; ++d) pts.push_back(pts[rng() % n]);
    SampleSet s = set_of(pts, 10);
    WeightedTree dense = detail::emst_with(s, true);
    WeightedTree bucketed = detail::emst_with(s, false);
    CHECK(tree_weight(dense) == tree_weight(bucketed));
  }
}

TEST_CASE("retracing invariance of the estimate") {
  SegmentCurve seg;
  TriangleWaveCurve tw;
  LengthEstimate a = lower_bound_length(seg, modulus_of(seg), Precision(10));
  LengthEstimate b = lower_bound_length(tw, modulus_of(tw), Precision(10));
  Dyadic diff = (a.l_r - b.l_r).abs();
  CHECK(diff <= Dyadic(1, -7));
}

TEST_CASE("hausdorff distance") {
  std::vector<Point2> a{pt("0", "0"), pt("1", "0")};
  CHECK(hausdorff_distance(a, a) == Dyadic(0));
  CHECK(hausdorff_distance({pt("0", "0")}, {pt("3", "4")}) == Dyadic(5));
  CHECK(hausdorff_distance(a, {pt("0", "0")}) == Dyadic(1));
  CHECK_THROWS_AS(hausdorff_distance({}, a), Error);
}

TEST_CASE("csv exports") {
  SampleSet s = set_of({pt("0", "0"), pt("0.5", "1")});
  std::string csv = sample_csv(s);
  CHECK(csv.find("i,a_i,x,y\n") == 0);
  CHECK(csv.find("1,0.0625,0.5,1\n") != std::string::npos);
  Polyline p{{pt("0", "0"), pt("0.5", "1")}};
  CHECK(polyline_csv(p) == "x,y\n0,0\n0.5,1\n");
}
