/* SPDX-License-Identifier: Apache-2.0 */
#include "reparam.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <queue>
#include <vector>

#include "error.hpp"

namespace retrace {

Dyadic EnclosureLengthOracle::query(Precision n) const {
  if (value_.width() > Dyadic::pow2(-n.bits - 1))
    fail(ErrorCode::precondition,
         "length oracle asked for 2^-" + std::to_string(n.bits) +
             " but only holds a wider enclosure");
  return value_.midpoint(n.bits + 4);
}

namespace {

// All sausage geometry runs in integer units of resolution/1024; squared
// quantities fit __int128.
struct GridGeom {
  std::int64_t unit_exp = 0;  // one unit = 2^unit_exp

  std::int64_t to_units(const Dyadic& v) const {
    Dyadic r = v.mul_pow2(-unit_exp).round_to(0);
    BigInt m = r.mantissa() << static_cast<unsigned>(r.exponent());
    if (m > std::numeric_limits<std::int64_t>::max() / 2 ||
        m < std::numeric_limits<std::int64_t>::min() / 2)
      fail(ErrorCode::budget, "sausage grid coordinates overflow");
    return static_cast<std::int64_t>(m);
  }
};

using I128 = __int128;

I128 sq(std::int64_t v) { return static_cast<I128>(v) * v; }

// squared distance from point p to segment [a, b], exactly, in units^2
I128 point_segment_d2(std::int64_t px, std::int64_t py, std::int64_t ax,
                      std::int64_t ay, std::int64_t bx, std::int64_t by) {
  std::int64_t ux = bx - ax, uy = by - ay;
  std::int64_t vx = px - ax, vy = py - ay;
  I128 dot = static_cast<I128>(ux) * vx + static_cast<I128>(uy) * vy;
  if (dot <= 0) return sq(vx) + sq(vy);
  I128 len2 = sq(ux) + sq(uy);
  if (dot >= len2) return sq(px - bx) + sq(py - by);
  I128 cross = static_cast<I128>(ux) * vy - static_cast<I128>(uy) * vx;
  // d2 = cross^2 / len2, rounded up to stay conservative
  I128 c2 = cross < 0 ? -cross : cross;
  // compare-only callers use d2 * len2 form; here return ceil division
  return (c2 * c2 + len2 - 1) / len2;
}

}  // namespace

Dyadic sausage_shortest_path(const Sausage& s, const Point2& p1,
                             const Point2& p2, const Dyadic& resolution) {
  if (s.spine.empty())
    fail(ErrorCode::precondition, "sausage around an empty spine");
  if (resolution.sign() <= 0 || s.halfwidth.sign() <= 0)
    fail(ErrorCode::invalid_argument, "resolution and halfwidth must be > 0");

  // one grid cell = 1024 units
  GridGeom geom;
  geom.unit_exp = resolution.mag_exponent() - 11;
  std::int64_t cell = geom.to_units(resolution);
  if (cell < 2) fail(ErrorCode::invalid_argument, "resolution too small");
  std::int64_t hw = geom.to_units(s.halfwidth);

  std::vector<std::array<std::int64_t, 2>> spine;
  spine.reserve(s.spine.size());
  std::int64_t minx = 0, maxx = 0, miny = 0, maxy = 0;
  bool first = true;
  for (const Point2& v : s.spine.vertices) {
    std::int64_t x = geom.to_units(v.x), y = geom.to_units(v.y);
    spine.push_back({x, y});
    if (first) {
      minx = maxx = x;
      miny = maxy = y;
      first = false;
    } else {
      minx = std::min(minx, x);
      maxx = std::max(maxx, x);
      miny = std::min(miny, y);
      maxy = std::max(maxy, y);
    }
  }
  auto cell_floor = [cell](std::int64_t v) {
    return v >= 0 ? v / cell : -((-v + cell - 1) / cell);
  };
  std::int64_t cx0 = cell_floor(minx - hw) - 1, cx1 = cell_floor(maxx + hw) + 1;
  std::int64_t cy0 = cell_floor(miny - hw) - 1, cy1 = cell_floor(maxy + hw) + 1;
  std::int64_t W = cx1 - cx0 + 1, H = cy1 - cy0 + 1;
  if (W <= 0 || H <= 0 || W * H > 1'600'000'000)
    fail(ErrorCode::budget, "sausage grid would need " +
                                std::to_string(W * H) + " cells");
  // occupancy bitmap over the bounding box; the corridor itself is narrow,
  // so the walkable cells are packed into per-row sorted lists afterwards
  std::size_t total = static_cast<std::size_t>(W * H);
  std::vector<std::uint64_t> bits(total / 64 + 1, 0);
  auto idx_of = [&](std::int64_t ix, std::int64_t iy) {
    return static_cast<std::size_t>((iy - cy0) * W + (ix - cx0));
  };
  auto bit_set = [&](std::size_t id) {
    bits[id >> 6] |= std::uint64_t{1} << (id & 63);
  };
  auto bit_get = [&](std::size_t id) {
    return (bits[id >> 6] >> (id & 63)) & 1u;
  };
  auto center = [&](std::int64_t ic) { return ic * cell + cell / 2; };

  I128 hw2 = sq(hw);
  auto mark_segment = [&](const std::array<std::int64_t, 2>& a,
                          const std::array<std::int64_t, 2>& b) {
    std::int64_t sx0 = cell_floor(std::min(a[0], b[0]) - hw) - 1;
    std::int64_t sx1 = cell_floor(std::max(a[0], b[0]) + hw) + 1;
    std::int64_t sy0 = cell_floor(std::min(a[1], b[1]) - hw) - 1;
    std::int64_t sy1 = cell_floor(std::max(a[1], b[1]) + hw) + 1;
    sx0 = std::max(sx0, cx0);
    sx1 = std::min(sx1, cx1);
    sy0 = std::max(sy0, cy0);
    sy1 = std::min(sy1, cy1);
    for (std::int64_t iy = sy0; iy <= sy1; ++iy)
      for (std::int64_t ix = sx0; ix <= sx1; ++ix) {
        std::size_t id = idx_of(ix, iy);
        if (bit_get(id)) continue;
        if (point_segment_d2(center(ix), center(iy), a[0], a[1], b[0], b[1]) <=
            hw2)
          bit_set(id);
      }
  };
  if (spine.size() == 1) mark_segment(spine[0], spine[0]);
  for (std::size_t i = 0; i + 1 < spine.size(); ++i)
    mark_segment(spine[i], spine[i + 1]);

  // pack: nodes are the set bits, row by row, x ascending
  std::vector<std::size_t> row_start(static_cast<std::size_t>(H) + 1, 0);
  std::vector<std::uint32_t> node_x;
  for (std::int64_t ry = 0; ry < H; ++ry) {
    row_start[static_cast<std::size_t>(ry)] = node_x.size();
    std::size_t base = static_cast<std::size_t>(ry) * W;
    for (std::int64_t rx = 0; rx < W;) {
      std::size_t id = base + static_cast<std::size_t>(rx);
      if ((id & 63) == 0 && bits[id >> 6] == 0) {
        rx += 64;  // skip empty words
        continue;
      }
      if (bit_get(id)) node_x.push_back(static_cast<std::uint32_t>(rx));
      ++rx;
    }
  }
  row_start[static_cast<std::size_t>(H)] = node_x.size();
  if (node_x.size() > 80'000'000)
    fail(ErrorCode::budget, "sausage corridor has too many cells");

  auto node_at = [&](std::int64_t ix, std::int64_t iy) -> std::int64_t {
    if (ix < cx0 || ix > cx1 || iy < cy0 || iy > cy1) return -1;
    std::size_t ry = static_cast<std::size_t>(iy - cy0);
    std::uint32_t rx = static_cast<std::uint32_t>(ix - cx0);
    auto first = node_x.begin() + row_start[ry];
    auto last = node_x.begin() + row_start[ry + 1];
    auto it = std::lower_bound(first, last, rx);
    if (it == last || *it != rx) return -1;
    return it - node_x.begin();
  };

  auto locate = [&](const Point2& p, const char* which) {
    std::int64_t x = geom.to_units(p.x), y = geom.to_units(p.y);
    std::int64_t n = node_at(cell_floor(x), cell_floor(y));
    if (n < 0)
      fail(ErrorCode::domain,
           std::string(which) + " lies outside the sausage region");
    return n;
  };
  std::int64_t src = locate(p1, "p1");
  std::int64_t dst = locate(p2, "p2");
  if (src == dst) return dist_up(p1, p2);

  auto coords_of = [&](std::int64_t n) {
    std::size_t ry =
        std::upper_bound(row_start.begin(), row_start.end(),
                         static_cast<std::size_t>(n)) -
        row_start.begin() - 1;
    return std::pair<std::int64_t, std::int64_t>(
        static_cast<std::int64_t>(node_x[static_cast<std::size_t>(n)]) + cx0,
        static_cast<std::int64_t>(ry) + cy0);
  };

  // 8-connected Dijkstra; orth step = cell, diag = cell * 1449/1024 >= sqrt 2
  std::vector<std::int64_t> dist(node_x.size(),
                                 std::numeric_limits<std::int64_t>::max());
  using HeapItem = std::pair<std::int64_t, std::int64_t>;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap;
  dist[static_cast<std::size_t>(src)] = 0;
  heap.push({0, src});
  const std::int64_t step_orth = cell;
  const std::int64_t step_diag = (cell * 1449 + 1023) / 1024;
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d != dist[static_cast<std::size_t>(u)]) continue;
    if (u == dst) break;
    auto [ux, uy] = coords_of(u);
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (dx == 0 && dy == 0) continue;
        std::int64_t v = node_at(ux + dx, uy + dy);
        if (v < 0) continue;
        std::int64_t nd = d + ((dx == 0 || dy == 0) ? step_orth : step_diag);
        if (nd < dist[static_cast<std::size_t>(v)]) {
          dist[static_cast<std::size_t>(v)] = nd;
          heap.push({nd, v});
        }
      }
  }
  if (dist[static_cast<std::size_t>(dst)] ==
      std::numeric_limits<std::int64_t>::max())
    fail(ErrorCode::precondition,
         "sausage region is disconnected at this resolution");
  Dyadic grid_len =
      Dyadic(BigInt(dist[static_cast<std::size_t>(dst)]), geom.unit_exp);
  // connect the true endpoints to their cell centers
  auto center_point = [&](std::int64_t n) {
    auto [ix, iy] = coords_of(n);
    return Point2{Dyadic(BigInt(center(ix)), geom.unit_exp),
                  Dyadic(BigInt(center(iy)), geom.unit_exp)};
  };
  return grid_len + dist_up(p1, center_point(src)) +
         dist_up(p2, center_point(dst));
}

Polyline identify_endpoints(Polyline lmst, const Point2& hint0,
                            const Point2& hint1) {
  if (lmst.size() < 2)
    fail(ErrorCode::precondition, "cannot orient a degenerate path");
  const Point2& front = lmst.vertices.front();
  const Point2& back = lmst.vertices.back();
  Dyadic f0 = dist2(hint0, front), f1 = dist2(hint0, back);
  Dyadic b0 = dist2(hint1, front), b1 = dist2(hint1, back);
  bool keep = f0 < f1 && b1 < b0;
  bool flip = f1 < f0 && b0 < b1;
  if (keep == flip)
    fail(ErrorCode::ambiguous,
         "endpoint hints do not resolve the path orientation");
  if (flip) std::reverse(lmst.vertices.begin(), lmst.vertices.end());
  return lmst;
}

ReparamSession::ReparamSession(const PointEvaluator& ev,
                               const ModulusFn& modulus,
                               const LengthOracle& length, const Point2& hint0,
                               const Point2& hint1, Precision k,
                               int max_refine_r)
    : k_(k) {
  if (k.bits < 1) fail(ErrorCode::invalid_argument, "k must be >= 1");
  Dyadic oracle_len = length.query(Precision(k.bits + 8));
  Dyadic oracle_err = Dyadic::pow2(-(k.bits + 8));
  // the procedure presumes H^1 > 1000 * 2^-k
  if (!(oracle_len - oracle_err > Dyadic(1000).mul_pow2(-k.bits)))
    fail(ErrorCode::precondition,
         "curve too short for this k; re-run with a larger k");
  Dyadic half_delta = Dyadic::pow2(-(5 + k.bits));
  int r = k.bits + 5;
  if (max_refine_r <= 0) max_refine_r = 4 * k.bits + 40;
  for (;;) {
    LengthEstimate est = lower_bound_length(ev, modulus, Precision(r));
    Dyadic len_lo = est.l_r + Dyadic::pow2(-r);  // certified lower bound
    bool ok_a = len_lo > oracle_len - half_delta;
    bool ok_b = !(len_lo > oracle_len + half_delta);
    if (ok_a && ok_b && est.lmst.size() >= 2) {
      Polyline oriented = identify_endpoints(est.lmst, hint0, hint1);
      Dyadic hw = Dyadic::pow2(-r);
      Dyadic res = Dyadic::pow2(-(r + 3));
      Dyadic geod = sausage_shortest_path({oriented, hw},
                                          oriented.vertices.front(),
                                          oriented.vertices.back(), res);
      if (geod >= oracle_len - half_delta) {
        admitted_r_ = r;
        lmst_ = std::move(oriented);
        return;
      }
    }
    if (2 * r > max_refine_r)
      fail(ErrorCode::budget,
           "admissibility not reached by r = " + std::to_string(r) +
               "; the length oracle and the curve disagree");
    r *= 2;
  }
}

ReparamResult ReparamSession::point_at(const Dyadic& x) const {
  if (x < Dyadic(0) || x > Dyadic(1))
    fail(ErrorCode::domain, "fraction outside [0, 1]");
  return {k_, x, arc_point(lmst_, x)};
}

ReparamResult constant_speed_point(const PointEvaluator& ev,
                                   const ModulusFn& modulus,
                                   const LengthOracle& length,
                                   const Point2& hint0, const Point2& hint1,
                                   Precision k, const Dyadic& x) {
  ReparamSession session(ev, modulus, length, hint0, hint1, k);
  return session.point_at(x);
}

}  // namespace retrace
