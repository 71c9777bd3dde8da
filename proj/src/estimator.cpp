/* SPDX-License-Identifier: Apache-2.0 */
#include "estimator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <unordered_map>

#include "error.hpp"

namespace retrace {

SampleSet sample(const PointEvaluator& ev, const ModulusFn& modulus,
                 Precision r) {
  int m = modulus(r);
  if (m < 0) m = 0;
  if (m > 26)
    fail(ErrorCode::budget,
         "dissection 2^" + std::to_string(m) + " is beyond the sampling budget");
  SampleSet s;
  s.r = r;
  s.m = m;
  std::uint64_t count = (std::uint64_t{1} << m) + 1;
  s.points.reserve(count);
  Precision out_prec(r.bits + m + 1);
  for (std::uint64_t i = 0; i < count; ++i) {
    Dyadic a(BigInt(i), -m);
    s.points.push_back({i, a, ev.approx(a, out_prec)});
  }
  return s;
}

namespace {

// ---- exact distance backends ----------------------------------------------

// int64 coordinates on a common power-of-two grid; squared distances fit
// __int128 exactly.
struct FlatOps {
  std::vector<std::array<std::int64_t, 2>> pts;
  std::int64_t exp = 0;

  using dist_t = unsigned __int128;
  dist_t d2(std::size_t i, std::size_t j) const {
    std::int64_t dx = pts[i][0] - pts[j][0];
    std::int64_t dy = pts[i][1] - pts[j][1];
    return static_cast<dist_t>(static_cast<__int128>(dx) * dx) +
           static_cast<dist_t>(static_cast<__int128>(dy) * dy);
  }
  Dyadic d2_dyadic(dist_t v) const {
    BigInt b = 0;
    b = static_cast<std::uint64_t>(v >> 64);
    b <<= 64;
    b += static_cast<std::uint64_t>(v);
    return Dyadic(b, 2 * exp);
  }
};

struct ExactOps {
  const std::vector<Point2>* pts = nullptr;

  using dist_t = Dyadic;
  dist_t d2(std::size_t i, std::size_t j) const {
    return dist2((*pts)[i], (*pts)[j]);
  }
  Dyadic d2_dyadic(const dist_t& v) const { return v; }
};

bool flatten(const std::vector<Point2>& pts, FlatOps& out) {
  std::int64_t e = 0;
  bool seen = false;
  for (const Point2& p : pts)
    for (const Dyadic* c : {&p.x, &p.y})
      if (!c->is_zero()) {
        e = seen ? std::min(e, c->exponent()) : c->exponent();
        seen = true;
      }
  out.exp = e;
  out.pts.reserve(pts.size());
  for (const Point2& p : pts) {
    std::array<std::int64_t, 2> q{};
    int k = 0;
    for (const Dyadic* c : {&p.x, &p.y}) {
      if (c->is_zero()) {
        q[k++] = 0;
        continue;
      }
      std::int64_t shift = c->exponent() - e;
      if (shift > 80) return false;
      BigInt m = c->mantissa() << static_cast<unsigned>(shift);
      if (m > std::numeric_limits<std::int64_t>::max() / 4 ||
          m < std::numeric_limits<std::int64_t>::min() / 4)
        return false;
      q[k++] = static_cast<std::int64_t>(m);
    }
    out.pts.push_back(q);
  }
  return true;
}

// candidate edge with the total tie-break order (d2, min index, max index)
template <class D>
struct Cand {
  D d2{};
  std::uint32_t a = 0, b = 0;  // a < b
  bool valid = false;

  bool better_than(const Cand& o) const {
    if (!o.valid) return valid;
    if (!valid) return false;
    if (d2 != o.d2) return d2 < o.d2;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
};

template <class D>
Cand<D> make_cand(D d, std::uint32_t i, std::uint32_t j) {
  Cand<D> c;
  c.d2 = d;
  c.a = std::min(i, j);
  c.b = std::max(i, j);
  c.valid = true;
  return c;
}

// Dense Prim with exact comparisons; O(k^2), for modest inputs.
template <class Ops>
std::vector<std::pair<std::uint32_t, std::uint32_t>> prim_edges(
    const Ops& ops, std::size_t k) {
  using D = typename Ops::dist_t;
  std::vector<char> used(k, 0);
  std::vector<D> best(k);
  std::vector<std::uint32_t> par(k, 0);
  used[0] = 1;
  for (std::size_t j = 1; j < k; ++j) best[j] = ops.d2(0, j);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(k - 1);
  for (std::size_t round = 1; round < k; ++round) {
    Cand<D> pick;
    std::uint32_t pick_j = 0;
    for (std::size_t j = 0; j < k; ++j) {
      if (used[j]) continue;
      Cand<D> c = make_cand(best[j], par[j], static_cast<std::uint32_t>(j));
      if (c.better_than(pick)) {
        pick = c;
        pick_j = static_cast<std::uint32_t>(j);
      }
    }
    used[pick_j] = 1;
    edges.emplace_back(par[pick_j], pick_j);
    for (std::size_t j = 0; j < k; ++j) {
      if (used[j]) continue;
      D d = ops.d2(pick_j, j);
      Cand<D> cur = make_cand(best[j], par[j], static_cast<std::uint32_t>(j));
      Cand<D> alt = make_cand(d, pick_j, static_cast<std::uint32_t>(j));
      if (alt.better_than(cur)) {
        best[j] = d;
        par[j] = pick_j;
      }
    }
  }
  return edges;
}

struct Dsu {
  std::vector<std::uint32_t> parent;
  explicit Dsu(std::size_t n) : parent(n) {
    for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
  }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

// Grid-bucketed Boruvka on int64 coordinates.  Every spanning-tree edge is
// no longer than the longest consecutive-sample gap D (the samples chain the
// components), so each component's minimum outgoing edge lies within the
// 3x3 cell neighborhood once the cell size is >= D.
std::vector<std::pair<std::uint32_t, std::uint32_t>> boruvka_edges(
    const FlatOps& ops) {
  using D = FlatOps::dist_t;
  std::size_t k = ops.pts.size();
  D maxgap = 0;
  for (std::size_t i = 0; i + 1 < k; ++i)
    maxgap = std::max(maxgap, ops.d2(i, i + 1));
  std::int64_t cell = 1;
  {
    long double g = sqrtl(static_cast<long double>(maxgap));
    cell = static_cast<std::int64_t>(g) + 2;
  }
  auto cell_of = [cell](std::int64_t v) {
    return v >= 0 ? v / cell : -((-v + cell - 1) / cell);
  };
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid;
  grid.reserve(k * 2);
  auto key_of = [&](std::int64_t cx, std::int64_t cy) {
    return (static_cast<std::uint64_t>(cx) << 32) ^
           static_cast<std::uint64_t>(static_cast<std::uint32_t>(cy));
  };
  for (std::size_t i = 0; i < k; ++i)
    grid[key_of(cell_of(ops.pts[i][0]), cell_of(ops.pts[i][1]))].push_back(
        static_cast<std::uint32_t>(i));

  Dsu dsu(k);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  edges.reserve(k - 1);
  std::size_t components = k;
  std::unordered_map<std::uint32_t, Cand<D>> best;
  while (components > 1) {
    best.clear();
    for (std::size_t i = 0; i < k; ++i) {
      std::uint32_t ci = dsu.find(static_cast<std::uint32_t>(i));
      Cand<D>& slot = best[ci];
      std::int64_t cx = cell_of(ops.pts[i][0]);
      std::int64_t cy = cell_of(ops.pts[i][1]);
      for (int dx = -1; dx <= 1; ++dx)
        for (int dy = -1; dy <= 1; ++dy) {
          auto it = grid.find(key_of(cx + dx, cy + dy));
          if (it == grid.end()) continue;
          for (std::uint32_t j : it->second) {
            if (dsu.find(j) == ci) continue;
            Cand<D> c =
                make_cand(ops.d2(i, j), static_cast<std::uint32_t>(i), j);
            if (c.better_than(slot)) slot = c;
          }
        }
    }
    std::size_t merged = 0;
    for (auto& [comp, cand] : best) {
      if (!cand.valid) continue;
      if (dsu.find(cand.a) == dsu.find(cand.b)) continue;
      dsu.unite(cand.a, cand.b);
      edges.emplace_back(cand.a, cand.b);
      --components;
      ++merged;
    }
    if (merged == 0 && components > 1) {
      // a component was farther than D from everything in its neighborhood;
      // fall back to one exact pass for it (does not happen for dissection
      // samples, but keeps arbitrary inputs correct)
      std::uint32_t comp = dsu.find(0);
      for (std::size_t i = 0; i < k; ++i)
        if (dsu.find(static_cast<std::uint32_t>(i)) != comp) {
          comp = dsu.find(static_cast<std::uint32_t>(i));
          break;
        }
      Cand<D> pick;
      for (std::size_t i = 0; i < k; ++i) {
        if (dsu.find(static_cast<std::uint32_t>(i)) != comp) continue;
        for (std::size_t j = 0; j < k; ++j) {
          if (dsu.find(static_cast<std::uint32_t>(j)) == comp) continue;
          Cand<D> c = make_cand(ops.d2(i, j), static_cast<std::uint32_t>(i),
                                static_cast<std::uint32_t>(j));
          if (c.better_than(pick)) pick = c;
        }
      }
      if (!pick.valid) fail(ErrorCode::internal, "boruvka: disconnected input");
      dsu.unite(pick.a, pick.b);
      edges.emplace_back(pick.a, pick.b);
      --components;
    }
  }
  return edges;
}

constexpr std::size_t kDensePrimLimit = 2600;

}  // namespace

namespace detail {

WeightedTree emst_with(const SampleSet& s, bool force_dense) {
  if (s.points.empty())
    fail(ErrorCode::precondition, "emst needs at least one point");
  WeightedTree tree;
  tree.nodes.reserve(s.points.size());
  for (const SamplePoint& p : s.points) tree.nodes.push_back(p.x);
  std::size_t k = tree.nodes.size();
  if (k == 1) return tree;

  std::vector<std::pair<std::uint32_t, std::uint32_t>> picked;
  FlatOps flat;
  bool flat_ok = flatten(tree.nodes, flat);
  if (flat_ok && !force_dense) {
    picked = boruvka_edges(flat);
  } else if (flat_ok) {
    picked = prim_edges(flat, k);
  } else {
    ExactOps ops{&tree.nodes};
    picked = prim_edges(ops, k);
  }
  std::int64_t weight_bits = s.r.bits + 8;
  tree.edges.reserve(picked.size());
  for (auto [a, b] : picked)
    tree.edges.push_back(
        {a, b, sqrt_ceil(dist2(tree.nodes[a], tree.nodes[b]), weight_bits)});
  return tree;
}

}  // namespace detail

WeightedTree emst(const SampleSet& s) {
  return detail::emst_with(s, s.points.size() <= kDensePrimLimit);
}

namespace {

// farthest node from start by summed edge weights; ties to the smaller index
struct Sweep {
  std::vector<std::uint32_t> parent;
  std::uint32_t farthest = 0;
  Dyadic dist;
};

Sweep sweep_from(const WeightedTree& t,
                 const std::vector<std::vector<std::uint32_t>>& adj,
                 std::uint32_t start) {
  std::size_t k = t.nodes.size();
  Sweep s;
  s.parent.assign(k, UINT32_MAX);
  std::vector<char> seen(k, 0);
  std::vector<Dyadic> dist(k);
  std::vector<std::uint32_t> stack{start};
  seen[start] = 1;
  s.farthest = start;
  while (!stack.empty()) {
    std::uint32_t u = stack.back();
    stack.pop_back();
    if (dist[u] > s.dist ||
        (dist[u] == s.dist && u < s.farthest)) {
      s.dist = dist[u];
      s.farthest = u;
    }
    for (std::uint32_t ei : adj[u]) {
      const WeightedTree::Edge& e = t.edges[ei];
      std::uint32_t v = e.a == u ? e.b : e.a;
      if (seen[v]) continue;
      seen[v] = 1;
      s.parent[v] = u;
      dist[v] = dist[u] + e.weight;
      stack.push_back(v);
    }
  }
  return s;
}

}  // namespace

Polyline longest_path(const WeightedTree& t) {
  if (t.nodes.empty())
    fail(ErrorCode::precondition, "longest_path on an empty tree");
  Polyline out;
  if (t.nodes.size() == 1) {
    out.vertices.push_back(t.nodes[0]);
    return out;
  }
  std::vector<std::vector<std::uint32_t>> adj(t.nodes.size());
  for (std::size_t i = 0; i < t.edges.size(); ++i) {
    adj[t.edges[i].a].push_back(static_cast<std::uint32_t>(i));
    adj[t.edges[i].b].push_back(static_cast<std::uint32_t>(i));
  }
  Sweep first = sweep_from(t, adj, 0);
  Sweep second = sweep_from(t, adj, first.farthest);
  // path from second.farthest back to first.farthest
  std::vector<std::uint32_t> path;
  for (std::uint32_t v = second.farthest; v != UINT32_MAX; v = second.parent[v])
    path.push_back(v);
  std::reverse(path.begin(), path.end());
  for (std::uint32_t v : path) {
    const Point2& p = t.nodes[v];
    if (!out.vertices.empty() && dist2(out.vertices.back(), p).is_zero())
      continue;  // multiset duplicates contribute nothing
    out.vertices.push_back(p);
  }
  if (out.vertices.empty()) out.vertices.push_back(t.nodes[path.front()]);
  return out;
}

LengthEstimate lower_bound_length(const PointEvaluator& ev,
                                  const ModulusFn& modulus, Precision r) {
  SampleSet s = sample(ev, modulus, r);
  WeightedTree tree = emst(s);
  LengthEstimate est;
  est.r = r;
  est.lmst = longest_path(tree);
  est.lmst_length =
      est.lmst.size() >= 2 ? polyline_length(est.lmst) : Dyadic();
  std::int64_t edge_count =
      est.lmst.size() >= 2 ? static_cast<std::int64_t>(est.lmst.size()) - 1 : 0;
  Dyadic allowance = Dyadic(edge_count).mul_pow2(-kLengthFracBits);
  est.l_r = est.lmst_length - allowance - Dyadic::pow2(-r.bits);
  return est;
}

namespace {

template <class Ops>
typename Ops::dist_t directed_hd2(const Ops& ops, std::size_t a_begin,
                                  std::size_t a_end, std::size_t b_begin,
                                  std::size_t b_end) {
  using D = typename Ops::dist_t;
  D worst{};
  bool first_a = true;
  for (std::size_t i = a_begin; i < a_end; ++i) {
    D best{};
    bool first = true;
    for (std::size_t j = b_begin; j < b_end; ++j) {
      D d = ops.d2(i, j);
      if (first || d < best) {
        best = d;
        first = false;
        if (!first_a && best <= worst) break;  // cannot raise the max
      }
    }
    if (first_a || best > worst) {
      worst = best;
      first_a = false;
    }
  }
  return worst;
}

}  // namespace

Dyadic hausdorff_distance(const std::vector<Point2>& a,
                          const std::vector<Point2>& b) {
  if (a.empty() || b.empty())
    fail(ErrorCode::precondition, "hausdorff_distance of an empty set");
  std::vector<Point2> all;
  all.reserve(a.size() + b.size());
  all.insert(all.end(), a.begin(), a.end());
  all.insert(all.end(), b.begin(), b.end());
  FlatOps flat;
  Dyadic worst2;
  if (flatten(all, flat)) {
    auto d1 = directed_hd2(flat, 0, a.size(), a.size(), all.size());
    auto d2v = directed_hd2(flat, a.size(), all.size(), 0, a.size());
    worst2 = flat.d2_dyadic(std::max(d1, d2v));
  } else {
    ExactOps ops{&all};
    Dyadic d1 = directed_hd2(ops, 0, a.size(), a.size(), all.size());
    Dyadic d2v = directed_hd2(ops, a.size(), all.size(), 0, a.size());
    worst2 = max(d1, d2v);
  }
  return sqrt_ceil(worst2, kLengthFracBits);
}

std::string sample_csv(const SampleSet& s) {
  std::string out = "i,a_i,x,y\n";
  for (const SamplePoint& p : s.points) {
    out += std::to_string(p.index);
    out += ',';
    out += p.a.str(20);
    out += ',';
    out += p.x.x.str(20);
    out += ',';
    out += p.x.y.str(20);
    out += '\n';
  }
  return out;
}

std::string polyline_csv(const Polyline& p) {
  std::string out = "x,y\n";
  for (const Point2& v : p.vertices) {
    out += v.x.str(20);
    out += ',';
    out += v.y.str(20);
    out += '\n';
  }
  return out;
}

std::string estimate_line(const LengthEstimate& e) {
  return std::to_string(e.r.bits) + " " + e.l_r.str(20) + " " +
         e.lmst_length.str(20);
}

}  // namespace retrace
