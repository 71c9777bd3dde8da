/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

// Shared helpers for the unit and acceptance suites (test-only code).

#include <vector>

#include "geometry.hpp"

namespace retrace::testsupport {

// Exhaustive minimum-spanning-tree weight over all Pruefer-coded trees,
// using the same rounded edge weights as the production algorithms.
inline Dyadic brute_force_mst(const std::vector<Point2>& pts,
                              std::int64_t wbits) {
  std::size_t n = pts.size();
  std::vector<std::vector<Dyadic>> w(n, std::vector<Dyadic>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      w[i][j] = sqrt_ceil(dist2(pts[i], pts[j]), wbits);
  if (n <= 1) return Dyadic(0);
  if (n == 2) return w[0][1];
  std::vector<std::size_t> code(n - 2, 0);
  Dyadic best;
  bool first = true;
  for (;;) {
    std::vector<int> degree(n, 1);
    for (std::size_t c : code) ++degree[c];
    Dyadic total;
    std::vector<char> used(n, 0);
    for (std::size_t it = 0; it < n - 2; ++it) {
      std::size_t leaf = n;
      for (std::size_t v = 0; v < n; ++v)
        if (degree[v] == 1 && !used[v]) {
          leaf = v;
          break;
        }
      total += w[leaf][code[it]];
      used[leaf] = 1;
      --degree[code[it]];
    }
    std::size_t u = n, v = n;
    for (std::size_t x = 0; x < n; ++x)
      if (!used[x] && degree[x] == 1) {
        if (u == n) u = x;
        else v = x;
      }
    total += w[u][v];
    if (first || total < best) {
      best = total;
      first = false;
    }
    std::size_t pos = 0;
    while (pos < code.size() && code[pos] + 1 == n) code[pos++] = 0;
    if (pos == code.size()) break;
    ++code[pos];
  }
  return best;
}

}  // namespace retrace::testsupport
