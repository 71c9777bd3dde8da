/* SPDX-License-Identifier: Apache-2.0 */
#include "detector.hpp"

#include "error.hpp"

namespace retrace {

int choose_r(unsigned n) {
  // refine the gap until its lower bound is positive
  int probe = 32;
  Enclosure gap = marker_gap(n, Precision(probe));
  while (gap.lo().sign() <= 0) {
    probe *= 2;
    if (probe > 1 << 16)
      fail(ErrorCode::internal, "marker gap would not separate from zero");
    gap = marker_gap(n, Precision(probe));
  }
  int r = 1;
  while (!(Dyadic::pow2(3 - r) < gap.lo())) ++r;
  return r;
}

namespace {

// decide |q - level| < thr; the level enclosure is refined on demand
struct LevelCmp {
  unsigned n;
  int base_bits;
  Enclosure high, low;

  void refine(int bits) {
    high = sy_at_tn(n, Precision(bits));
    low = high - marker_gap(n, Precision(bits));
    base_bits = bits;
  }

  bool against(const Enclosure& level, const Dyadic& q, const Dyadic& thr,
               bool& ambiguous) const {
    Enclosure d = (Enclosure(q) - level).abs();
    if (d.hi() < thr) return true;
    if (d.lo() >= thr) return false;
    ambiguous = true;
    return false;
  }
};

}  // namespace

DetectReport detect(const FunctionOracle& g, const ModulusFn& h,
                    const DetectionParams& p, unsigned n) {
  if (n == 0) fail(ErrorCode::invalid_argument, "detect needs n >= 1");
  if (p.m == 0) fail(ErrorCode::invalid_argument, "detect needs m >= 1");
  DetectReport rep;
  if (n <= p.m) {
    auto it = p.lookup.find(n);
    if (it == p.lookup.end())
      fail(ErrorCode::invalid_argument,
           "lookup table has no answer for n = " + std::to_string(n));
    rep.verdict = it->second ? Verdict::accept : Verdict::reject;
    return rep;
  }

  rep.r = choose_r(n);
  rep.h_r = h(Precision(rep.r));
  if (rep.h_r < 0) rep.h_r = 0;
  if (rep.h_r >= 63)
    fail(ErrorCode::budget, "scan stride 2^-" + std::to_string(rep.h_r) +
                                " is beyond any feasible budget");
  std::uint64_t count = (std::uint64_t{1} << rep.h_r) + 1;
  if (count > p.max_steps)
    fail(ErrorCode::budget,
         "scan needs " + std::to_string(count) + " probes, budget is " +
             std::to_string(p.max_steps));

  LevelCmp levels{n, 0, {}, {}};
  levels.refine(rep.r + 16);
  rep.level_high = levels.high;
  rep.level_low = levels.low;

  Dyadic thr = Dyadic::pow2(1 - rep.r);
  Precision query_prec(rep.r);

  // greedy alternating-subsequence match: high at even positions, low at
  // odd, m+1 marks, first index strictly positive
  unsigned matched = 0;
  bool need_high = true;
  for (std::uint64_t j = 0; j < count; ++j) {
    Dyadic tau_j(BigInt(j), -rep.h_r);
    Dyadic q = g.query(tau_j, query_prec);
    bool ambiguous = false;
    bool is_high = false, is_low = false;
    for (;;) {
      ambiguous = false;
      is_high = levels.against(levels.high, q, thr, ambiguous);
      is_low = levels.against(levels.low, q, thr, ambiguous);
      if (!ambiguous) break;
      if (levels.base_bits > rep.r + 140)
        fail(ErrorCode::internal, "marker comparison would not resolve");
      levels.refine(levels.base_bits + 40);
    }
    if (is_high && is_low) rep.double_marked = true;
    if (p.collect_marks) rep.marks.push_back({j, q, is_high, is_low});
    if (j > 0 && matched <= p.m) {
      if (need_high && is_high) {
        ++matched;
        need_high = false;
      } else if (!need_high && is_low) {
        ++matched;
        need_high = true;
      }
    }
    if (matched > p.m && !p.collect_marks) break;
  }
  rep.probes = count;
  rep.verdict = matched > p.m ? Verdict::accept : Verdict::reject;
  return rep;
}

}  // namespace retrace
