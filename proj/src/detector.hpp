/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "estimator.hpp"
#include "kernel.hpp"

namespace retrace {

// Oracle access to a scalar function g on [0, 1]: |query(q, r) - g(q)| <= 2^-r.
class FunctionOracle {
 public:
  virtual ~FunctionOracle() = default;
  virtual Dyadic query(const Dyadic& q, Precision r) const = 0;
};

// The vertical component of a parametrization, as an oracle.
class VerticalOracle final : public FunctionOracle {
 public:
  explicit VerticalOracle(const PointEvaluator& ev) : ev_(ev) {}
  Dyadic query(const Dyadic& q, Precision r) const override {
    return ev_.position(q, Precision(r.bits + 2)).second.midpoint(r.bits + 2);
  }

 private:
  const PointEvaluator& ev_;
};

struct DetectionParams {
  unsigned m = 1;                    // retracing bound being tested
  std::map<unsigned, bool> lookup;   // table answers for n <= m
  std::uint64_t max_steps = std::uint64_t{1} << 22;  // scan budget
  bool collect_marks = false;        // keep the full mark list for diagnostics
};

enum class Verdict { accept, reject };

struct ScanMark {
  std::uint64_t j = 0;
  Dyadic value;  // oracle answer at tau_j
  bool high = false, low = false;
};

struct DetectReport {
  Verdict verdict = Verdict::reject;
  int r = 0;       // probe precision chosen from the marker gap
  int h_r = 0;     // modulus value: scan stride 2^-h_r
  std::uint64_t probes = 0;
  Enclosure level_high;  // s_y(t_n)
  Enclosure level_low;   // s_y(e_0^{(n)})
  bool double_marked = false;          // a probe both high and low (never, by
                                       // the choice of r)
  std::vector<ScanMark> marks;         // filled when collect_marks
};

// Least r with 2^(3-r) strictly below s_y(t_n) - s_y(e_0^{(n)}).
int choose_r(unsigned n);

// The marker-scan decision procedure: probe g on the stride-2^-h(r) grid,
// mark probes high/low against the two marker levels, and accept iff some
// alternating high/low subsequence of length m+1 starts (high) at a positive
// index.  For n <= m the finite lookup table answers directly.
//
// When g is the vertical component of a parametrization of the constructed
// curve without m-fold retracing and h is a modulus for it, this decides
// n's membership in the halting set; the desk-scale tests drive exactly that
// scenario.  Exceeding max_steps raises a budget error that reports the
// required probe count.
DetectReport detect(const FunctionOracle& g, const ModulusFn& h,
                    const DetectionParams& p, unsigned n);

}  // namespace retrace
