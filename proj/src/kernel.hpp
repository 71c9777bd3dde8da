/* SPDX-License-Identifier: Apache-2.0 */
#pragma once

#include <memory>
#include <mutex>
#include <map>
#include <utility>
#include <vector>

#include "curves.hpp"
#include "enclosure.hpp"
#include "tau.hpp"

namespace retrace {

// --- the elementary acceleration bumps -------------------------------------
//
// phi_{a,b}(t) = ((b-a)/4) sin(2 pi (t-a)/(b-a))         on [a, b]
// xi_{a,b}     = -phi on the left half, +phi on the right half
// psi_{a,b,n}  = one big phi arch up to d_0 = (a+5b)/6, then n xi double
//                lobes on the lattice d_i = d_0 + i (b-a)/(6n)
//
// All take enclosure endpoints with a < b and an enclosure argument t that
// must lie in [a, b] (domain error otherwise).  Results contain the exact
// value; width <= 2^-r for arguments of width <= 2^-(r+2).

Enclosure phi(const Enclosure& a, const Enclosure& b, const Enclosure& t,
              Precision r);
Enclosure xi(const Enclosure& a, const Enclosure& b, const Enclosure& t,
             Precision r);
Enclosure psi(const Enclosure& a, const Enclosure& b, unsigned n,
              const Enclosure& t, Precision r);

// int_a^t phi_{a,b} and its second antiderivative; the closed forms behind
// every velocity/position evaluation:
//   I1 = ((b-a)^2/8pi) (1 - cos(2pi(t-a)/(b-a)))
//   I2 = ((b-a)^2/8pi) ((t-a) - ((b-a)/2pi) sin(2pi(t-a)/(b-a)))
// I2 at t = b equals (b-a)^3/(8 pi).
Enclosure phi_antideriv(const Enclosure& a, const Enclosure& b,
                        const Enclosure& t, Precision r);
Enclosure phi_antideriv2(const Enclosure& a, const Enclosure& b,
                         const Enclosure& t, Precision r);

// --- the breakpoint lattice -------------------------------------------------

// t_{n-1} < t_n^- < d_0 < e_0 < ... < e_{n-1} < t_n < t_n^+ with
// t_n = 1 - e^-n, t_n^- = (t_{n-1}+4 t_n)/5, t_n^+ = (6 t_n - t_{n-1})/5,
// d_i = (t_{n-1}+5 t_n)/6 + i (t_n - t_{n-1})/(6n), e_i = d_i + (t_n-t_{n-1})/(12n).
struct BreakpointLattice {
  unsigned n = 0;
  Enclosure t_prev, t_cur;      // t_{n-1}, t_n
  Enclosure t_minus, t_plus;    // t_n^-, t_n^+
  std::vector<Enclosure> d;     // d_0 .. d_n  (d_n = t_n)
  std::vector<Enclosure> e;     // e_0 .. e_{n-1}
};

BreakpointLattice breakpoints(unsigned n, Precision r);

// s_y(t_n) = (5^3 (e-1)^3 / (6^3 8 pi)) sum_{i<=n} e^-3i, and its n -> inf
// limit s_y(1); the golden closed forms of the vertical component.
Enclosure sy_at_tn(unsigned n, Precision r);
Enclosure sy_limit(Precision r);
// s_x(t_n) = ((e-1)^3 / (1000 pi e^{3n})) 2^-(n+tau(n)), tau read through the
// budgeted coefficient rule at precision r.
Enclosure sx_at_tn(const TauTable& tau, unsigned n, Precision r);
// s_y(t_n) - s_y(e_0^{(n)}) = (e-1)^3 / (12^3 n^3 8 pi e^{3n}).
Enclosure marker_gap(unsigned n, Precision r);

// --- the constructed curve --------------------------------------------------

// Evaluator for the parametrization s of the constructed curve.  Positions,
// velocities and accelerations are assembled from the per-piece closed forms;
// segments beyond the cutoff collapse into the limit point with the geometric
// tail folded into the enclosure.  Immutable and safe to share across threads.
class ConstructedCurve : public PointEvaluator {
 public:
  explicit ConstructedCurve(std::shared_ptr<const TauTable> tau,
                            unsigned segment_cutoff = 64);

  const TauTable& tau() const { return *tau_; }
  unsigned segment_cutoff() const { return cutoff_; }

  // Enclosure-argument forms; the result contains {s(theta) : theta in t}.
  std::pair<Enclosure, Enclosure> position_enc(const Enclosure& t,
                                               Precision r) const;
  std::pair<Enclosure, Enclosure> velocity_enc(const Enclosure& t,
                                               Precision r) const;
  std::pair<Enclosure, Enclosure> accel_enc(const Enclosure& t,
                                            Precision r) const;

  // Total length traversed by s, including retracings:
  // int_0^1 |v|, enclosed to width <= 2^-r.
  Enclosure traversal_length(Precision r) const;

  // H^1 of the pointset: closed-form vertical runs plus certified |v|
  // quadrature over the lateral intervals of the halting segments.  This is
  // a desk-scale surrogate: it reads the step-count table with no budget
  // (which a real machine could not), so it exists exactly because the table
  // is finite configuration.
  Enclosure pointset_length(Precision r) const;

  // PointEvaluator interface.
  std::pair<Enclosure, Enclosure> position(const Dyadic& t,
                                           Precision r) const override;
  int modulus(Precision r) const override {
    return r.bits > 5 ? r.bits - 5 : 0;  // |v| < 2^-5 throughout
  }

  struct Table;  // per-working-precision segment data; internal

 protected:
  const Table& table_for(int wbits) const;

  std::shared_ptr<const TauTable> tau_;
  unsigned cutoff_;

 private:
  Enclosure lateral_speed_integral(const Table& tab, unsigned n,
                                   int tolbits) const;

  mutable std::mutex mu_;
  mutable std::map<int, std::shared_ptr<const Table>> cache_;
};

// The non-retracing surrogate: on every lateral interval (t_n^-, t_n^+) whose
// table entry is infinite, the retraced lobes are replaced by the straight
// vertical segment between s(t_n^-) and s(t_n^+), linearly parametrized.
// Like pointset_length this reads the table unbudgeted; it is a test/demo
// surrogate, not a computable object.
class StraightenedCurve final : public ConstructedCurve {
 public:
  explicit StraightenedCurve(std::shared_ptr<const TauTable> tau,
                             unsigned segment_cutoff = 64);

  std::pair<Enclosure, Enclosure> position(const Dyadic& t,
                                           Precision r) const override;
};

}  // namespace retrace
