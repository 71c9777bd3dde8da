/* SPDX-License-Identifier: Apache-2.0 */
#include "retrace/retrace.h"

#include <cstring>
#include <memory>
#include <string>

#include "detector.hpp"
#include "error.hpp"
#include "estimator.hpp"
#include "kernel.hpp"
#include "reparam.hpp"

using namespace retrace;

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

rt_status map_code(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument: return RT_ERR_INVALID_ARGUMENT;
    case ErrorCode::domain: return RT_ERR_DOMAIN;
    case ErrorCode::precondition: return RT_ERR_PRECONDITION;
    case ErrorCode::budget: return RT_ERR_BUDGET;
    case ErrorCode::ambiguous: return RT_ERR_AMBIGUOUS;
    case ErrorCode::io: return RT_ERR_IO;
    case ErrorCode::internal: return RT_ERR_INTERNAL;
  }
  return RT_ERR_INTERNAL;
}

template <class F>
rt_status guarded(F&& f) noexcept {
  try {
    return f();
  } catch (const Error& e) {
    set_error(e.what());
    return map_code(e.code());
  } catch (const std::exception& e) {
    set_error(e.what());
    return RT_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown failure");
    return RT_ERR_INTERNAL;
  }
}

rt_status put(const std::string& s, char* buf, size_t cap) {
  if (!buf) {
    set_error("null output buffer");
    return RT_ERR_INVALID_ARGUMENT;
  }
  if (s.size() + 1 > cap) {
    set_error("output needs " + std::to_string(s.size() + 1) + " bytes");
    return RT_ERR_BUFFER_TOO_SMALL;
  }
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return RT_OK;
}

StepCount step_count_of(int64_t steps) {
  if (steps == RT_TAU_INFINITE) return StepCount::infinite();
  if (steps < 1)
    fail(ErrorCode::invalid_argument, "steps must be >= 1 or RT_TAU_INFINITE");
  return StepCount::finite(static_cast<std::uint64_t>(steps));
}

}  // namespace

struct rt_tau_table {
  TauTable table;
};

struct rt_curve {
  enum class Kind { builtin, constructed, straightened } kind;
  std::shared_ptr<PointEvaluator> ev;
  std::shared_ptr<const TauTable> tau;  // constructed/straightened only
  std::string name;

  const ConstructedCurve* constructed() const {
    return dynamic_cast<const ConstructedCurve*>(ev.get());
  }
};

rt_tau_table* rt_tau_table_new(void) { return new rt_tau_table(); }

void rt_tau_table_free(rt_tau_table* table) { delete table; }

rt_status rt_tau_table_set(rt_tau_table* table, uint64_t n, int64_t steps) {
  return guarded([&] {
    if (!table) fail(ErrorCode::invalid_argument, "null table");
    table->table.set(n, step_count_of(steps));
    return RT_OK;
  });
}

rt_status rt_tau_table_set_default(rt_tau_table* table, int64_t steps) {
  return guarded([&] {
    if (!table) fail(ErrorCode::invalid_argument, "null table");
    table->table.set_default(step_count_of(steps));
    return RT_OK;
  });
}

rt_status rt_tau_table_load(rt_tau_table* table, const char* path) {
  return guarded([&] {
    if (!table || !path) fail(ErrorCode::invalid_argument, "null argument");
    table->table = TauTable::load(path);
    return RT_OK;
  });
}

rt_status rt_tau_table_attach_program(rt_tau_table* table, uint64_t n,
                                      const char* path) {
  return guarded([&] {
    if (!table || !path) fail(ErrorCode::invalid_argument, "null argument");
    table->table.attach_program(
        n, std::make_shared<const MachineProgram>(MachineProgram::load(path)));
    return RT_OK;
  });
}

rt_status rt_tau_query(const rt_tau_table* table, uint64_t n, uint64_t budget,
                       int* halted, uint64_t* steps) {
  return guarded([&] {
    if (!table || !halted || !steps)
      fail(ErrorCode::invalid_argument, "null argument");
    BudgetedResult r = table->table.query_budgeted(n, budget);
    *halted = r.halted ? 1 : 0;
    *steps = r.value;
    return RT_OK;
  });
}

rt_curve* rt_curve_new_builtin(const char* name) {
  rt_curve* out = nullptr;
  guarded([&] {
    if (!name) fail(ErrorCode::invalid_argument, "null name");
    std::string id(name);
    std::shared_ptr<PointEvaluator> ev;
    if (id == "segment") ev = std::make_shared<SegmentCurve>();
    else if (id == "halfcircle") ev = std::make_shared<HalfCircleCurve>();
    else if (id == "triangle-wave") ev = std::make_shared<TriangleWaveCurve>();
    else
      fail(ErrorCode::invalid_argument,
           "unknown builtin curve '" + id +
               "' (segment | halfcircle | triangle-wave)");
    out = new rt_curve{rt_curve::Kind::builtin, std::move(ev), nullptr, id};
    return RT_OK;
  });
  return out;
}

namespace {

rt_curve* new_constructed_impl(const rt_tau_table* table,
                               unsigned segment_cutoff, bool straightened) {
  rt_curve* out = nullptr;
  guarded([&] {
    if (!table) fail(ErrorCode::invalid_argument, "null table");
    auto tau = std::make_shared<const TauTable>(table->table);
    unsigned cutoff = segment_cutoff == 0 ? 64 : segment_cutoff;
    std::shared_ptr<PointEvaluator> ev;
    if (straightened)
      ev = std::make_shared<StraightenedCurve>(tau, cutoff);
    else
      ev = std::make_shared<ConstructedCurve>(tau, cutoff);
    out = new rt_curve{straightened ? rt_curve::Kind::straightened
                                    : rt_curve::Kind::constructed,
                       std::move(ev), tau,
                       straightened ? "straightened" : "constructed"};
    return RT_OK;
  });
  return out;
}

}  // namespace

rt_curve* rt_curve_new_constructed(const rt_tau_table* table,
                                   unsigned segment_cutoff) {
  return new_constructed_impl(table, segment_cutoff, false);
}

rt_curve* rt_curve_new_straightened(const rt_tau_table* table,
                                    unsigned segment_cutoff) {
  return new_constructed_impl(table, segment_cutoff, true);
}

void rt_curve_free(rt_curve* curve) { delete curve; }

rt_status rt_curve_eval(const rt_curve* curve, const char* t, int precision,
                        char* buf, size_t cap) {
  return guarded([&] {
    if (!curve || !t) fail(ErrorCode::invalid_argument, "null argument");
    if (precision < 1) fail(ErrorCode::invalid_argument, "precision >= 1");
    Dyadic td = Dyadic::parse(t);
    Precision r(precision);
    auto [x, y] = curve->ev->position(td, r);
    return put(x.str(r) + ", " + y.str(r), buf, cap);
  });
}

namespace {

void sink_write(rt_write_fn sink, void* ctx, const std::string& s) {
  if (sink(ctx, s.data(), s.size()) != 0)
    fail(ErrorCode::io, "trace sink aborted");
}

std::string svg_of(const std::vector<std::pair<Dyadic, Dyadic>>& pts,
                   int digits) {
  // data coordinates with y negated so the curve renders upright
  Dyadic minx, maxx, miny, maxy;
  bool first = true;
  for (const auto& [x, y] : pts) {
    Dyadic ny = -y;
    if (first) {
      minx = maxx = x;
      miny = maxy = ny;
      first = false;
    } else {
      minx = min(minx, x);
      maxx = max(maxx, x);
      miny = min(miny, ny);
      maxy = max(maxy, ny);
    }
  }
  Dyadic w = maxx - minx, h = maxy - miny;
  Dyadic pad = max(w, h).mul_pow2(-5);
  if (pad.is_zero()) pad = Dyadic(1, -10);
  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"";
  out += (minx - pad).str(digits) + " " + (miny - pad).str(digits) + " " +
         (w + pad.mul_pow2(1)).str(digits) + " " +
         (h + pad.mul_pow2(1)).str(digits) + "\">\n<path fill=\"none\" "
         "stroke=\"black\" stroke-width=\"" +
         pad.mul_pow2(-3).str(digits) + "\" d=\"";
  bool head = true;
  for (const auto& [x, y] : pts) {
    out += head ? "M " : " L ";
    out += x.str(digits) + " " + (-y).str(digits);
    head = false;
  }
  out += "\"/>\n</svg>\n";
  return out;
}

}  // namespace

rt_status rt_curve_trace(const rt_curve* curve, int samples, int precision,
                         const char* format, rt_write_fn sink, void* ctx) {
  return guarded([&] {
    if (!curve || !format || !sink)
      fail(ErrorCode::invalid_argument, "null argument");
    if (samples < 2) fail(ErrorCode::invalid_argument, "samples >= 2");
    if (precision < 1) fail(ErrorCode::invalid_argument, "precision >= 1");
    std::string fmt(format);
    if (fmt != "csv" && fmt != "svg")
      fail(ErrorCode::invalid_argument, "format must be csv or svg");
    int digits = static_cast<int>(precision * 0.302) + 2;
    std::vector<std::pair<Dyadic, Dyadic>> pts;
    pts.reserve(samples);
    Precision r(precision);
    for (int i = 0; i < samples; ++i) {
      // t_i = i/(samples-1), evaluated at the nearest dyadic grid point
      Dyadic t = div_floor(Dyadic(i), Dyadic(samples - 1), precision + 16);
      if (t > Dyadic(1)) t = Dyadic(1);
      auto [x, y] = curve->ev->position(t, r);
      pts.emplace_back(x.midpoint(precision + 8), y.midpoint(precision + 8));
    }
    if (fmt == "csv") {
      sink_write(sink, ctx, "i,t,x,y\n");
      for (int i = 0; i < samples; ++i) {
        Dyadic t = div_floor(Dyadic(i), Dyadic(samples - 1), precision + 16);
        sink_write(sink, ctx,
                   std::to_string(i) + "," + t.str(digits) + "," +
                       pts[i].first.str(digits) + "," +
                       pts[i].second.str(digits) + "\n");
      }
    } else {
      sink_write(sink, ctx, svg_of(pts, digits));
    }
    return RT_OK;
  });
}

rt_status rt_length_estimate(const rt_curve* curve, int precision, char* buf,
                             size_t cap) {
  return guarded([&] {
    if (!curve) fail(ErrorCode::invalid_argument, "null curve");
    if (precision < 1) fail(ErrorCode::invalid_argument, "precision >= 1");
    LengthEstimate est = lower_bound_length(
        *curve->ev, modulus_of(*curve->ev), Precision(precision));
    return put(estimate_line(est), buf, cap);
  });
}

rt_status rt_traversal_length(const rt_curve* curve, int precision, char* buf,
                              size_t cap) {
  return guarded([&] {
    if (!curve) fail(ErrorCode::invalid_argument, "null curve");
    const ConstructedCurve* c = curve->constructed();
    if (!c)
      fail(ErrorCode::invalid_argument,
           "traversal length is defined for the constructed curve");
    Precision r(precision);
    return put(c->traversal_length(r).str(r), buf, cap);
  });
}

rt_status rt_detect(const rt_curve* curve, const rt_tau_table* table,
                    unsigned n, unsigned m, int stride_bits,
                    uint64_t max_steps, int* verdict) {
  return guarded([&] {
    if (!curve || !table || !verdict)
      fail(ErrorCode::invalid_argument, "null argument");
    DetectionParams params;
    params.m = m;
    if (max_steps > 0) params.max_steps = max_steps;
    for (unsigned i = 1; i <= m; ++i)
      params.lookup[i] = table->table.query_budgeted(i, 1u << 20).halted;
    VerticalOracle oracle(*curve->ev);
    ModulusFn h;
    if (stride_bits > 0)
      h = [stride_bits](Precision) { return stride_bits; };
    else
      h = modulus_of(*curve->ev);
    DetectReport rep = detect(oracle, h, params, n);
    *verdict = rep.verdict == Verdict::accept ? 1 : 0;
    return RT_OK;
  });
}

rt_status rt_reparam_point(const rt_curve* curve, int k, const char* x,
                           char* buf, size_t cap) {
  return guarded([&] {
    if (!curve || !x) fail(ErrorCode::invalid_argument, "null argument");
    if (k < 1) fail(ErrorCode::invalid_argument, "k >= 1");
    Dyadic xd = Dyadic::parse(x);
    Precision kp(k);

    std::unique_ptr<LengthOracle> oracle;
    Point2 hint0, hint1;
    if (curve->kind == rt_curve::Kind::builtin) {
      if (curve->name == "halfcircle") {
        oracle = std::make_unique<EnclosureLengthOracle>(
            enc_pi(Precision(k + 24)));
        hint0 = Point2{Dyadic(1), Dyadic()};
        hint1 = Point2{Dyadic(-1), Dyadic()};
      } else {
        oracle = std::make_unique<EnclosureLengthOracle>(
            Enclosure(Dyadic(1)));
        hint0 = Point2{Dyadic(), Dyadic()};
        hint1 = Point2{Dyadic(1), Dyadic()};
      }
    } else {
      const ConstructedCurve* c = curve->constructed();
      oracle = std::make_unique<EnclosureLengthOracle>(
          c->pointset_length(Precision(k + 12)));
      hint0 = Point2{Dyadic(), Dyadic()};
      hint1 = Point2{Dyadic(), sy_limit(Precision(k + 16)).midpoint(k + 16)};
    }
    ReparamResult res = constant_speed_point(
        *curve->ev, modulus_of(*curve->ev), *oracle, hint0, hint1, kp, xd);
    Precision r(k);
    return put(Enclosure(res.point.x).str(r) + ", " +
                   Enclosure(res.point.y).str(r),
               buf, cap);
  });
}

const char* rt_last_error(void) { return g_last_error.c_str(); }
