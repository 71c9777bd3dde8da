/* SPDX-License-Identifier: Apache-2.0 */
/*
 * retrace: rigorous evaluation and length analysis of a plane curve whose
 * computable parametrizations are forced to retrace.
 *
 * All objects are opaque handles; every fallible call returns an rt_status
 * and leaves a human-readable message in rt_last_error() (thread-local).
 * Numeric results are rendered as decimal strings tagged with their width
 * bound ("0.0061206 ± 2^-20"): the library computes with certified dyadic
 * enclosures, not doubles.
 */
#ifndef RETRACE_H
#define RETRACE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rt_status {
  RT_OK = 0,
  RT_ERR_INVALID_ARGUMENT = 1,
  RT_ERR_DOMAIN = 2,
  RT_ERR_PRECONDITION = 3,
  RT_ERR_BUDGET = 4,
  RT_ERR_AMBIGUOUS = 5,
  RT_ERR_IO = 6,
  RT_ERR_INTERNAL = 7,
  RT_ERR_BUFFER_TOO_SMALL = 8
} rt_status;

/* step count for "never halts" */
#define RT_TAU_INFINITE (-1)

typedef struct rt_tau_table rt_tau_table;
typedef struct rt_curve rt_curve;

/* ---- step-count tables ---------------------------------------------- */

rt_tau_table* rt_tau_table_new(void);
void rt_tau_table_free(rt_tau_table* table);

/* steps >= 1, or RT_TAU_INFINITE */
rt_status rt_tau_table_set(rt_tau_table* table, uint64_t n, int64_t steps);
rt_status rt_tau_table_set_default(rt_tau_table* table, int64_t steps);

/* text format: one "<n> <steps|inf>" per line, "default <steps|inf>",
 * '#' comments */
rt_status rt_tau_table_load(rt_tau_table* table, const char* path);

/* attach a Turing machine program file as machine n (see README for the
 * transition format); it overrides the table entry for n */
rt_status rt_tau_table_attach_program(rt_tau_table* table, uint64_t n,
                                      const char* path);

/* run machine n with a step budget: *halted = 1 and *steps = tau(n) when it
 * accepts within the budget, else *halted = 0 and *steps = budget */
rt_status rt_tau_query(const rt_tau_table* table, uint64_t n, uint64_t budget,
                       int* halted, uint64_t* steps);

/* ---- curves ----------------------------------------------------------- */

/* "segment" | "halfcircle" | "triangle-wave" */
rt_curve* rt_curve_new_builtin(const char* name);

/* the constructed curve, driven by the table; segment_cutoff 0 = default */
rt_curve* rt_curve_new_constructed(const rt_tau_table* table,
                                   unsigned segment_cutoff);

/* its non-retracing surrogate (lobes of never-halting segments replaced by
 * straight vertical runs; table is read unbudgeted) */
rt_curve* rt_curve_new_straightened(const rt_tau_table* table,
                                    unsigned segment_cutoff);

void rt_curve_free(rt_curve* curve);

/* position enclosure at parameter t (decimal or binary "0b0.01" literal,
 * must be exactly dyadic); writes "x ± 2^-r, y ± 2^-r" */
rt_status rt_curve_eval(const rt_curve* curve, const char* t, int precision,
                        char* buf, size_t cap);

/* sink receives chunks of the trace; return nonzero from it to abort */
typedef int (*rt_write_fn)(void* ctx, const char* data, size_t len);

/* samples >= 2 positions at uniform parameters; format "csv" or "svg" */
rt_status rt_curve_trace(const rt_curve* curve, int samples, int precision,
                         const char* format, rt_write_fn sink, void* ctx);

/* one row "r l_r length(LMST)" of the lower-bound table */
rt_status rt_length_estimate(const rt_curve* curve, int precision, char* buf,
                             size_t cap);

/* total traversed length of the parametrization, retracings included
 * (constructed/straightened curves only) */
rt_status rt_traversal_length(const rt_curve* curve, int precision, char* buf,
                              size_t cap);

/* marker-scan decision for segment n against bound m, probing the curve's
 * vertical component.  stride_bits > 0 fixes the scan stride to 2^-stride_bits
 * (coarse modulus); 0 uses the curve's own modulus.  *verdict: 1 accept,
 * 0 reject.  Budget overrun returns RT_ERR_BUDGET. */
rt_status rt_detect(const rt_curve* curve, const rt_tau_table* table,
                    unsigned n, unsigned m, int stride_bits,
                    uint64_t max_steps, int* verdict);

/* point of the constant-speed parametrization at fraction x, within 2^-k;
 * writes "x ± 2^-k, y ± 2^-k" */
rt_status rt_reparam_point(const rt_curve* curve, int k, const char* x,
                           char* buf, size_t cap);

/* message for the most recent failure on this thread */
const char* rt_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* RETRACE_H */
