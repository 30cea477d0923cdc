#ifndef SYMFLAT_H
#define SYMFLAT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SymflatCase {
  SYMFLAT_CASE_R_EXTENSION = 0,
  SYMFLAT_CASE_S1_EXTENSION = 1,
  SYMFLAT_CASE_FLAT_ONLY = 2,
} SymflatCase;

typedef enum SymflatFunctional {
  SYMFLAT_FUNCTIONAL_YM = 0,
  SYMFLAT_FUNCTIONAL_PYM = 1,
  SYMFLAT_FUNCTIONAL_PHI = 2,
  SYMFLAT_FUNCTIONAL_CONE = 3,
} SymflatFunctional;

// Result code of every fallible call.
typedef enum SymflatStatus {
  SYMFLAT_STATUS_OK = 0,
  SYMFLAT_STATUS_NULL_POINTER = 1,
  SYMFLAT_STATUS_INVALID_ARGUMENT = 2,
  // Degree, algebra or domain mismatch, or an operation unsupported on the domain.
  SYMFLAT_STATUS_DOMAIN_ERROR = 3,
  // Non-convergence, non-finite values or step-size underflow.
  SYMFLAT_STATUS_NUMERICAL_ERROR = 4,
  SYMFLAT_STATUS_INVARIANT_VIOLATION = 5,
  SYMFLAT_STATUS_IO = 6,
  SYMFLAT_STATUS_PANIC = 7,
} SymflatStatus;

// A preset or scene instance: connection, metric and cone field.
typedef struct SymflatInstance SymflatInstance;

typedef struct SymflatReport SymflatReport;

typedef struct SymflatTrace SymflatTrace;

// Value of a functional and the sup norms of its Euler-Lagrange residuals.
// `residual_count` is 1 or 2; unused entries are 0.
typedef struct SymflatFunctionalValue {
  double value;
  double residuals[2];
  uint32_t residual_count;
  bool critical;
} SymflatFunctionalValue;

typedef struct SymflatFlowRecord {
  uint64_t step;
  double time;
  double value_ym;
  double value_pym;
  double value_phi;
  double value;
  double residual;
} SymflatFlowRecord;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call into the library on this thread.
const char *symflat_last_error(void);

// Library version as a static NUL-terminated string.
const char *symflat_version(void);

// Release a string returned by the library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void symflat_string_free(char *s);

// Build a preset such as `"constant_flux(0.5)"`. `resolution` 0 keeps the default.
//
// # Safety
// `preset` must be a NUL-terminated string; `out` must be writable.
enum SymflatStatus symflat_instance_from_preset(const char *preset,
                                                size_t resolution,
                                                struct SymflatInstance **out);

// Build an instance from the text of a JSON scene.
//
// # Safety
// `json` must be a NUL-terminated string; `out` must be writable.
enum SymflatStatus symflat_instance_from_scene(const char *json, struct SymflatInstance **out);

// # Safety
// `inst` must come from this library and not have been freed. Null is ignored.
void symflat_instance_free(struct SymflatInstance *inst);

// Dimension and number of samples of the instance's domain.
//
// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_instance_shape(const struct SymflatInstance *inst,
                                          size_t *dim,
                                          size_t *points);

// Evaluate a functional; the cone functional uses the scene's `B`.
//
// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_eval(const struct SymflatInstance *inst,
                                enum SymflatFunctional kind,
                                double tolerance,
                                struct SymflatFunctionalValue *result);

// `‖F‖², ‖F_p‖², ‖Φω‖²` and the relative defect of their sum, written to `out[0..4]`.
//
// # Safety
// `values` must point to 4 writable doubles.
enum SymflatStatus symflat_pythagoras(const struct SymflatInstance *inst,
                                      double *values);

// Run a gradient flow. `step <= 0` picks the default step.
//
// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_flow(const struct SymflatInstance *inst,
                                enum SymflatFunctional kind,
                                size_t max_steps,
                                double step,
                                double tolerance,
                                struct SymflatTrace **trace);

// Number of records, accepted steps and whether the flow reached its tolerance.
//
// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_trace_summary(const struct SymflatTrace *trace,
                                         size_t *records,
                                         size_t *steps,
                                         bool *converged);

// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_trace_record(const struct SymflatTrace *trace,
                                        size_t index,
                                        struct SymflatFlowRecord *record);

// Write the trace as CSV with header `time,value_ym,value_pym,value_phi,residual`.
//
// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_trace_write_csv(const struct SymflatTrace *trace, const char *path);

// # Safety
// `trace` must come from this library and not have been freed. Null is ignored.
void symflat_trace_free(struct SymflatTrace *trace);

// Classify `U(1)` bundles over T⁴ for `ζ = c₁dx¹² + c₂dx³⁴`. The coefficients
// are rationals such as `"3/4"`; a null `c2` declares `c₁/c₂` irrational.
//
// # Safety
// `c1` must be a NUL-terminated string, `c2` one or null; `report` must be writable.
enum SymflatStatus symflat_classify(const char *c1, const char *c2, struct SymflatReport **report);

// # Safety
// Pointers must be valid.
enum SymflatStatus symflat_report_case(const struct SymflatReport *report, enum SymflatCase *case_);

// The report as JSON; `*c0` receives the exact rational `c₀` or null.
// Both strings are released with [`symflat_string_free`].
//
// # Safety
// Pointers must be valid; `c0` may be null.
enum SymflatStatus symflat_report_json(const struct SymflatReport *report, char **json, char **c0);

// # Safety
// `report` must come from this library and not have been freed. Null is ignored.
void symflat_report_free(struct SymflatReport *report);

// Run a verification suite (`"all"`, `"t4"`, `"bpst"`, `"cone"`, `"classify"`,
// `"cs"`). `*all_pass` is 1 when every check passes; `*json` receives the rows.
//
// # Safety
// Pointers must be valid; `json` may be null.
enum SymflatStatus symflat_verify(const char *suite, size_t resolution, int *all_pass, char **json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SYMFLAT_H */
