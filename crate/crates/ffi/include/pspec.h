#ifndef PSPEC_H
#define PSPEC_H

/* Generated by cbindgen from pspec-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible entry point.
typedef enum PspecStatus {
  PSPEC_STATUS_OK = 0,
  PSPEC_STATUS_PARSE_ERROR = 1,
  PSPEC_STATUS_VALIDATION_ERROR = 2,
  PSPEC_STATUS_UNKNOWN_NAME = 3,
  PSPEC_STATUS_COMPOSE_ERROR = 4,
  PSPEC_STATUS_SIM_ERROR = 5,
  PSPEC_STATUS_ANALYSIS_ERROR = 6,
  PSPEC_STATUS_INVALID_ARGUMENT = 7,
} PspecStatus;

// Opaque handle to a parsed specification document.
typedef struct PspecDocument PspecDocument;

// Opaque handle to a recorded simulation trace.
typedef struct PspecTrace PspecTrace;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message describing the most recent failure on this thread. The pointer
// stays valid until the next failing call on the same thread.
const char *pspec_last_error(void);

// Release a string returned by this library.
//
// # Safety
// `s` must be a pointer previously returned through one of this library's
// out-parameters, not yet freed, or null.
void pspec_string_free(char *s);

// Parse a `.pspec` document from UTF-8 source text.
//
// # Safety
// `source` must point to a NUL-terminated string and `out` to a writable
// pointer slot. On success the slot holds a document that must be released
// with `pspec_document_free`.
enum PspecStatus pspec_parse(const char *source, struct PspecDocument **out);

// # Safety
// `doc` must come from `pspec_parse` and not have been freed.
void pspec_document_free(struct PspecDocument *doc);

// Validate every process in the document. Writes a JSON array of
// diagnostic strings; the array is empty when the document is well-formed.
//
// # Safety
// `doc` must be a live document handle; `diagnostics_json` must be a
// writable pointer slot.
enum PspecStatus pspec_check(const struct PspecDocument *doc, char **diagnostics_json);

// Render the document back to canonical `.pspec` text.
//
// # Safety
// `doc` must be a live document handle; `out` a writable pointer slot.
enum PspecStatus pspec_print(const struct PspecDocument *doc, char **out);

// Simulate a named composition under a named env for `horizon` ticks.
// Assumption violations do not fail the call; they are visible in the
// trace exports.
//
// # Safety
// `doc` must be a live document handle, the strings NUL-terminated, and
// `out` a writable slot. On success the slot holds a trace that must be
// released with `pspec_trace_free`.
enum PspecStatus pspec_simulate(const struct PspecDocument *doc,
                                const char *compose,
                                const char *env,
                                uint64_t horizon,
                                struct PspecTrace **out);

// # Safety
// `trace` must come from `pspec_simulate` and not have been freed.
void pspec_trace_free(struct PspecTrace *trace);

// Structured JSON export of a trace.
//
// # Safety
// `trace` must be a live trace handle; `out` a writable pointer slot.
enum PspecStatus pspec_trace_to_json(const struct PspecTrace *trace, char **out);

// Line-oriented text export of a trace.
//
// # Safety
// `trace` must be a live trace handle; `out` a writable pointer slot.
enum PspecStatus pspec_trace_to_text(const struct PspecTrace *trace, char **out);

// Compositional wcet bound of a named composition, from declared
// per-process bounds. When `measured_connector_cost` is true, connector
// costs are measured instead of taken as zero. `derivation` may be null;
// otherwise it receives the rendered derivation tree.
//
// # Safety
// `doc` must be a live document handle, `compose` NUL-terminated,
// `out_bound` writable, `derivation` writable or null.
enum PspecStatus pspec_wcet(const struct PspecDocument *doc,
                            const char *compose,
                            bool measured_connector_cost,
                            uint64_t *out_bound,
                            char **derivation);

// DOT rendering of a compiled composition.
//
// # Safety
// Same contract as `pspec_export_pnml`.
enum PspecStatus pspec_export_dot(const struct PspecDocument *doc, const char *compose, char **out);

// PNML rendering of the control-flow skeleton.
//
// # Safety
// `doc` must be a live document handle, `compose` NUL-terminated, `out` a
// writable pointer slot.
enum PspecStatus pspec_export_pnml(const struct PspecDocument *doc,
                                   const char *compose,
                                   char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PSPEC_H */
