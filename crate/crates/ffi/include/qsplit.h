#ifndef QSPLIT_H
#define QSPLIT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum QsSide {
  QS_SIDE_LEFT = 0,
  QS_SIDE_RIGHT = 1,
} QsSide;

typedef enum QsStatus {
  QS_STATUS_OK = 0,
  QS_STATUS_NULL_ARGUMENT = 1,
  QS_STATUS_INVALID_UTF8 = 2,
  QS_STATUS_PARSE = 3,
  QS_STATUS_VALIDATION = 4,
  QS_STATUS_INFEASIBLE = 5,
  QS_STATUS_NOT_EQUIVALENT = 6,
  QS_STATUS_PANIC = 7,
} QsStatus;

/**
 * A circuit.
 */
typedef struct QsCircuit QsCircuit;

/**
 * An obfuscated circuit with its insertion record.
 */
typedef struct QsObfuscated QsObfuscated;

/**
 * Two segments and the manifest that joins them.
 */
typedef struct QsSplit QsSplit;

/**
 * Message for the last failed call on this thread, or NULL. The pointer
 * stays valid until the next library call on the same thread.
 */
const char *qs_last_error_message(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void qs_string_free(char *s);

/**
 * Parses OpenQASM 2.0 text.
 *
 * # Safety
 * `qasm` must be a NUL-terminated string; `out` must be writable.
 */
enum QsStatus qs_circuit_from_qasm(const char *qasm, struct QsCircuit **out_circuit);

/**
 * # Safety
 * `circuit` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_circuit_to_qasm(const struct QsCircuit *circuit, char **out_qasm);

/**
 * Qubit count, or 0 for NULL.
 *
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t qs_circuit_num_qubits(const struct QsCircuit *circuit);

/**
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t qs_circuit_gate_count(const struct QsCircuit *circuit);

/**
 * # Safety
 * `circuit` must be NULL or a live handle.
 */
size_t qs_circuit_depth(const struct QsCircuit *circuit);

/**
 * # Safety
 * `circuit` must be NULL or a handle from this library, not yet freed.
 */
void qs_circuit_free(struct QsCircuit *circuit);

/**
 * Inserts a random circuit and its inverse. `policy_json` may be NULL for
 * the default policy.
 *
 * # Safety
 * `circuit` must be a live handle, `policy_json` NULL or a NUL-terminated
 * string, and `out` writable.
 */
enum QsStatus qs_obfuscate(const struct QsCircuit *circuit,
                           const char *policy_json,
                           uint64_t seed,
                           struct QsObfuscated **out_obfuscated);

/**
 * Copy of the obfuscated circuit.
 *
 * # Safety
 * `obfuscated` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_obfuscated_circuit(const struct QsObfuscated *obfuscated,
                                    struct QsCircuit **out_circuit);

/**
 * The insertion record as JSON.
 *
 * # Safety
 * `obfuscated` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_obfuscated_record_json(const struct QsObfuscated *obfuscated, char **out_json);

/**
 * # Safety
 * `obfuscated` must be NULL or a handle from this library, not yet freed.
 */
void qs_obfuscated_free(struct QsObfuscated *obfuscated);

/**
 * Draws an interlocking cut and splits along it.
 *
 * # Safety
 * `obfuscated` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_split(const struct QsObfuscated *obfuscated,
                       uint64_t seed,
                       size_t min_distinct,
                       struct QsSplit **out_split);

/**
 * Copy of one segment.
 *
 * # Safety
 * `split` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_split_segment(const struct QsSplit *split,
                               enum QsSide side,
                               struct QsCircuit **out_circuit);

/**
 * # Safety
 * `split` must be a live handle; `out` must be writable.
 */
enum QsStatus qs_split_manifest_json(const struct QsSplit *split, char **out_json);

/**
 * # Safety
 * `split` must be NULL or a handle from this library, not yet freed.
 */
void qs_split_free(struct QsSplit *split);

/**
 * Joins two uncompiled segments through a manifest.
 *
 * # Safety
 * Handles must be live, `manifest_json` NUL-terminated, `out` writable.
 */
enum QsStatus qs_recombine(const struct QsCircuit *left,
                           const struct QsCircuit *right,
                           const char *manifest_json,
                           struct QsCircuit **out_circuit);

/**
 * Functional comparison within `tol`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum QsStatus qs_equivalent(const struct QsCircuit *a,
                            const struct QsCircuit *b,
                            double tol,
                            uint64_t seed,
                            bool *out_equivalent);

/**
 * Total variation distance between two count files given as JSON.
 *
 * # Safety
 * Strings must be NUL-terminated; `out` must be writable.
 */
enum QsStatus qs_tvd_json(const char *a_json, const char *b_json, double *out_tvd);

/**
 * Exact mapping count as a decimal string. `k` holds `k_len` entries,
 * `k[i-1]` being the number of candidate segments with `i` qubits.
 *
 * # Safety
 * `k` must point to `k_len` readable values (or be NULL with `k_len == 0`);
 * `out` must be writable.
 */
enum QsStatus qs_attack_complexity(size_t n,
                                   size_t n_max,
                                   const uint64_t *k,
                                   size_t k_len,
                                   char **out_decimal);

#endif  /* QSPLIT_H */
