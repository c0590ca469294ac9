#ifndef MODAL_LIFT_H
#define MODAL_LIFT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Append counters to the report.
 */
#define MODAL_FLAG_STATS 1

/**
 * Validate every intermediate modal value.
 */
#define MODAL_FLAG_CHECK_INVARIANTS 2

/**
 * Repair inverted ranges instead of rejecting them.
 */
#define MODAL_FLAG_SWAP_EMPTY 4

typedef enum ModalMode {
  MODAL_MODE_PLAIN = 0,
  MODAL_MODE_SHALLOW = 1,
  MODAL_MODE_DEEP = 2,
  MODAL_MODE_ORACLE = 3,
  MODAL_MODE_CHECK = 4,
} ModalMode;

typedef enum ModalStatus {
  MODAL_STATUS_OK = 0,
  MODAL_STATUS_NULL_ARGUMENT = 1,
  MODAL_STATUS_INVALID_UTF8 = 2,
  MODAL_STATUS_PARSE_ERROR = 3,
  MODAL_STATUS_INVALID_BINDINGS = 4,
  MODAL_STATUS_BUDGET_EXCEEDED = 5,
  MODAL_STATUS_PANIC = 6,
} ModalStatus;

/**
 * A parsed, load-checked program.
 */
typedef struct ModalProgram ModalProgram;

/**
 * Output of one run. The strings stay valid until the report is freed.
 */
typedef struct ModalReport ModalReport;

/**
 * A validated bindings file and its label algebra.
 */
typedef struct ModalSession ModalSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next call into this library on the same thread.
 */
const char *modal_last_error(void);

/**
 * Parses a program from NUL-terminated UTF-8 source.
 *
 * # Safety
 * `source` must be NULL or a valid C string; `out` must be NULL or writable.
 */
enum ModalStatus modal_program_new(const char *source, struct ModalProgram **out);

/**
 * # Safety
 * `p` must be NULL or a handle from [`modal_program_new`] not yet freed.
 */
void modal_program_free(struct ModalProgram *p);

/**
 * Loads and validates a bindings file. `feature_limit` of 0 selects the
 * default limit.
 *
 * # Safety
 * `source` must be NULL or a valid C string; `out` must be NULL or writable.
 */
enum ModalStatus modal_session_new(const char *source,
                                   size_t feature_limit,
                                   uint32_t flags,
                                   struct ModalSession **out);

/**
 * # Safety
 * `s` must be NULL or a handle from [`modal_session_new`] not yet freed.
 */
void modal_session_free(struct ModalSession *s);

/**
 * Evaluates `program` over `session`. Evaluation failures are not call
 * failures: they are described by the report's exit code and stderr.
 *
 * # Safety
 * Handles must be live; `config` must be NULL or a valid C string; `out`
 * must be writable.
 */
enum ModalStatus modal_run(const struct ModalProgram *program,
                           const struct ModalSession *session,
                           enum ModalMode mode,
                           uint32_t flags,
                           const char *config,
                           struct ModalReport **out);

/**
 * Report text as the CLI would print it on stdout.
 *
 * # Safety
 * `r` must be a live report handle.
 */
const char *modal_report_stdout(const struct ModalReport *r);

/**
 * # Safety
 * `r` must be a live report handle.
 */
const char *modal_report_stderr(const struct ModalReport *r);

/**
 * CLI exit code of the run: 0 success, 1 usage, 2 invariant violation,
 * 3 budget exceeded; -1 for a NULL report.
 *
 * # Safety
 * `r` must be NULL or a live report handle.
 */
int32_t modal_report_exit_code(const struct ModalReport *r);

/**
 * # Safety
 * `r` must be NULL or a handle from [`modal_run`] not yet freed.
 */
void modal_report_free(struct ModalReport *r);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* MODAL_LIFT_H */
