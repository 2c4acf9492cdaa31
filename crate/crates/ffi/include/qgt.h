#ifndef QGT_H
#define QGT_H

/* Generated from the qgt-ffi crate; edit the Rust source instead. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code carried by every entry point.
 */
typedef enum QgtStatus {
  QGT_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  QGT_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  QGT_STATUS_INVALID_UTF8 = 2,
  /**
   * No catalog entry or gate under that name.
   */
  QGT_STATUS_UNKNOWN_NAME = 3,
  /**
   * An argument was rejected (wrong count, inadmissible gate, bad input).
   */
  QGT_STATUS_INVALID_ARGUMENT = 4,
  /**
   * A numerical consistency check tripped during evaluation.
   */
  QGT_STATUS_NUMERICAL_FAILURE = 5,
  /**
   * An exhaustive search would exceed its evaluation budget.
   */
  QGT_STATUS_BUDGET_EXCEEDED = 6,
  /**
   * Unexpected internal failure.
   */
  QGT_STATUS_INTERNAL_ERROR = 7,
} QgtStatus;

/**
 * Opaque handle pairing a procedure with its scenario.
 */
typedef struct QgtSession QgtSession;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, empty when the last
 * call succeeded. The pointer stays valid until the next toolkit call from
 * the same thread.
 */
const char *qgt_last_error_message(void);

/**
 * Toolkit version as a static nul-terminated string.
 */
const char *qgt_version(void);

/**
 * Releases a string returned through a `*mut c_char` output.
 *
 * # Safety
 * `s` must be a pointer previously returned by this library, or null.
 */
void qgt_string_free(char *s);

/**
 * Opens a session for a named catalog entry (see `qgt list-catalog`).
 * The handle must be released with [`qgt_session_close`].
 *
 * # Safety
 * `name` must be a nul-terminated string and `out_session` a valid pointer.
 */
enum QgtStatus qgt_session_open(const char *name, struct QgtSession **out_session);

/**
 * Releases a session handle. Null is accepted and ignored.
 *
 * # Safety
 * `session` must come from [`qgt_session_open`] and not be used afterwards.
 */
void qgt_session_close(struct QgtSession *session);

/**
 * Number of players in the session's procedure, or 0 on a null handle.
 *
 * # Safety
 * `session` must be a live handle from [`qgt_session_open`] or null.
 */
size_t qgt_session_players(const struct QgtSession *session);

/**
 * Number of measurement outcomes (2^players), or 0 on a null handle.
 * This is the buffer length [`qgt_outcome_distribution`] expects.
 *
 * # Safety
 * `session` must be a live handle from [`qgt_session_open`] or null.
 */
size_t qgt_session_outcome_count(const struct QgtSession *session);

/**
 * Expected payoffs for one fixed gate per player. `gate_labels` holds
 * `label_count` nul-terminated names (such as "identity", "pauli_x",
 * "hadamard", "su2(0.5,0.1,0.0)"); `out_payoffs` receives one value per
 * player.
 *
 * # Safety
 * Pointers must be valid for the stated counts; `out_payoffs` must have
 * room for `qgt_session_players` values.
 */
enum QgtStatus qgt_payoff(const struct QgtSession *session,
                          const char *const *gate_labels,
                          size_t label_count,
                          double *out_payoffs);

/**
 * Expected payoffs when each player conditions on their input bit:
 * player i applies `on_zero[i]` on a 0 bit and `on_one[i]` on a 1 bit.
 * Requires a scenario with inputs.
 *
 * # Safety
 * Pointers must be valid for the stated counts; `out_payoffs` must have
 * room for `qgt_session_players` values.
 */
enum QgtStatus qgt_payoff_per_input(const struct QgtSession *session,
                                    const char *const *on_zero,
                                    const char *const *on_one,
                                    size_t label_count,
                                    double *out_payoffs);

/**
 * Measurement distribution for one fixed gate per player. Masses land in
 * `out_masses` indexed by outcome with player 1 in the most significant
 * bit; `mass_count` must equal `qgt_session_outcome_count`. Pass a null
 * `input_bits` (with `input_len` 0) unless the scenario has inputs and
 * the distribution for one specific input is wanted.
 *
 * # Safety
 * Pointers must be valid for the stated counts.
 */
enum QgtStatus qgt_outcome_distribution(const struct QgtSession *session,
                                        const char *const *gate_labels,
                                        size_t label_count,
                                        const uint8_t *input_bits,
                                        size_t input_len,
                                        double *out_masses,
                                        size_t mass_count);

/**
 * Pure Nash equilibria of the induced game at gain threshold `epsilon`,
 * as a JSON report. `budget` caps payoff evaluations; 0 means the
 * default. Free the string with [`qgt_string_free`].
 *
 * # Safety
 * `session` must be a live handle and `out_json` a valid pointer.
 */
enum QgtStatus qgt_find_pure_nash_json(const struct QgtSession *session,
                                       double epsilon,
                                       uint64_t budget,
                                       char **out_json);

/**
 * Symmetric profile maximizing the minimum payoff, as a JSON report.
 * `budget` caps payoff evaluations; 0 means the default.
 *
 * # Safety
 * `session` must be a live handle and `out_json` a valid pointer.
 */
enum QgtStatus qgt_symmetric_max_json(const struct QgtSession *session,
                                      uint64_t budget,
                                      char **out_json);

/**
 * Best deterministic classical play for the session's scenario, as a
 * JSON report. `budget` caps evaluations; 0 means the default.
 *
 * # Safety
 * `session` must be a live handle and `out_json` a valid pointer.
 */
enum QgtStatus qgt_classical_bound_json(const struct QgtSession *session,
                                        uint64_t budget,
                                        char **out_json);

/**
 * Runs the built-in claim battery and returns the JSON report. `samples`
 * sets the card-deck draw count (0 means the default) and `seed` fixes
 * the sampler. Check the `all_pass` field in the result.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum QgtStatus qgt_verify_claims_json(uint64_t samples, uint64_t seed, char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QGT_H */
