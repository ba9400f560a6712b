#ifndef TIEBREAK_H
#define TIEBREAK_H

#pragma once

/* This file is generated by cbindgen from tiebreak-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of a tiebreak call.
typedef enum {
  // The call succeeded.
  TB_STATUS_OK = 0,
  // A required pointer argument was null.
  TB_STATUS_NULL_POINTER = 1,
  // A string argument was not valid UTF-8, or an output string could not
  // be encoded for C.
  TB_STATUS_ENCODING = 2,
  // The game text did not parse; `tb_last_error` carries line and column.
  TB_STATUS_PARSE = 3,
  // The game breaks a structural invariant.
  TB_STATUS_INVALID_GAME = 4,
  // Generic backward induction hit a tie; `tb_last_error` names the node.
  TB_STATUS_INDIFFERENCE = 5,
  // A policy or strategy specification was rejected.
  TB_STATUS_INVALID_ARGUMENT = 6,
} TbStatus;

// Which tab-separated report to produce.
typedef enum {
  // All pure subgame-perfect equilibria.
  TB_REPORT_SPE = 0,
  // Solve results under every disposition profile.
  TB_REPORT_SCENARIOS = 1,
  // Friendly/unfriendly classification of tied actions.
  TB_REPORT_FRIENDLINESS = 2,
  // The full normal-form payoff tensor.
  TB_REPORT_NORMAL_FORM = 3,
  // Pure Nash equilibria of the normal form.
  TB_REPORT_NASH = 4,
} TbReport;

// An immutable game handle.
typedef struct TbGame TbGame;

// A backward-induction result, bound to the game it was computed on.
typedef struct TbSolveResult TbSolveResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// The message of the most recent failure on this thread. The pointer stays
// valid until the next failing call on the same thread.
const char *tb_last_error(void);

// # Safety
// `text` must be null or a pointer previously returned by this library and
// not yet freed.
void tb_string_free(char *text);

// Parses a game description and stores a new handle in `out_game`.
//
// # Safety
// `source` must point to a NUL-terminated string and `out_game` to a
// writable pointer slot.
TbStatus tb_game_parse(const char *source, TbGame **out_game);

// The bundled one-step indifference game.
TbGame *tb_game_indifference(void);

// The bundled reduced game (the indifference game collapsed under a
// friendliness-matching opponent).
TbGame *tb_game_tft_reduced(void);

// The bundled three-stage game.
TbGame *tb_game_three_stage(void);

// The alternating gift game with the given number of moves, 1 to 24
// inclusive (the tree has 2^moves leaves); returns null outside that range.
TbGame *tb_game_alternating(uintptr_t moves);

// # Safety
// `game` must be null or an unfreed handle from this library.
void tb_game_free(TbGame *game);

// Number of players, or 0 when `game` is null.
//
// # Safety
// `game` must be null or a live game handle.
uintptr_t tb_game_num_players(const TbGame *game);

// Canonical text of the game; free with `tb_string_free`. Null on error.
//
// # Safety
// `game` must be null or a live game handle.
char *tb_game_serialize(const TbGame *game);

// Checks the structural invariants. Returns `Ok` on a well-formed game and
// `InvalidGame` otherwise; when `out_report` is non-null it receives the
// violation table either way.
//
// # Safety
// `game` must be a live game handle; `out_report` null or writable.
TbStatus tb_game_validate(const TbGame *game, char **out_report);

// Solves the game by backward induction. A null `policy` demands
// genericity and fails with `Indifference` on the first tie; otherwise the
// policy string is parsed as on the command line.
//
// # Safety
// `game` must be a live game handle, `policy` null or a NUL-terminated
// string, `out_result` writable.
TbStatus tb_solve(const TbGame *game, const char *policy, TbSolveResult **out_result);

// # Safety
// `result` must be null or an unfreed result handle.
void tb_result_free(TbSolveResult *result);

// The root value as space-separated rationals, e.g. `"1 1"`. Free with
// `tb_string_free`; null on error.
//
// # Safety
// `result` must be null or a live result handle.
char *tb_result_value(const TbSolveResult *result);

// The realized play as space-separated action labels, e.g. `"R L"`. Free
// with `tb_string_free`; null on error.
//
// # Safety
// `result` must be null or a live result handle.
char *tb_result_path(const TbSolveResult *result);

// How many decision nodes had tied best sets; 0 on a null handle.
//
// # Safety
// `result` must be null or a live result handle.
uintptr_t tb_result_tie_count(const TbSolveResult *result);

// Produces one of the tab-separated reports, byte-identical to the command
// line's output for the same game.
//
// # Safety
// `game` must be a live game handle and `out_text` writable.
TbStatus tb_report(const TbGame *game, TbReport kind, char **out_text);

// Plays the repeated stage game (or, with `alternating`, the alternating
// gift game) between two named strategies (`tft`, `allf`, `allu`) and
// returns the per-round table.
//
// # Safety
// `p1` and `p2` must be NUL-terminated strings and `out_text` writable.
TbStatus tb_simulate(const char *p1,
                     const char *p2,
                     uintptr_t rounds,
                     bool alternating,
                     char **out_text);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TIEBREAK_H */
