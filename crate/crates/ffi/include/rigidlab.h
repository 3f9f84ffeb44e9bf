#ifndef RIGIDLAB_H
#define RIGIDLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

// Result of an FFI call. The numeric failure classes match the CLI exit codes.
typedef enum RlStatus {
  RL_STATUS_OK = 0,
  RL_STATUS_NUMERIC = 1,
  RL_STATUS_SCHEMA = 2,
  RL_STATUS_BUDGET = 3,
  // Null pointer, bad UTF-8 or a buffer that is too small.
  RL_STATUS_INVALID_ARGUMENT = 4,
  RL_STATUS_PANIC = 5,
} RlStatus;

// How Lyapunov spectra are accumulated.
typedef enum RlMethod {
  // Exact integer products for toral automorphisms, float QR otherwise.
  RL_METHOD_AUTO = 0,
  RL_METHOD_QR = 1,
  RL_METHOD_EXACT = 2,
} RlMethod;

// A validated subresonant map.
typedef struct RlMap RlMap;

// A finitely supported random walk on generators.
typedef struct RlWalk RlWalk;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// Valid until the next call on this thread.
const char *rl_last_error(void);

// Releases a string returned by this library. Null is ignored.
//
// # Safety
// `s` must come from this library and not have been freed.
void rl_string_free(char *s);

// Parses and validates a map document.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_map_from_json(const char *json, bool strict, struct RlMap **out);

// # Safety
// `map` must come from this library and not have been freed. Null is ignored.
void rl_map_free(struct RlMap *map);

// Map document of `map` as pretty JSON.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RlStatus rl_map_to_json(const struct RlMap *map, char **out);

// Writes whether `map` is strictly subresonant.
//
// # Safety
// `map` must be a live handle; `out` must be writable.
enum RlStatus rl_map_is_strict(const struct RlMap *map, bool *out);

// `f ∘ g`.
//
// # Safety
// `f` and `g` must be live handles; `out` must be writable.
enum RlStatus rl_map_compose(const struct RlMap *f, const struct RlMap *g, struct RlMap **out);

// # Safety
// `f` must be a live handle; `out` must be writable.
enum RlStatus rl_map_invert(const struct RlMap *f, struct RlMap **out);

// Linearization as CSV: a header of basis monomials, then one row per monomial
// with exact rational entries.
//
// # Safety
// `f` must be a live handle; `out` must be writable.
enum RlStatus rl_map_linearize_csv(const struct RlMap *f, bool affine, char **out);

// Parses a walk `{"atoms":[{"system":{...},"p":"1/2"}, ...]}`.
//
// # Safety
// `json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_walk_from_json(const char *json, struct RlWalk **out);

// # Safety
// `walk` must come from this library and not have been freed. Null is ignored.
void rl_walk_free(struct RlWalk *walk);

// Dimension of the space the walk acts on.
//
// # Safety
// `walk` must be a live handle; `out` must be writable.
enum RlStatus rl_walk_dim(const struct RlWalk *walk, uintptr_t *out);

// Lyapunov spectrum along `n` counted steps after `transient` warm-up steps,
// written descending into `exponents[0..dim]`.
//
// # Safety
// `q0` must point to `dim` doubles and `exponents` to `dim` writable doubles.
enum RlStatus rl_lyapunov(const struct RlWalk *walk,
                          const double *q0,
                          uintptr_t dim,
                          uintptr_t transient,
                          uintptr_t n,
                          uint64_t seed,
                          enum RlMethod method,
                          double *exponents);

// Runs a full experiment config in memory and returns its CSV (or JSON) payload.
// Nothing is written to disk.
//
// # Safety
// `config_json` must be a nul-terminated string; `out` must be writable.
enum RlStatus rl_run_config(const char *config_json, char **out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RIGIDLAB_H */
