#ifndef RANDRANK_H
#define RANDRANK_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stddef.h>
#include <stdint.h>

/**
 * Sentinel for "no value" in `uint64_t` outputs.
 */
#define RR_NONE UINT64_MAX

typedef enum RrStatus {
  RR_STATUS_OK = 0,
  RR_STATUS_NULL_POINTER = 1,
  RR_STATUS_INVALID_UTF8 = 2,
  RR_STATUS_PARSE = 3,
  RR_STATUS_VALIDATION = 4,
  RR_STATUS_NON_CONVERGENCE = 5,
  RR_STATUS_CAPACITY = 6,
  RR_STATUS_CONSISTENCY = 7,
  RR_STATUS_DIMENSION_MISMATCH = 8,
  RR_STATUS_IO = 9,
  RR_STATUS_PANIC = 10,
} RrStatus;

/**
 * Opaque graph handle with its link matrix.
 */
typedef struct RrGraph RrGraph;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses an edge list (NUL-terminated UTF-8) into a new graph handle.
 *
 * # Safety
 * `text` must be a valid C string and `out` a valid pointer.
 */
enum RrStatus rr_graph_from_edge_list(const char *text, struct RrGraph **out);

/**
 * Random web with `hubs` hub pages and out-degrees in `min_deg..=max_deg`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RrStatus rr_graph_random(size_t n,
                              uint64_t seed,
                              size_t hubs,
                              size_t min_deg,
                              size_t max_deg,
                              struct RrGraph **out);

/**
 * The built-in 4-page example web.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum RrStatus rr_graph_example(struct RrGraph **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `g` must come from one of the constructors and not be used afterwards.
 */
void rr_graph_free(struct RrGraph *g);

/**
 * Page count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t rr_graph_page_count(const struct RrGraph *g);

/**
 * Edge count, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t rr_graph_edge_count(const struct RrGraph *g);

/**
 * Power method from the uniform vector. `iterations` may be null.
 *
 * # Safety
 * `g` must be a live handle and `out` hold `len` doubles.
 */
enum RrStatus rr_pagerank(const struct RrGraph *g,
                          double m,
                          double tol,
                          size_t max_iter,
                          double *out,
                          size_t len,
                          size_t *iterations);

double rr_mhat_single(double m, size_t n);

double rr_mhat_simul(double m, double alpha);

/**
 * Final time average of a single-update run.
 *
 * # Safety
 * `g` must be a live handle and `out_y` hold `len` doubles.
 */
enum RrStatus rr_simulate_single(const struct RrGraph *g,
                                 double m,
                                 uint64_t seed,
                                 uint64_t steps,
                                 double *out_y,
                                 size_t len);

/**
 * Final time average of a simultaneous-update run.
 *
 * # Safety
 * `g` must be a live handle and `out_y` hold `len` doubles.
 */
enum RrStatus rr_simulate_simul(const struct RrGraph *g,
                                double m,
                                double alpha,
                                uint64_t seed,
                                uint64_t steps,
                                double *out_y,
                                size_t len);

/**
 * Final normalized state `x / sum(x)` of an asynchronous run. `stopped_at`
 * (nullable) receives the step the tolerance was met, or `RR_NONE`.
 *
 * # Safety
 * `g` must be a live handle and `out_x` hold `len` doubles.
 */
enum RrStatus rr_simulate_async(const struct RrGraph *g,
                                double m,
                                double alpha,
                                uint64_t seed,
                                uint64_t steps,
                                double tol,
                                double *out_x,
                                size_t len,
                                uint64_t *stopped_at);

/**
 * Final time average of a terminating run. `term_times` (nullable, `len`
 * entries) receives each page's freezing step or `RR_NONE`.
 *
 * # Safety
 * `g` must be a live handle, `out_y` hold `len` doubles and `term_times`
 * be null or hold `len` integers.
 */
enum RrStatus rr_simulate_terminate(const struct RrGraph *g,
                                    double m,
                                    double alpha,
                                    double delta,
                                    size_t ns,
                                    uint64_t seed,
                                    uint64_t steps,
                                    double *out_y,
                                    size_t len,
                                    uint64_t *term_times);

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next call on this thread.
 */
const char *rr_last_error_message(void);

/**
 * Static description of a status code.
 */
const char *rr_status_string(enum RrStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANDRANK_H */
