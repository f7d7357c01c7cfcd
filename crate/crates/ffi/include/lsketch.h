#ifndef LSKETCH_H
#define LSKETCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  LSK_STATUS_OK = 0,
  LSK_STATUS_NULL_POINTER = 1,
  LSK_STATUS_INVALID_ARGUMENT = 2,
  LSK_STATUS_INVALID_EDGE = 3,
  LSK_STATUS_DIMENSION_MISMATCH = 4,
  LSK_STATUS_PARSE = 5,
  LSK_STATUS_FORMAT = 6,
  LSK_STATUS_IO = 7,
  LSK_STATUS_NUMERICAL = 8,
  LSK_STATUS_INVARIANT = 9,
  LSK_STATUS_PANIC = 10,
} LskStatus;

typedef enum {
  LSK_ALGORITHM_BASIC = 0,
  LSK_ALGORITHM_IMPROVED = 1,
} LskAlgorithm;

/**
 * Weighted undirected graph.
 */
typedef struct LskGraph LskGraph;

/**
 * Replicated sketch answering median queries.
 */
typedef struct LskSketch LskSketch;

/**
 * Mirrors the library's size report; `records = stored_edges + sample_records`.
 */
typedef struct {
  uint64_t stored_edges;
  uint64_t sample_records;
  uint64_t draws;
  uint64_t degree_entries;
  uint64_t records;
  uint64_t stored_edge_bits;
  uint64_t sample_bits;
  uint64_t degree_table_bits;
  uint64_t total_bits;
} LskSizeReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *lsk_last_error(void);

/**
 * Builds a graph on `n` vertices from `m` edges `(us[i], vs[i], ws[i])`.
 * Repeated pairs are merged by summing weights.
 *
 * # Safety
 * `us`, `vs`, `ws` must point to `m` readable elements; `out` must be writable.
 */
LskStatus lsk_graph_new(size_t n,
                        const size_t *us,
                        const size_t *vs,
                        const double *ws,
                        size_t m,
                        LskGraph **out);

/**
 * Reads a `u v w` edge list.
 *
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
LskStatus lsk_graph_load(const char *path, LskGraph **out);

/**
 * # Safety
 * `g` must be null or a handle from this library not yet freed.
 */
void lsk_graph_free(LskGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t lsk_graph_vertex_count(const LskGraph *g);

/**
 * # Safety
 * `g` must be a live graph handle.
 */
size_t lsk_graph_edge_count(const LskGraph *g);

/**
 * Exact `x^T L x`.
 *
 * # Safety
 * `g` must be a live handle, `x` must point to `len` doubles, `out` writable.
 */
LskStatus lsk_quadratic_form(const LskGraph *g, const double *x, size_t len, double *out);

/**
 * Builds a replicated sketch with default constants.
 *
 * # Safety
 * `g` must be a live handle; `out` must be writable.
 */
LskStatus lsk_sketch_build(const LskGraph *g,
                           LskAlgorithm algorithm,
                           double eps,
                           double delta,
                           uint64_t seed,
                           LskSketch **out);

/**
 * # Safety
 * `path` must be a nul-terminated string; `out` must be writable.
 */
LskStatus lsk_sketch_load(const char *path, LskSketch **out);

/**
 * # Safety
 * `sk` must be a live handle; `path` a nul-terminated string.
 */
LskStatus lsk_sketch_save(const LskSketch *sk, const char *path);

/**
 * Median-of-replicas estimate of `x^T L x`. Safe to call concurrently on
 * one handle.
 *
 * # Safety
 * `sk` must be a live handle, `x` must point to `len` doubles, `out` writable.
 */
LskStatus lsk_sketch_query(const LskSketch *sk, const double *x, size_t len, double *out);

/**
 * # Safety
 * `sk` must be a live handle; `out` writable.
 */
LskStatus lsk_sketch_size(const LskSketch *sk, LskSizeReport *out);

/**
 * # Safety
 * `sk` must be a live handle.
 */
size_t lsk_sketch_vertex_count(const LskSketch *sk);

/**
 * # Safety
 * `sk` must be a live handle.
 */
size_t lsk_sketch_replica_count(const LskSketch *sk);

/**
 * # Safety
 * `sk` must be null or a handle from this library not yet freed.
 */
void lsk_sketch_free(LskSketch *sk);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LSKETCH_H */
