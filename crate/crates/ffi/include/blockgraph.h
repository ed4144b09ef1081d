#ifndef BLOCKGRAPH_H
#define BLOCKGRAPH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

/**
 * Result code of every fallible call.
 */
typedef enum BgStatus {
  BG_STATUS_OK = 0,
  BG_STATUS_NULL_POINTER = 1,
  BG_STATUS_EMPTY_TEXT = 2,
  BG_STATUS_INVALID_CONFIG = 3,
  BG_STATUS_OUT_OF_RANGE = 4,
  BG_STATUS_UNTRACKED_SYMBOL = 5,
  BG_STATUS_NO_SUCH_OCCURRENCE = 6,
  BG_STATUS_COLLISIONS_PERSIST = 7,
  BG_STATUS_UNBALANCED = 8,
  BG_STATUS_NO_EXCESS = 9,
  BG_STATUS_INVALID_NODE = 10,
  BG_STATUS_BAD_MAGIC = 11,
  BG_STATUS_VERSION = 12,
  BG_STATUS_CHECKSUM = 13,
  BG_STATUS_TRUNCATED = 14,
  BG_STATUS_MALFORMED = 15,
  BG_STATUS_INTERNAL = 16,
} BgStatus;

/**
 * Opaque balanced-parentheses string with excess support.
 */
typedef struct BgBpString BgBpString;

/**
 * Opaque block graph.
 */
typedef struct BgGraph BgGraph;

/**
 * Build parameters. Zero lengths and a null `rank_symbols` select the
 * library defaults.
 */
typedef struct BgConfig {
  size_t arity;
  size_t leaf_block_len;
  size_t affix_len;
  const uint8_t *rank_symbols;
  size_t rank_symbols_len;
  bool enable_excess;
  bool level_skip;
  uint64_t hash_seed;
  uint32_t hash_modulus_bits;
  uint32_t max_attempts;
} BgConfig;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library defaults.
 */
struct BgConfig bg_config_default(void);

/**
 * Builds a graph over `text[0..len)`. A null `config` uses the defaults.
 *
 * # Safety
 * `text` must point to `len` readable bytes and `out` to writable storage.
 */
enum BgStatus bg_build(const uint8_t *text,
                       size_t len,
                       const struct BgConfig *config,
                       struct BgGraph **out_graph);

/**
 * Loads a graph from serialized bytes.
 *
 * # Safety
 * `data` must point to `len` readable bytes and `out` to writable storage.
 */
enum BgStatus bg_load(const uint8_t *data, size_t len, struct BgGraph **out_graph);

/**
 * Serializes a graph into a new buffer released with `bg_bytes_free`.
 *
 * # Safety
 * `g` must be a live handle; `out_data` and `out_len` must be writable.
 */
enum BgStatus bg_serialize(const struct BgGraph *g, uint8_t **out_data, size_t *out_len);

/**
 * Releases a buffer from `bg_serialize`.
 *
 * # Safety
 * `data` and `len` must come from one `bg_serialize` call, freed once.
 */
void bg_bytes_free(uint8_t *data, size_t len);

/**
 * Releases a graph. Null is ignored.
 *
 * # Safety
 * `g` must come from `bg_build` or `bg_load` and not be used afterwards.
 */
void bg_free(struct BgGraph *g);

/**
 * Text length, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t bg_len(const struct BgGraph *g);

/**
 * Number of levels, or 0 for a null handle.
 *
 * # Safety
 * `g` must be null or a live handle.
 */
size_t bg_levels(const struct BgGraph *g);

/**
 * `S[i]`.
 *
 * # Safety
 * `g` must be a live handle and `out_symbol` writable.
 */
enum BgStatus bg_access(const struct BgGraph *g, size_t i, uint8_t *out_symbol);

/**
 * Writes `S[i..i+m-1]` into `buf`, which must hold `m` bytes.
 *
 * # Safety
 * `g` must be a live handle and `buf` must have `m` writable bytes.
 */
enum BgStatus bg_extract(const struct BgGraph *g, size_t i, size_t m, uint8_t *buf);

/**
 * Occurrences of `a` in `S[1..i]`.
 *
 * # Safety
 * `g` must be a live handle and `out_count` writable.
 */
enum BgStatus bg_rank(const struct BgGraph *g, uint8_t a, size_t i, uint64_t *out_count);

/**
 * Position of the `j`-th occurrence of `a`.
 *
 * # Safety
 * `g` must be a live handle and `out_pos` writable.
 */
enum BgStatus bg_select(const struct BgGraph *g, uint8_t a, uint64_t j, size_t *out_pos);

/**
 * Builds an excess-augmented graph over a balanced parentheses string.
 *
 * # Safety
 * `text` must point to `len` readable bytes and `out_bp` be writable.
 */
enum BgStatus bg_bp_build(const uint8_t *text,
                          size_t len,
                          const struct BgConfig *config,
                          struct BgBpString **out_bp);

/**
 * Wraps a loaded graph, consuming it on success. On failure `g` stays
 * owned by the caller.
 *
 * # Safety
 * `g` must be a live handle and `out_bp` writable.
 */
enum BgStatus bg_bp_from_graph(struct BgGraph *g, struct BgBpString **out_bp);

/**
 * Releases a parentheses handle. Null is ignored.
 *
 * # Safety
 * `b` must come from `bg_bp_build` or `bg_bp_from_graph`, freed once.
 */
void bg_bp_free(struct BgBpString *b);

/**
 * Serializes the underlying graph; release with `bg_bytes_free`.
 *
 * # Safety
 * `b` must be a live handle; `out_data` and `out_len` must be writable.
 */
enum BgStatus bg_bp_serialize(const struct BgBpString *b, uint8_t **out_data, size_t *out_len);

/**
 * Length of the parentheses string, or 0 for a null handle.
 *
 * # Safety
 * `b` must be null or a live handle.
 */
size_t bg_bp_len(const struct BgBpString *b);

/**
 * `E(i)`: opens minus closes in `S[1..i]`.
 *
 * # Safety
 * `b` must be a live handle and `out_excess` writable.
 */
enum BgStatus bg_bp_excess(const struct BgBpString *b, size_t i, int64_t *out_excess);

/**
 * Leftmost position of minimum excess in `[i, k]`.
 *
 * # Safety
 * `b` must be a live handle and `out_pos` writable.
 */
enum BgStatus bg_bp_min_excess_pos(const struct BgBpString *b, size_t i, size_t k, size_t *out_pos);

/**
 * Lowest common ancestor of the nodes opened at `u` and `v`.
 *
 * # Safety
 * `b` must be a live handle and `out_node` writable.
 */
enum BgStatus bg_bp_lca(const struct BgBpString *b, size_t u, size_t v, size_t *out_node);

/**
 * Static, NUL-terminated description of a status.
 */
const char *bg_status_message(enum BgStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BLOCKGRAPH_H */
