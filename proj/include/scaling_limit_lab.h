#ifndef SCALING_LIMIT_LAB_H
#define SCALING_LIMIT_LAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

/* Error codes returned by all fallible calls. */
typedef enum sll_status {
  SLL_OK = 0,
  SLL_ERR_INVALID_ARGUMENT = 1,
  SLL_ERR_CONFIG = 2,
  SLL_ERR_IO = 3,
  SLL_ERR_DIVERGENCE = 4,
  SLL_ERR_SOLVER = 5,
  SLL_ERR_CONSERVATION = 6,
  SLL_ERR_FIXED_POINT = 7,
  SLL_ERR_EVALUATION = 8,
  SLL_ERR_INTERNAL = 9,
  /* cmd completed but its acceptance predicate failed (compare: max |z| > bound) */
  SLL_CHECK_FAILED = 10
} sll_status;

typedef struct sll_ctx sll_ctx;

/* Context lifecycle. Create never fails except on allocation. */
sll_ctx* sll_ctx_create(void);
void sll_ctx_destroy(sll_ctx* ctx);

/* Execution environment. Out dir defaults to "out"; seed, when set,
 * overrides the config seed; threads defaults to 1. */
sll_status sll_ctx_set_out_dir(sll_ctx* ctx, const char* dir);
sll_status sll_ctx_set_seed(sll_ctx* ctx, uint64_t seed);
sll_status sll_ctx_set_threads(sll_ctx* ctx, size_t threads);

/* Run one command ("simulate", "solve-pde", "compare", "roc", "potential")
 * against a JSON config file. */
sll_status sll_ctx_run(sll_ctx* ctx, const char* command, const char* config_path);

/* Message for the most recent failing call on this context (empty string
 * when the last call succeeded). The pointer stays valid until the next
 * call on the same context. */
const char* sll_ctx_last_error(const sll_ctx* ctx);

const char* sll_version(void);

#ifdef __cplusplus
}
#endif

#endif /* SCALING_LIMIT_LAB_H */
