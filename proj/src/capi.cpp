#include "scaling_limit_lab.h"

#include <new>
#include <optional>
#include <string>

#include "sll/errors.hpp"
#include "sll/experiment.hpp"

struct sll_ctx {
  sll::RunContext run;
  std::string last_error;
};

namespace {

sll_status map_code(sll::ErrorCode code) {
  switch (code) {
    case sll::ErrorCode::invalid_argument:
      return SLL_ERR_INVALID_ARGUMENT;
    case sll::ErrorCode::config:
      return SLL_ERR_CONFIG;
    case sll::ErrorCode::io:
      return SLL_ERR_IO;
    case sll::ErrorCode::divergence:
      return SLL_ERR_DIVERGENCE;
    case sll::ErrorCode::solver:
      return SLL_ERR_SOLVER;
    case sll::ErrorCode::conservation:
      return SLL_ERR_CONSERVATION;
    case sll::ErrorCode::fixed_point:
      return SLL_ERR_FIXED_POINT;
    case sll::ErrorCode::evaluation:
      return SLL_ERR_EVALUATION;
  }
  return SLL_ERR_INTERNAL;
}

}  // namespace

extern "C" {

sll_ctx* sll_ctx_create(void) { return new (std::nothrow) sll_ctx(); }

void sll_ctx_destroy(sll_ctx* ctx) { delete ctx; }

sll_status sll_ctx_set_out_dir(sll_ctx* ctx, const char* dir) {
  if (!ctx) return SLL_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  if (!dir || !*dir) {
    ctx->last_error = "out dir must be a non-empty string";
    return SLL_ERR_INVALID_ARGUMENT;
  }
  ctx->run.out_dir = dir;
  return SLL_OK;
}

sll_status sll_ctx_set_seed(sll_ctx* ctx, uint64_t seed) {
  if (!ctx) return SLL_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  ctx->run.seed = seed;
  return SLL_OK;
}

sll_status sll_ctx_set_threads(sll_ctx* ctx, size_t threads) {
  if (!ctx) return SLL_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  if (threads == 0) {
    ctx->last_error = "threads must be >= 1";
    return SLL_ERR_INVALID_ARGUMENT;
  }
  ctx->run.threads = threads;
  return SLL_OK;
}

sll_status sll_ctx_run(sll_ctx* ctx, const char* command, const char* config_path) {
  if (!ctx) return SLL_ERR_INVALID_ARGUMENT;
  ctx->last_error.clear();
  if (!command || !config_path) {
    ctx->last_error = "command and config path must be non-null";
    return SLL_ERR_INVALID_ARGUMENT;
  }
  try {
    const int rc = sll::run_command(command, config_path, ctx->run);
    if (rc == 0) return SLL_OK;
    ctx->last_error = "check failed (see outputs in " + ctx->run.out_dir + ")";
    return SLL_CHECK_FAILED;
  } catch (const sll::Error& e) {
    ctx->last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    ctx->last_error = e.what();
    return SLL_ERR_INTERNAL;
  }
}

const char* sll_ctx_last_error(const sll_ctx* ctx) {
  return ctx ? ctx->last_error.c_str() : "null context";
}

const char* sll_version(void) { return "0.1.0"; }

}  // extern "C"
