#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "scaling_limit_lab.h"

namespace {

int run(const std::string& command, const std::string& config, const std::string& out,
        std::uint64_t seed, bool seed_set, std::size_t threads) {
  sll_ctx* ctx = sll_ctx_create();
  if (!ctx) {
    std::cerr << "error: cannot allocate context\n";
    return 2;
  }
  int exit_code = 0;
  sll_status st = sll_ctx_set_out_dir(ctx, out.c_str());
  if (st == SLL_OK && seed_set) st = sll_ctx_set_seed(ctx, seed);
  if (st == SLL_OK) st = sll_ctx_set_threads(ctx, threads);
  if (st == SLL_OK) st = sll_ctx_run(ctx, command.c_str(), config.c_str());
  if (st == SLL_CHECK_FAILED) {
    std::cerr << "check failed: " << sll_ctx_last_error(ctx) << '\n';
    exit_code = 1;
  } else if (st != SLL_OK) {
    std::cerr << "error (" << static_cast<int>(st) << "): " << sll_ctx_last_error(ctx) << '\n';
    exit_code = 2;
  }
  sll_ctx_destroy(ctx);
  return exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"scaling-limit-lab: finite-n simulators and scaling-limit PDE solvers"};
  app.require_subcommand(1);

  std::size_t threads = 1;
  if (const char* env = std::getenv("SLL_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) threads = static_cast<std::size_t>(v);
  }

  struct Args {
    std::string config;
    std::string out = "out";
    std::uint64_t seed = 0;
  };

  const char* names[] = {"simulate", "solve-pde", "compare", "roc", "potential"};
  const char* descs[] = {"run finite-n algorithm simulations",
                         "solve the self-consistent scaling-limit PDE",
                         "compare simulation trajectories to a PDE path",
                         "sweep ROC operating points from PDE densities",
                         "sweep the 1-D effective potential over beta"};
  Args args[5];
  CLI::Option* seed_opts[5];
  CLI::App* subs[5];
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(names[i], descs[i]);
    sub->add_option("--config", args[i].config, "JSON config file")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args[i].out, "output directory (default: out)");
    seed_opts[i] = sub->add_option("--seed", args[i].seed, "override the config seed");
    sub->add_option("--threads", threads, "worker threads (default: $SLL_THREADS or 1)");
    subs[i] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  for (int i = 0; i < 5; ++i) {
    if (subs[i]->parsed())
      return run(names[i], args[i].config, args[i].out, args[i].seed, seed_opts[i]->count() > 0,
                 threads);
  }
  return 2;
}
