#pragma once

#include <cstdint>
#include <optional>
#include <string>

namespace sll {

// Execution environment resolved from the command line.
struct RunContext {
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed when set
  std::size_t threads = 1;
};

// Each command reads a JSON config, writes CSV/JSON artifacts plus
// resolved_config.json into out_dir, and returns a process exit code
// (0 = success; cmd_compare returns 1 when max |z| exceeds the bound).
// Configuration problems raise Error.
int cmd_simulate(const std::string& config_path, const RunContext& ctx);
int cmd_solve_pde(const std::string& config_path, const RunContext& ctx);
int cmd_compare(const std::string& config_path, const RunContext& ctx);
int cmd_roc(const std::string& config_path, const RunContext& ctx);
int cmd_potential(const std::string& config_path, const RunContext& ctx);

int run_command(const std::string& command, const std::string& config_path, const RunContext& ctx);

}  // namespace sll
