#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace kelly::cli {

enum class ExitCode : int { ok = 0, domain_error = 1, input_error = 2 };

/// Parsed command line for one invocation.
struct CommandConfig {
  std::string subcommand;
  std::filesystem::path dist_path;
  std::filesystem::path prices_path;
  std::optional<std::filesystem::path> out_path;

  int n = 1;
  std::string weights;    // certify --weights
  std::string k;          // simulate --k
  std::string k_star;     // simulate --kstar
  double kkt_tol = 1e-8;
  int max_iters = 10'000;
  double tol = 1e-6;
  std::size_t horizon = 0;
  std::size_t paths = 0;
  std::uint64_t seed = 0;

  std::size_t window = 20;
  std::string fallback = "hold";
  std::optional<std::size_t> riskless_index;
  double v0 = 1.0;
};

/// Runs one already-parsed command. Results go to config.out_path when set,
/// otherwise to `out`; diagnostics go to `err`.
ExitCode dispatch(const CommandConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv-style arguments (without the program name) and dispatches.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kelly::cli
