#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace qbell::cli {

// Exit codes: 0 success, 1 a verification check failed, 2 usage error.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

struct RunConfig {
  std::string command;                 // tensor | criteria | threshold | verify
  std::string state_family = "ghz_mixture";
  double f = 1.0;
  int n = 6;
  bool flip_last = false;
  std::uint64_t seed = 12345;
  int restarts = 64;
  double tol = 1e-10;
  std::string format = "text";         // text | json
  unsigned threads = 0;                // 0 = all cores
  std::string criterion = "full_sphere";
};

/// Parses args (without the program name) and runs the selected subcommand,
/// writing the report to `out` and diagnostics to `err`. Identical configs
/// produce identical reports apart from the wall-clock duration field.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qbell::cli
