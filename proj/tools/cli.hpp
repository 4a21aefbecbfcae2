#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace svarid::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;          // usage, I/O or parse errors
inline constexpr int kExitNotIdentified = 2;  // not identified, infeasible, nothing to explain
inline constexpr int kExitInconclusive = 3;   // reduced-form draws disagree

enum class Command { Check, Rotate, Demo, Explain };
enum class Format { Text, Json };

struct RunConfig {
  Command command = Command::Check;
  std::string spec_path;
  int draws = 5;
  std::uint64_t seed = 0;
  std::optional<std::string> sigma_path;
  std::optional<std::string> b_path;
  Format format = Format::Text;
  std::optional<double> tol;  // relative rank tolerance factor
};

/// Restrictions of the three-variable example in which a zero on IR0 is
/// implied by two zeros on A0.
std::string_view counterexample_spec_text();

int cmd_check(const RunConfig& cfg, std::ostream& out);
int cmd_rotate(const RunConfig& cfg, std::ostream& out);
int cmd_demo(const RunConfig& cfg, std::ostream& out);
int cmd_explain(const RunConfig& cfg, std::ostream& out);

/// Full command line (args excludes the program name).  Errors go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace svarid::cli
