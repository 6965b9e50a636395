#ifndef BISECT_TOOLS_COMMANDS_HPP
#define BISECT_TOOLS_COMMANDS_HPP

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace bisect::cli {

enum ExitCode : int {
  kSolved = 0,
  kIoOrSchema = 1,
  kInadmissible = 2,
  kSolverFailed = 3,
  kVerifyFailed = 4,
};

struct CommandOptions
{
  std::string input;
  std::string output;       // empty: stdout
  std::string certificate;  // verify only
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> samples;
  bool timing = false;
};

// `out` receives the document when no output path is given, `log` the
// human-readable diagnostics.
int cmd_solve(const CommandOptions& o, std::ostream& out, std::ostream& log);
int cmd_verify(const CommandOptions& o, std::ostream& out, std::ostream& log);
int cmd_trace(const CommandOptions& o, std::ostream& out, std::ostream& log);

/// Header of the trace CSV for a base of dimension d.
std::string trace_header(int d);

} // namespace bisect::cli

#endif // BISECT_TOOLS_COMMANDS_HPP
