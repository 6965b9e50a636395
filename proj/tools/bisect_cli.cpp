#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

void add_common(CLI::App* cmd, bisect::cli::CommandOptions& o)
{
  cmd->add_option("--input", o.input, "problem JSON")->required();
  cmd->add_option("--output", o.output, "output file (default: stdout)");
  cmd->add_option("--seed", o.seed, "override the problem seed");
  cmd->add_option("--grid", o.grid, "points per axis for defect and support grids");
  cmd->add_option("--samples", o.samples, "planner audit samples per path segment");
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Bisection solver for n-transitivity problems on built-in Lie groupoids"};
  app.require_subcommand(1);
  bisect::cli::CommandOptions o;

  auto* solve = app.add_subcommand("solve", "solve a problem and write its certificate");
  add_common(solve, o);
  solve->add_flag("--timing", o.timing, "record runtime_ms (breaks byte determinism)");

  auto* verify = app.add_subcommand("verify", "re-evaluate a certificate against its problem");
  add_common(verify, o);
  verify->add_option("--certificate", o.certificate, "certificate JSON")->required();

  auto* trace = app.add_subcommand("trace", "write continuation trajectories as CSV");
  add_common(trace, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : bisect::cli::kIoOrSchema;
  }

  if (*solve)
    return bisect::cli::cmd_solve(o, std::cout, std::cerr);
  if (*verify)
    return bisect::cli::cmd_verify(o, std::cout, std::cerr);
  return bisect::cli::cmd_trace(o, std::cout, std::cerr);
}
