#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace phraseprobe {

/// Exit statuses of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitRuntimeError = 1, kExitUsage = 2 };

/// Settings shared by the subcommands. Each subcommand binds the fields it uses.
struct RunConfig {
  std::string source;
  std::string target;
  std::string alignment;
  std::string mask;
  std::string output;
  std::string output_dir;
  int max_phrase_length = 7;
  std::uint64_t min_count = 2;
  std::string heuristic = "grow-diag-final";
  int iterations = 5;
  std::size_t beam_width = 16;
  double word_penalty = 0.0;
  unsigned threads = 0;
  std::uint64_t seed = 0;

  /// Range checks, run before any input file is opened.
  void validate() const;
};

/// Parses argv (argv[0] is the program name), runs one subcommand and returns its exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phraseprobe
