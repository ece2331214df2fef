#pragma once

#include <optional>
#include <ostream>
#include <string>

#include "magque/config.hpp"

namespace magque {

struct RunOptions {
  std::string out_dir;  // empty: output.dir from the config
  bool expect_pass = false;
  int threads = 1;
  bool vectors = false;
  std::string input;   // wavefunction file for ambiguity
  std::string table;   // ambiguity CSV for pair
  std::string symbol;  // symbol name for pair
};

/// Exit status: 0 success, 2 failed scientific check, 1 error.
int run(const std::string& subcommand, const RunConfig& cfg, const RunOptions& opts, std::ostream& out,
        std::ostream& err);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace magque
