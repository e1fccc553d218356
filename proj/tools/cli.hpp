#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "json_io.hpp"

namespace loopgrad::cli {

struct JobSpec {
  std::string command;  // algebra | loop | grading | normalize | classify | selfcheck
  std::string action;   // loop: validate | bracket; grading: verify
  std::string input;
  std::string output;
  std::optional<double> tol;
  std::optional<int> window;
  int steps = 4096;
  std::uint64_t seed = 1;
  std::string algebra = "A1";
  int order = 1;
  int twist = 1;
};

struct RunResult {
  int exit_code = 0;
  io::json report;
  std::string table;  // human-readable summary, may be empty
};

/// LOOPGRAD_TOL if set and positive, else fallback.
double default_tolerance(double fallback);

/// Exit codes: 0 success, 2 mathematical rejection, 1 I/O or numerical failure.
RunResult run(const JobSpec& job);

/// The invariant suite behind `selfcheck`; contains no timings.
io::json selfcheck_report(std::uint64_t seed);

int main(int argc, char** argv);

}  // namespace loopgrad::cli
