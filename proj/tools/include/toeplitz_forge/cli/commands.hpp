#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "toeplitz_forge/blocks.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/theta.hpp"

namespace toeplitz_forge::cli {

enum ExitCode : int {
  kExitOk = 0,
  kExitInfeasible = 2,
  kExitBudget = 3,
  kExitVerification = 4,
  kExitFormat = 5,
};

enum class OutputFormat { kText, kPgm, kRecords };

struct RunConfig {
  std::string command;

  // Plan source: a plan file, a toy preset, or (k, d, h) for the planning commands.
  std::string plan_path;
  std::string toy_preset;
  std::optional<std::uint64_t> k;
  std::optional<std::size_t> d;
  std::string h;  // decimal or p/q, parsed exactly
  std::optional<long> tail_base;
  std::optional<int> tail_start;
  std::optional<int> lambda_iterations;

  int depth_budget = kDefaultDepthBudget;
  std::size_t digit_budget = kDefaultDigitBudget;
  std::uint64_t cell_budget = kDefaultCellBudget;
  int symbolic_levels = kDefaultSymbolicLevels;
  std::uint64_t seed = 1;
  std::size_t samples = 50;
  unsigned threads = 1;

  std::string box;    // "x0,y0:w,h"
  std::optional<int> level;
  std::optional<int> window_level;
  std::string point;  // "a,b"
  bool frequencies = false;

  std::optional<OutputFormat> format;
  std::string out;     // primary output; stdout when empty
  std::string report;  // plan report; stderr when empty
};

// Runs one command; never throws. Errors become an error record on err and a nonzero code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Parses argv into a RunConfig and runs it.
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// "x0,y0:w,h" as a box of the given dimension.
FundamentalDomain parse_box(const std::string& text, std::size_t dim);

}  // namespace toeplitz_forge::cli
