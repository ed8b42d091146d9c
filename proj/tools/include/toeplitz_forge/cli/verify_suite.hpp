#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "toeplitz_forge/blocks.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/theta.hpp"

namespace toeplitz_forge::cli {

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t samples = 50;
  std::uint64_t cell_budget = kDefaultCellBudget;
  unsigned threads = 1;
  int depth_budget = kDefaultDepthBudget;
  // Points enumerated exhaustively instead of sampled when the region is at most this size.
  std::uint64_t exhaustive_limit = 4096;
};

struct SuiteCheck {
  std::string name;
  bool passed = false;
  bool skipped = false;  // out of budget; does not fail the suite
  std::string detail;
};

struct SuiteReport {
  std::vector<SuiteCheck> checks;
  // Certification failed, so no evaluation ran.
  bool stopped_at_certification = false;

  bool passed() const;
  std::size_t failures() const;
  const SuiteCheck* first_failure() const;
};

// Certificates first; evaluation checks run only on a certified plan. Every sample is
// drawn from a generator seeded by options.seed.
SuiteReport run_verify_suite(const ConstructionPlan& plan, const SuiteOptions& options = {});

}  // namespace toeplitz_forge::cli
