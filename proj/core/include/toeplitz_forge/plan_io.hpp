#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "toeplitz_forge/planner.hpp"

namespace toeplitz_forge {

inline constexpr const char* kPlanFormat = "toeplitz-forge-plan 1";

// Key-value text, one "key = value" per line. Exact integers are decimal; symbolic values
// are "log [lo, hi]" with dyadic endpoints "m*2^e".
void write_plan(std::ostream& out, const ConstructionPlan& plan);
std::string plan_to_string(const ConstructionPlan& plan);
ConstructionPlan read_plan(std::istream& in);
ConstructionPlan plan_from_string(const std::string& text);

std::string magnitude_to_text(const Magnitude& m);
Magnitude magnitude_from_text(const std::string& text);

struct PlanCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Re-certifies the stored values and, in theorem mode, compares them with a fresh plan for
// the same parameters.
std::vector<PlanCheck> verify_plan(const ConstructionPlan& plan);

// Human-readable certificate listing.
std::string certification_report(const ConstructionPlan& plan);

}  // namespace toeplitz_forge
