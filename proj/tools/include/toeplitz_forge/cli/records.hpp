#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "toeplitz_forge/analysis.hpp"
#include "toeplitz_forge/lattice.hpp"
#include "toeplitz_forge/numeric.hpp"

namespace toeplitz_forge::cli {

inline constexpr const char* kRecordSchema = "toeplitz-forge/records/1";

// One JSON object per line. Integers that may exceed 64 bits are decimal strings and
// rationals are "p/q" in lowest terms.
class RecordWriter {
 public:
  explicit RecordWriter(std::ostream& out) : out_(out) {}

  void certificate(int level, const std::string& name, const std::string& verdict, const std::string& detail);
  void check(const std::string& name, bool passed, bool skipped, const std::string& detail);
  void block(const SymbolBlock& block, std::size_t index);
  void census_summary(const Census& census, const std::string& certified);
  void frequency(int t, int s, std::size_t row, std::size_t column, const LatticeVector& position,
                 const Rational& value);
  void letter(const LatticeVector& g, Letter letter, int min_zero_level);
  void patch(const Patch& p);
  void error(const std::string& kind, const std::string& message, int exit_code);
  void summary(const std::string& command, bool passed, std::size_t checks, std::size_t failed);

 private:
  std::ostream& out_;
};

}  // namespace toeplitz_forge::cli
