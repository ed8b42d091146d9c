#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "toeplitz_forge/numeric.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace toeplitz_forge {

// Letters of a block on D_t, row-major with the last axis fastest.
struct SymbolBlock {
  int level = 0;
  FundamentalDomain domain;
  std::vector<Letter> letters;

  friend bool operator==(const SymbolBlock& a, const SymbolBlock& b) {
    return a.level == b.level && a.domain == b.domain && a.letters == b.letters;
  }
};

// The grid D_s ∩ Γ_t in lexicographic order (axis 1 most significant).
std::vector<LatticeVector> aligned_positions(const DomainFamily& family, int t, int s);

// handle restricted to D_t + offset.
SymbolBlock read_block(const ArrayHandle& handle, int t, const LatticeVector& offset);

// Distinct D_t-symbols in first-occurrence order of a lexicographic sweep.
class Census {
 public:
  Census(int level, FundamentalDomain domain) : level_(level), domain_(std::move(domain)) {}

  int level() const { return level_; }
  const FundamentalDomain& domain() const { return domain_; }
  int window_level() const { return window_level_; }
  const Integer& positions() const { return positions_; }
  const std::vector<SymbolBlock>& blocks() const { return blocks_; }
  std::size_t size() const { return blocks_.size(); }
  std::optional<std::size_t> index_of(const std::vector<Letter>& letters) const;
  // Returns the index of letters, adding it when new.
  std::size_t add(std::vector<Letter> letters);

  void set_window(int level, Integer positions) {
    window_level_ = level;
    positions_ = std::move(positions);
  }

 private:
  int level_;
  FundamentalDomain domain_;
  int window_level_ = 0;
  Integer positions_;
  std::vector<SymbolBlock> blocks_;
  std::map<std::vector<Letter>, std::size_t> index_;
};

struct CensusOptions {
  std::uint64_t cell_budget = kDefaultCellBudget;
  unsigned threads = 1;
  // Window level; defaults to the largest of t+2, t+1 that fits the budget.
  std::optional<int> window_level;
};

// Scan census: blocks handle(d + γ − ψ_t(translation)), d ∈ D_t, over γ ∈ D_w ∩ Γ_t.
Census census(const ArrayHandle& handle, int t, const CensusOptions& options = {});

// Certified #W_{D_t}: q_t of the plan behind the handle, unchanged by substitution.
Magnitude census_count(const ArrayHandle& handle, int t);

// Fraction of the positions γ ∈ D_s ∩ Γ_t with C|_{D_t+γ} = B.
Rational ap(const DomainFamily& family, const SymbolBlock& B, const SymbolBlock& C);

struct FrequencyReport {
  int t = 0;
  int s = 0;
  std::vector<SymbolBlock> rows;     // B
  std::vector<SymbolBlock> columns;  // C
  std::vector<LatticeVector> column_positions;
  std::vector<std::vector<Rational>> table;  // [row][column]
  Rational min;
  Rational max;
  bool passed = false;
  // Row and two columns with different frequencies.
  std::optional<std::array<std::size_t, 3>> witness;
};

FrequencyReport frequency_table(const DomainFamily& family, std::vector<SymbolBlock> rows,
                                std::vector<SymbolBlock> columns);

struct ProbeOptions {
  std::size_t samples = 50;
  std::uint64_t seed = 1;
  CensusOptions census;
};

// ap(B, C) for every B in the level-t census and C = handle|_{D_{t+1}+γ} at sampled
// γ ∈ D_{t+2} ∩ Γ_{t+1}; passes iff every row is constant.
FrequencyReport unique_ergodicity_probe(const ArrayHandle& handle, int t, const ProbeOptions& options = {});

// log(q_n)/p_n with its bracket; substituted handles scale by 1/#F.
std::vector<EntropyEstimate> handle_entropy_estimates(const ArrayHandle& handle);

// (1/#D_n) #{h ∈ D_n + g : handle(h + m) = A(m) for all m in the box of A}.
Rational birkhoff(const ArrayHandle& handle, const Patch& A, const LatticeVector& g, int n,
                  std::uint64_t cell_budget = kDefaultCellBudget);

// Share of γ ∈ I_{t,n}(g) with handle|_{D_t+γ} = B.
Rational psi_quantity(const ArrayHandle& handle, int t, int n, const SymbolBlock& B, const LatticeVector& g,
                      std::uint64_t cell_budget = kDefaultCellBudget);

// B^S on F_t = F + side·D_t, read from the family of the substituted array.
SymbolBlock substitute_block(const SubstitutionMap& map, const DomainFamily& substituted, const SymbolBlock& B);

}  // namespace toeplitz_forge
