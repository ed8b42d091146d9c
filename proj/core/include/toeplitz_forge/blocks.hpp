#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "toeplitz_forge/lattice.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/theta.hpp"

namespace toeplitz_forge {

inline constexpr std::size_t kLehmerTailLimit = 4096;
inline constexpr std::uint64_t kDefaultCellBudget = 10000000;

// Permutation of {0, …, size−1} with the given lexicographic rank. Only the trailing L
// positions move, where L is the least integer with L! > rank.
class LehmerPermutation {
 public:
  LehmerPermutation(const Integer& rank, const Integer& size);

  const Integer& rank() const { return rank_; }
  const Integer& size() const { return size_; }
  Integer operator()(const Integer& position) const;
  Integer inverse(const Integer& value) const;

 private:
  Integer rank_;
  Integer size_;
  Integer offset_;
  std::vector<std::uint32_t> tail_;
  std::vector<std::uint32_t> inverse_tail_;
};

// Lexicographic rank of a permutation of {0, …, n−1}.
Integer lehmer_rank(const std::vector<std::uint64_t>& perm);

// Memo of unranked permutations, keyed by (level, index); one per evaluation batch.
class EvalCache {
 public:
  const LehmerPermutation& permutation(int level, const Integer& index, const Integer& rank,
                                       const Integer& size);

 private:
  std::map<std::pair<int, std::string>, std::unique_ptr<LehmerPermutation>> perms_;
};

// S_n: q_n bijections from the nonzero ranks 1..m of D_n ∩ Γ_{n−1} onto {2, …, m+1},
// m = q_{n−1} − 1. Index 1 is always the order-preserving base r ↦ r+1.
class PermutationFamily {
 public:
  static PermutationFamily full_symmetric(int level, const Integer& m);
  static PermutationFamily hybrid(int level, const Integer& m, const Magnitude& size);
  // lists[j−1][r−1] = σ_j(r); validated as distinct bijections with the base first.
  static PermutationFamily explicit_lists(int level, const Integer& m,
                                          std::vector<std::vector<std::uint64_t>> lists);
  // Only the base index, for the level above the last planned family.
  static PermutationFamily base_only(int level, const Integer& m);

  int level() const { return level_; }
  FamilyKind kind() const { return kind_; }
  bool base_only() const { return base_only_; }
  const Magnitude& size() const { return size_; }
  const Integer& domain_size() const { return m_; }
  bool has_index(const Integer& j) const;

  // σ_j(r) for 1 ≤ r ≤ m.
  Integer eval(const Integer& j, const Integer& r, EvalCache* cache = nullptr) const;
  // An index j with σ_j(r) = target, at least 2 when require_nonbase.
  std::optional<Integer> index_for(const Integer& r, const Integer& target,
                                   bool require_nonbase) const;

  struct Coverage {
    bool passed = false;
    std::string method;
    std::optional<std::pair<Integer, Integer>> missing;  // (rank, target)
  };
  // Every (rank, target) pair is realized by a member other than the base index.
  Coverage coverage() const;

 private:
  int level_ = 0;
  FamilyKind kind_ = FamilyKind::kFullSymmetric;
  bool base_only_ = false;
  Integer m_;
  Magnitude size_;
  std::vector<std::vector<std::uint64_t>> lists_;
};

// Dense letters over a box, row-major with the last axis fastest.
struct Patch {
  FundamentalDomain box;
  std::vector<Letter> letters;

  Letter at(const LatticeVector& g) const;
  friend bool operator==(const Patch& a, const Patch& b) {
    return a.box == b.box && a.letters == b.letters;
  }
};

// The block hierarchy C_n^{(j)} over a domain family.
class Construction {
 public:
  Construction(std::uint64_t alphabet_size, DomainFamily family, std::vector<Magnitude> block_count,
               std::vector<PermutationFamily> families);
  static std::shared_ptr<const Construction> from_plan(const ConstructionPlan& plan);

  std::uint64_t alphabet_size() const { return alphabet_size_; }
  const DomainFamily& family() const { return family_; }
  // Number of planned families; the level above carries only the base index.
  int levels() const { return static_cast<int>(families_.size()) - 1; }
  const Magnitude& block_count(int n) const { return block_count_.at(static_cast<std::size_t>(n)); }
  const PermutationFamily& permutations(int n) const;
  const LevelGrid& grid(int n) const;
  int depth_budget() const { return depth_budget_; }
  void set_depth_budget(int budget) { depth_budget_ = budget; }

  Integer domain_rank(int n, const LatticeVector& gamma) const { return grid(n).rank(gamma); }
  LatticeVector domain_unrank(int n, const Integer& rank) const { return grid(n).unrank(rank); }
  Integer sigma_eval(int n, const Integer& j, const LatticeVector& gamma,
                     EvalCache* cache = nullptr) const;

  // C_n^{(j)}(h) for h ∈ D_n.
  Letter block_eval(int n, const Integer& j, const LatticeVector& h, EvalCache* cache = nullptr) const;
  Patch materialize(int n, const Integer& j, std::uint64_t cell_budget = kDefaultCellBudget) const;

 private:
  std::uint64_t alphabet_size_;
  DomainFamily family_;
  std::vector<Magnitude> block_count_;
  std::vector<PermutationFamily> families_;  // families_[n−1] = S_n
  std::vector<std::optional<LevelGrid>> grids_;
  int depth_budget_ = kDefaultDepthBudget;
};

}  // namespace toeplitz_forge
