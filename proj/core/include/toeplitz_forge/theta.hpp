#pragma once

#include <vector>

#include "toeplitz_forge/lattice.hpp"

namespace toeplitz_forge {

inline constexpr int kDefaultDepthBudget = 64;

// θ_i(g) for i = first_index+1 .. depth; components beyond depth are zero.
struct ThetaDecomposition {
  int first_index = 0;  // index of the trivial level; components start at first_index+1
  int depth = 0;        // smallest level containing g
  std::vector<LatticeVector> components;

  // θ_i(g), zero for i > depth.
  LatticeVector component(int i) const;
  LatticeVector sum() const;
};

// θ_i(g) = ψ_i(g) − ψ_{i−1}(g).
LatticeVector theta(const DomainFamily& family, int i, const LatticeVector& g);

ThetaDecomposition decompose(const DomainFamily& family, const LatticeVector& g,
                             int depth_budget = kDefaultDepthBudget);

// Smallest i > first_index with θ_i(g) = 0.
int min_zero_level(const DomainFamily& family, const LatticeVector& g,
                   int depth_budget = kDefaultDepthBudget);

// True iff θ_i(g) = 0 for some i in 1..n.
bool has_zero_component(const DomainFamily& family, const LatticeVector& g, int n,
                        int depth_budget = kDefaultDepthBudget);

// Lexicographic indexing of the grid D_n ∩ Γ_{n−1} (axis 1 most significant).
class LevelGrid {
 public:
  LevelGrid(const DomainFamily& family, int n);

  int level() const { return n_; }
  const Integer& size() const { return size_; }
  bool contains(const LatticeVector& gamma) const;
  // 0-based lexicographic position of gamma.
  Integer rank0(const LatticeVector& gamma) const;
  LatticeVector point0(const Integer& rank) const;
  // Position of the origin.
  const Integer& zero_rank0() const { return zero_rank_; }
  // 1-based rank among the nonzero points.
  Integer rank(const LatticeVector& gamma) const;
  LatticeVector unrank(const Integer& rank) const;
  // Least nonzero point in lexicographic order.
  LatticeVector least_nonzero() const;

 private:
  int n_;
  std::vector<Integer> step_;   // P_{n−1} diagonal
  std::vector<Integer> first_;  // first multiplier per axis
  std::vector<Integer> count_;  // grid points per axis
  Integer size_;
  Integer zero_rank_;
};

// Witness g for h with θ_i(g) = 0 exactly where θ_i(h) ≠ 0 over i ∈ indices; the other
// components are lexicographically least nonzero grid points. Throws InvalidArgument when
// θ_i(h) = 0 on all of indices.
LatticeVector essential_witness(const DomainFamily& family, const LatticeVector& h,
                                const std::vector<int>& indices,
                                int depth_budget = kDefaultDepthBudget);

}  // namespace toeplitz_forge
