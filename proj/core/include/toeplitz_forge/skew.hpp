#pragma once

#include <optional>
#include <string>
#include <vector>

#include "toeplitz_forge/analysis.hpp"
#include "toeplitz_forge/interval.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace toeplitz_forge {

// Residues ψ_n(g) of one group element, levels first_index..depth.
struct OdometerCoordinate {
  int first_index = 0;
  std::vector<LatticeVector> residues;

  static OdometerCoordinate of(const DomainFamily& family, const LatticeVector& g, int depth);
  const LatticeVector& at(int n) const;
  // Each residue is the reduction of the next one.
  bool compatible(const DomainFamily& family) const;
};

// π_t of a translate g·x: the representative ψ_t(g).
LatticeVector pi_t(const ArrayHandle& handle, int t);

// Checks Per(y, Γ_t, α) = Per(x, Γ_t, α) − π_t(y) cell by cell on window.
bool verify_pi_t(const ArrayHandle& handle, int t, const FundamentalDomain& window);

// P_t^{-1}(−ψ_t(g + h) + g + ψ_t(h)).
LatticeVector epsilon_t(const DomainFamily& family, const LatticeVector& g, const LatticeVector& h, int t);

// The D_t-block d ↦ y(d + γ − π_t(y)) for γ ∈ Γ_t.
SymbolBlock w_t(const ArrayHandle& handle, const LatticeVector& gamma, int t);

// y^{(t)}(g): census index of w_t(handle, P_t g).
std::size_t derived_array_eval(const ArrayHandle& handle, int t, const LatticeVector& g, const Census& census);

struct SkewCheck {
  Verdict verdict = Verdict::kMaybe;
  bool first_coordinate = false;  // π_t(g·y) ≡ g + π_t(y) mod Γ_t
  LatticeVector carry;            // ε_t(g, π_t(y))
  std::size_t cells = 0;
  std::optional<LatticeVector> mismatch;
  std::string detail;
};

// (g·y)^{(t)}(h) = y^{(t)}(h + ε_t(g, π_t(y))) for every h in window, plus the first coordinate.
SkewCheck skew_equivariance_check(const ArrayHandle& handle, const LatticeVector& g, int t,
                                  const FundamentalDomain& window, const Census& census);

}  // namespace toeplitz_forge
