#pragma once

#include <vector>

#include "toeplitz_forge/lattice.hpp"

namespace toeplitz_forge::testing {

// Four nested levels with P_1 = (2,2), P_2 = (4,6), P_3 = (8,12), P_4 = (24,24) and corners
// (0,−1), (−2,−3), (−2,−9), (−10,−9).
inline DomainFamily four_level_family() {
  DiagonalScale scale({DiagonalMatrix{2, 2}, DiagonalMatrix{2, 3}, DiagonalMatrix{2, 2}, DiagonalMatrix{3, 2}});
  return DomainFamily::from_domains(explicit_domains(
      scale, {LatticeVector{0, -1}, LatticeVector{-2, -3}, LatticeVector{-2, -9}, LatticeVector{-10, -9}}));
}

}  // namespace toeplitz_forge::testing
