#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <optional>
#include <string>
#include <vector>

#include "toeplitz_forge/numeric.hpp"

namespace toeplitz_forge {

class LatticeVector {
 public:
  LatticeVector() = default;
  explicit LatticeVector(std::size_t dim) : c_(dim, Integer(0)) {}
  LatticeVector(std::initializer_list<long> coords);
  explicit LatticeVector(std::vector<Integer> coords) : c_(std::move(coords)) {}

  std::size_t dim() const { return c_.size(); }
  Integer& operator[](std::size_t i) { return c_[i]; }
  const Integer& operator[](std::size_t i) const { return c_[i]; }
  const std::vector<Integer>& coords() const { return c_; }
  bool is_zero() const;

  LatticeVector& operator+=(const LatticeVector& o);
  LatticeVector& operator-=(const LatticeVector& o);
  friend LatticeVector operator+(LatticeVector a, const LatticeVector& b) { return a += b; }
  friend LatticeVector operator-(LatticeVector a, const LatticeVector& b) { return a -= b; }
  LatticeVector operator-() const;

  friend bool operator==(const LatticeVector& a, const LatticeVector& b);
  // Lexicographic, first coordinate most significant.
  friend bool operator<(const LatticeVector& a, const LatticeVector& b);

  std::string str() const;
  static LatticeVector parse(const std::string& text);

 private:
  std::vector<Integer> c_;
};

struct LatticeVectorHash {
  std::size_t operator()(const LatticeVector& v) const;
};

class DiagonalMatrix {
 public:
  DiagonalMatrix() = default;
  explicit DiagonalMatrix(std::vector<Integer> diag);
  DiagonalMatrix(std::initializer_list<long> diag);
  static DiagonalMatrix identity(std::size_t dim);
  static DiagonalMatrix scalar(std::size_t dim, const Integer& v);

  std::size_t dim() const { return diag_.size(); }
  const Integer& operator[](std::size_t i) const { return diag_[i]; }
  const std::vector<Integer>& diag() const { return diag_; }
  Integer determinant() const;

  friend DiagonalMatrix operator*(const DiagonalMatrix& a, const DiagonalMatrix& b);
  LatticeVector apply(const LatticeVector& v) const;
  // Exact inverse application; throws InvalidArgument if v is not in the image lattice.
  LatticeVector solve(const LatticeVector& v) const;
  bool divides(const LatticeVector& v) const;
  friend bool operator==(const DiagonalMatrix& a, const DiagonalMatrix& b) {
    return a.diag_ == b.diag_;
  }
  std::string str() const;

 private:
  std::vector<Integer> diag_;
};

// Scale matrices P_0 = I, P_{n+1} = P_n * Q_n from the increments Q_0, Q_1, ...
class DiagonalScale {
 public:
  DiagonalScale() = default;
  explicit DiagonalScale(std::vector<DiagonalMatrix> increments);

  std::size_t dim() const { return scales_.front().dim(); }
  // Number of scale matrices, i.e. increments().size() + 1.
  std::size_t size() const { return scales_.size(); }
  const DiagonalMatrix& scale(std::size_t n) const { return scales_.at(n); }
  const DiagonalMatrix& increment(std::size_t n) const { return increments_.at(n); }
  const std::vector<DiagonalMatrix>& increments() const { return increments_; }
  // Smallest diagonal entry of P_n.
  Integer min_entry(std::size_t n) const;

 private:
  std::vector<DiagonalMatrix> increments_;
  std::vector<DiagonalMatrix> scales_;
};

// Axis-aligned box {lower + z : 0 ≤ z_i < sides_i}.
class FundamentalDomain {
 public:
  FundamentalDomain() = default;
  FundamentalDomain(int level, LatticeVector lower, std::vector<Integer> sides);

  int level() const { return level_; }
  std::size_t dim() const { return lower_.dim(); }
  const LatticeVector& lower() const { return lower_; }
  const std::vector<Integer>& sides() const { return sides_; }
  LatticeVector upper_inclusive() const;
  Integer cardinality() const;
  bool contains(const LatticeVector& g) const;
  // Representative of g modulo sides_i on each axis.
  LatticeVector reduce(const LatticeVector& g) const;
  FundamentalDomain translated(const LatticeVector& g) const;
  // Row-major offset of g with the last axis fastest.
  Integer offset_of(const LatticeVector& g) const;
  LatticeVector point_at(Integer offset) const;
  void for_each_point(const std::function<void(const LatticeVector&)>& fn) const;
  std::string str() const;
  friend bool operator==(const FundamentalDomain& a, const FundamentalDomain& b) {
    return a.lower_ == b.lower_ && a.sides_ == b.sides_;
  }

 private:
  int level_ = 0;
  LatticeVector lower_;
  std::vector<Integer> sides_;
};

// ψ_t: the representative of g + P_t Z^d inside the domain.
LatticeVector coset_project(const LatticeVector& g, const FundamentalDomain& domain);

// D_1..D_{n_max} with offsets s_{n+1} = P_n r_n + s_n, (r_n)_i = ⌊(Q_n)_ii / 4⌋ for
// n ≥ shift_from and r_n = 0 below. Element 0 of the result is D_0 = {0}.
std::vector<FundamentalDomain> shifted_domains(const DiagonalScale& scale, int n_max,
                                               int shift_from = 1);

// Domains with caller-chosen lower corners; lowers[n-1] is the corner of D_n.
std::vector<FundamentalDomain> explicit_domains(const DiagonalScale& scale,
                                                const std::vector<LatticeVector>& lowers);

// ∂_K(F) = {g : -K + g meets both F and its complement}.
std::vector<LatticeVector> k_boundary(const std::vector<LatticeVector>& K,
                                      const FundamentalDomain& F);
// Cardinality of ∂_K(F) by inclusion-exclusion over translated boxes; |K| ≤ 20.
Integer k_boundary_size(const std::vector<LatticeVector>& K, const FundamentalDomain& F);

// Per-axis extent of one level. Symbolic axes only certify that every coordinate c
// with |c| < 2^radius_bits lies inside.
struct AxisSpan {
  bool exact = true;
  Integer period;
  Integer lower;
  std::uint64_t radius_bits = 0;
};

struct LevelGeometry {
  std::vector<AxisSpan> axes;
  bool exact() const;
};

// Nested family of box domains indexed first_index, first_index+1, ...; the entry at
// first_index is the trivial domain {0} with period 1.
class DomainFamily {
 public:
  DomainFamily() = default;
  DomainFamily(std::size_t dim, int first_index, std::vector<LevelGeometry> levels);
  static DomainFamily from_domains(const std::vector<FundamentalDomain>& domains);

  std::size_t dim() const { return dim_; }
  int first_index() const { return first_; }
  int last_index() const { return first_ + static_cast<int>(levels_.size()) - 1; }
  bool has_level(int n) const { return n >= first_ && n <= last_index(); }
  const LevelGeometry& level(int n) const;
  bool is_exact(int n) const;

  // Exact box of level n; DepthBudgetExceeded if symbolic.
  FundamentalDomain domain(int n) const;
  DiagonalMatrix period(int n) const;
  // true/false when decidable, nullopt when a symbolic axis cannot decide.
  std::optional<bool> contains(int n, const LatticeVector& g) const;
  // Smallest level containing g, scanning up to max_level; DepthBudgetExceeded if none.
  int containing_level(const LatticeVector& g, int max_level) const;
  // ψ_n(g).
  LatticeVector project(int n, const LatticeVector& g) const;
  // #(D_n ∩ Γ_t) for t ≤ n, both exact.
  Integer grid_count(int t, int n) const;
  // I_{t,n}(g) as a box of multipliers z with γ = P_t z, plus #R_{t,n}(g).
  struct InteriorRest {
    LatticeVector first;            // smallest γ in I
    std::vector<Integer> counts;    // number of Γ_t points per axis
    Integer interior_size;
    Integer rest_size;
  };
  InteriorRest interior_rest(int t, int n, const LatticeVector& g) const;
  // Exact levels of the family below the first symbolic one.
  int exact_prefix_end() const;

 private:
  std::size_t dim_ = 0;
  int first_ = 0;
  std::vector<LevelGeometry> levels_;
};

// Enumerates the Γ_t-points of an InteriorRest box.
void for_each_interior_point(const DomainFamily& family, int t,
                             const DomainFamily::InteriorRest& ir,
                             const std::function<void(const LatticeVector&)>& fn);

}  // namespace toeplitz_forge
