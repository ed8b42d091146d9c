#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "toeplitz_forge/blocks.hpp"
#include "toeplitz_forge/interval.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/theta.hpp"

namespace toeplitz_forge {

// A letter-valued array on Z^d together with the nested level domains that describe it.
class ArraySource {
 public:
  virtual ~ArraySource() = default;
  virtual std::uint64_t alphabet_size() const = 0;
  virtual const DomainFamily& family() const = 0;
  virtual Letter eval(const LatticeVector& g, EvalCache* cache) const = 0;
  // Membership of g in the periodic part of level n given by the θ formula.
  virtual bool periodic(const LatticeVector& g, int n) const = 0;
  virtual int depth_budget() const { return kDefaultDepthBudget; }
};

// The array x of a construction.
class ConstructionSource final : public ArraySource {
 public:
  ConstructionSource(std::shared_ptr<const Construction> construction,
                     std::shared_ptr<const ConstructionPlan> plan = nullptr);

  std::uint64_t alphabet_size() const override { return construction_->alphabet_size(); }
  const DomainFamily& family() const override { return construction_->family(); }
  Letter eval(const LatticeVector& g, EvalCache* cache) const override;
  bool periodic(const LatticeVector& g, int n) const override;
  int depth_budget() const override { return construction_->depth_budget(); }

  const Construction& construction() const { return *construction_; }
  // Null for constructions built without a plan.
  const ConstructionPlan* plan() const { return plan_.get(); }

 private:
  std::shared_ptr<const Construction> construction_;
  std::shared_ptr<const ConstructionPlan> plan_;
};

// An array given by a function, analysed through a caller-supplied period structure.
class FunctionSource final : public ArraySource {
 public:
  FunctionSource(std::uint64_t alphabet_size, DomainFamily family,
                 std::function<Letter(const LatticeVector&)> fn);

  std::uint64_t alphabet_size() const override { return alphabet_size_; }
  const DomainFamily& family() const override { return family_; }
  Letter eval(const LatticeVector& g, EvalCache* cache) const override;
  bool periodic(const LatticeVector& g, int n) const override;

 private:
  std::uint64_t alphabet_size_;
  DomainFamily family_;
  std::function<Letter(const LatticeVector&)> fn_;
};

// Translate g·x of a source array, evaluated as (g·x)(h) = x(h + g).
class ArrayHandle {
 public:
  ArrayHandle() = default;
  explicit ArrayHandle(std::shared_ptr<const ArraySource> source, LatticeVector translation = {});
  // The construction of a plan, substituted when the plan carries a substitution.
  static ArrayHandle from_plan(const ConstructionPlan& plan, int depth_budget = kDefaultDepthBudget);

  const ArraySource& source() const { return *source_; }
  const std::shared_ptr<const ArraySource>& source_ptr() const { return source_; }
  const LatticeVector& translation() const { return translation_; }
  // g·(this array).
  ArrayHandle translated(const LatticeVector& g) const;

  std::uint64_t alphabet_size() const { return source_->alphabet_size(); }
  const DomainFamily& family() const { return source_->family(); }
  std::size_t dim() const { return source_->family().dim(); }
  Letter operator()(const LatticeVector& g, EvalCache* cache = nullptr) const;

  // Non-null when the source is a plain construction.
  const ConstructionSource* construction_source() const;

 private:
  std::shared_ptr<const ArraySource> source_;
  LatticeVector translation_;
};

// Injective map from Σ_K letters to blocks over Σ_k on the cube F = [0, side)^d, cells in
// lexicographic order. The image of 0 is 0 at the origin and 1 elsewhere.
class SubstitutionMap {
 public:
  // Base-k digit expansion, first cell most significant, with the letter whose expansion is
  // the pinned block swapped to the expansion of 0.
  static SubstitutionMap canonical(std::uint64_t base_alphabet, std::uint64_t side, std::size_t dim);
  // Explicit table indexed [letter][cell]; validated for bijectivity and pinning.
  static SubstitutionMap from_table(std::uint64_t base_alphabet, std::uint64_t side, std::size_t dim,
                                    std::vector<std::vector<Letter>> table);

  std::uint64_t base_alphabet() const { return base_; }
  std::uint64_t side() const { return side_; }
  std::size_t dim() const { return dim_; }
  std::uint64_t cells() const { return cells_; }
  std::uint64_t source_alphabet() const { return source_alphabet_; }
  FundamentalDomain shape() const;
  // [S(letter)](cell), cell the lexicographic offset in F.
  Letter image(Letter letter, std::uint64_t cell) const;
  std::vector<Letter> block(Letter letter) const;

 private:
  std::uint64_t base_ = 0;
  std::uint64_t side_ = 0;
  std::size_t dim_ = 0;
  std::uint64_t cells_ = 0;
  std::uint64_t source_alphabet_ = 0;
  Letter pinned_partner_ = 0;  // letter whose canonical expansion is the pinned block
  std::vector<std::vector<Letter>> table_;  // empty for the canonical rule
};

// The array y^S with y^S(f + side·γ) = [S(y(γ))](f) over the family F_n = F + side·D_n,
// indexed from −1 with F_{−1} = {0}.
class SubstitutedSource final : public ArraySource {
 public:
  SubstitutedSource(ArrayHandle source, SubstitutionMap map);

  std::uint64_t alphabet_size() const override { return map_.base_alphabet(); }
  const DomainFamily& family() const override { return family_; }
  Letter eval(const LatticeVector& g, EvalCache* cache) const override;
  // Some θ_i(g) = 0 with 1 ≤ i ≤ n.
  bool periodic(const LatticeVector& g, int n) const override;
  int depth_budget() const override { return source_.source().depth_budget(); }

  const ArrayHandle& inner() const { return source_; }
  const SubstitutionMap& map() const { return map_; }
  // Splits g = f + side·γ with f ∈ F.
  std::pair<LatticeVector, LatticeVector> split(const LatticeVector& g) const;

 private:
  ArrayHandle source_;
  SubstitutionMap map_;
  DomainFamily family_;
};

ArrayHandle substitute(const ArrayHandle& handle, SubstitutionMap map);

// x(g) = C_{n−1}^{(1)}(ψ_{n−1}(g)) for the least n with θ_n(g) = 0.
Letter x_eval(const Construction& construction, const LatticeVector& g, EvalCache* cache = nullptr);
Letter x_eval(const ArrayHandle& handle, const LatticeVector& g);

struct PatchOptions {
  std::uint64_t cell_budget = kDefaultCellBudget;
  unsigned threads = 1;
};

// Dense letters over box; the result does not depend on the thread count.
Patch patch(const ArrayHandle& handle, const FundamentalDomain& box, const PatchOptions& options = {});

// g ∈ Per(handle, Γ_n).
bool per_membership(const ArrayHandle& handle, const LatticeVector& g, int n);

// γ ∈ Γ_n with x(g + γ) = alpha for a plain construction; requires θ_i(g) ≠ 0 for i ≤ n and
// alpha ≠ 0. The result is verified before it is returned.
LatticeVector aperiodicity_witness(const ArrayHandle& handle, const LatticeVector& g, int n, Letter alpha);

// Two points of g + Γ_n carrying different letters.
struct NonPeriodicity {
  LatticeVector first;   // γ ∈ Γ_n
  LatticeVector second;  // γ′ ∈ Γ_n
  Letter first_letter = 0;
  Letter second_letter = 0;
};

// Certifies g ∉ Per(handle, Γ_n); nullopt when no witness is available.
std::optional<NonPeriodicity> nonperiodicity_witness(const ArrayHandle& handle, const LatticeVector& g,
                                                     int n);

struct EssentialCheck {
  Verdict verdict = Verdict::kMaybe;
  bool trivial = false;  // h ∈ Γ_n
  LatticeVector witness;  // g ∈ Per(Γ_n, alpha) with g + h ∉ Per(Γ_n, alpha)
  Letter alpha = 0;
  Letter shifted_letter = 0;  // value at g + h when it is periodic
  std::optional<NonPeriodicity> shifted_evidence;
  std::string detail;
};

// Refutes Per(Γ_n, α) ⊆ Per(Γ_n, α) − h for h ∉ Γ_n by a concrete witness.
EssentialCheck essential_period_check(const ArrayHandle& handle, int n, const LatticeVector& h);

// Block volume s = side^d for the Σ_{k^s} construction behind a target entropy over Σ_k.
struct BlockSizeChoice {
  std::uint64_t side = 0;
  std::uint64_t size = 0;
  std::uint64_t alphabet = 0;  // k^s
  Interval bound;             // certified lower bound for the entropy of Σ_{k^s} constructions
};

// Least s = t^d with k^s ≥ 5, s(log k − h) ≥ 5 and s·h certifiably below the bound.
BlockSizeChoice choose_block_size(std::uint64_t k, std::size_t d, const Rational& h,
                                  const PlannerOptions& options = {});

struct SmallAlphabetResult {
  BlockSizeChoice choice;
  ConstructionPlan plan;  // Σ_{k^s} plan at entropy s·h carrying the substitution
  ArrayHandle handle;     // the substituted array over Σ_k
};

SmallAlphabetResult small_alphabet_pipeline(std::uint64_t k, std::size_t d, const Rational& h,
                                  const PlannerOptions& options = {});

// Small exact plans used as oracles.
std::vector<std::string> toy_preset_names();
ConstructionPlan toy_preset(const std::string& name);

// Patch export. Text: header "d n_rows n_cols origin..." then one row per line; rows run
// over all axes but the last, columns over the last axis.
void write_patch_text(std::ostream& out, const Patch& p);
Patch read_patch_text(std::istream& in);
// Binary PGM (P5) with maxval alphabet_size − 1; two-byte big-endian samples above 255.
void write_patch_pgm(std::ostream& out, const Patch& p, std::uint64_t alphabet_size);

}  // namespace toeplitz_forge
