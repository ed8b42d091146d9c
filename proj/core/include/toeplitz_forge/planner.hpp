#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "toeplitz_forge/interval.hpp"
#include "toeplitz_forge/lattice.hpp"

namespace toeplitz_forge {

inline constexpr std::size_t kDefaultDigitBudget = 1000000;
inline constexpr int kDefaultSymbolicLevels = 1;

// A positive integer known exactly or only through a rigorous enclosure of its log.
struct Magnitude {
  std::optional<Integer> exact;
  Interval log;

  static Magnitude of(const Integer& v);
  static Magnitude symbolic(const Interval& log_value);
  bool is_exact() const { return exact.has_value(); }
  // Enclosure of log at the current working precision.
  Interval log_enclosure() const;
  std::string str() const;
};

Magnitude operator*(const Magnitude& a, const Magnitude& b);

struct PrimeSequences {
  std::vector<Magnitude> p;  // p'_0 = 1, p'_{n+1} = p'_n q'_n
  std::vector<Magnitude> q;  // q'_0 = k, q'_{n+1} = (q'_n − 1)!
  std::vector<Interval> lambda;  // log(q'_n) / p'_n
  // Largest n with q'_n exact.
  int exact_end() const;
};

// Exact terms while (q'_n − 1)! stays within digit_budget decimal digits; later terms are
// log-enclosures as long as they stay representable, up to n_max.
PrimeSequences prime_sequences(std::uint64_t k, int n_max,
                               std::size_t digit_budget = kDefaultDigitBudget);

// Largest iteration count whose closing term q'_it is exact.
int default_lambda_iterations(std::uint64_t k, std::size_t digit_budget = kDefaultDigitBudget);

// Certified L ≤ λ(k): the best of (log q'_i − 5)/p'_i over i ≤ iterations.
Interval lambda_lower_bound(std::uint64_t k, int iterations,
                            std::size_t digit_budget = kDefaultDigitBudget);

// Least M ≥ 4 with ξ − (d+1) log ξ − 1 ≥ 0 for every ξ ≥ M.
long choose_M(std::size_t d);

// Least N with p'_{N−1} h ≥ 1, q'_{N−1} ≥ M and (d log M + 3)/p'_N < L − h.
int choose_N(std::uint64_t k, std::size_t d, const Rational& h, long M, const Interval& L,
             std::size_t digit_budget = kDefaultDigitBudget);

struct Certificate {
  int level = 0;
  std::string name;
  Verdict verdict = Verdict::kMaybe;
  std::string detail;
};

enum class PlanMode { kTheorem, kToy };
enum class FamilyKind { kFullSymmetric, kHybrid, kExplicit };
enum class OffsetMode { kShifted, kZero, kExplicit };

const char* to_string(PlanMode m);
const char* to_string(FamilyKind k);
const char* to_string(OffsetMode m);

// Substitution attached to a plan: letters of the plan alphabet become side^d blocks over
// base_alphabet letters via the canonical bijection.
struct SubstitutionSpec {
  std::uint64_t base_alphabet = 0;
  std::uint64_t side = 0;
  Rational base_entropy;
};

struct ConstructionPlan {
  PlanMode mode = PlanMode::kTheorem;
  std::uint64_t alphabet_size = 0;
  std::size_t dimension = 0;

  // Theorem mode.
  Rational entropy;
  int lambda_iterations = 0;
  Interval lambda_bound;
  long tail_base = 0;   // M
  int tail_start = 0;   // N
  std::size_t digit_budget = kDefaultDigitBudget;
  int symbolic_levels = kDefaultSymbolicLevels;

  // increments[n] is the diagonal of Q_n; block_count[n] = det Q_n = q_n.
  std::vector<std::vector<Magnitude>> increments;
  std::vector<Magnitude> block_count;
  // domain_size[n] = p_n = det P_n, one entry longer than block_count.
  std::vector<Magnitude> domain_size;

  OffsetMode offset_mode = OffsetMode::kShifted;
  int shift_from = 1;
  std::vector<LatticeVector> lowers;  // kExplicit: corner of D_n at index n−1

  // family_kinds[n−1] describes S_n for n = 1..levels(); explicit lists are 1-based targets
  // per rank, family_lists[n−1][j−1][r−1].
  std::vector<FamilyKind> family_kinds;
  std::vector<std::vector<std::vector<std::uint64_t>>> family_lists;

  std::vector<Certificate> certificates;
  std::optional<SubstitutionSpec> substitution;

  // Number of block levels with a family, i.e. the largest n with S_n planned.
  int levels() const { return static_cast<int>(block_count.size()) - 1; }
  // Largest n with q_n exact.
  int exact_levels() const;
  bool certified() const;
};

struct PlannerOptions {
  std::size_t digit_budget = kDefaultDigitBudget;
  int symbolic_levels = kDefaultSymbolicLevels;
  std::optional<int> lambda_iterations;
  std::optional<long> tail_base;
  std::optional<int> tail_start;
};

// q_{N+l}: the smallest multiple of (M+l)^d with log ≥ p_{N+l} h + 3, exact when it fits the
// digit budget and a log-enclosure otherwise.
Magnitude choose_q(const Magnitude& p, const Rational& h, long M, int l, std::size_t d,
                   std::size_t digit_budget);

ConstructionPlan plan_theorem(std::uint64_t k, std::size_t d, const Rational& h,
                              const PlannerOptions& options = {});

// Exact hand-specified plan: increments Q_0..Q_L, one family per level 1..L.
struct ToySpec {
  std::uint64_t alphabet_size = 0;
  std::size_t dimension = 0;
  std::vector<std::vector<Integer>> increments;
  OffsetMode offset_mode = OffsetMode::kZero;
  int shift_from = 1;
  std::vector<LatticeVector> lowers;
  std::vector<FamilyKind> family_kinds;
  std::vector<std::vector<std::vector<std::uint64_t>>> family_lists;
};

// Throws CertificationFailure when a structural or capacity certificate fails.
ConstructionPlan plan_toy(const ToySpec& spec);

// Re-derives every certificate from the stored values; returns them in plan order.
std::vector<Certificate> certify(const ConstructionPlan& plan);

// Exact prefix of the scale; throws DepthBudgetExceeded past the last exact increment.
DiagonalScale assemble_scale(const ConstructionPlan& plan, int levels);

// The domain family D_0..D_{levels()+1}, symbolic axes carried as certified radii.
DomainFamily build_family(const ConstructionPlan& plan);

// Least n ≥ 1 among exact levels with m | (P_n)_{axis,axis}; axis is 1-based.
std::optional<int> divisibility_witness(const ConstructionPlan& plan, const Integer& m,
                                        std::size_t axis);

// Per-level log(q_n)/p_n enclosures, scaled by 1/scale_divisor.
struct EntropyEstimate {
  int level = 0;
  Interval estimate;
  std::optional<Interval> bracket_lo;
  std::optional<Interval> bracket_hi;
  std::optional<Verdict> inside;  // set when a bracket applies
};
std::vector<EntropyEstimate> entropy_estimates(const ConstructionPlan& plan,
                                               std::uint64_t scale_divisor = 1);

}  // namespace toeplitz_forge
