#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "oracles.hpp"
#include "toeplitz_forge/errors.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace toeplitz_forge {
namespace {

using testing::Point;
using testing::ToyOracle;

LatticeVector to_vector(const Point& p) {
  std::vector<Integer> c;
  for (auto v : p) c.emplace_back(static_cast<long>(v));
  return LatticeVector(std::move(c));
}

int top_level(const ArrayHandle& h) { return h.family().exact_prefix_end(); }

TEST(Toeplitz, OriginCarriesLetterZero) {
  for (const auto& name : toy_preset_names()) {
    EXPECT_EQ(ArrayHandle::from_plan(toy_preset(name))(LatticeVector(toy_preset(name).dimension)), 0u) << name;
  }
  EXPECT_EQ(ArrayHandle::from_plan(plan_theorem(5, 2, Rational(3, 10)))(LatticeVector{0, 0}), 0u);
}

TEST(Toeplitz, MatchesOracleAndHoleFillingSequence) {
  for (const auto& name : testing::oracle_presets()) {
    const ConstructionPlan plan = toy_preset(name);
    const ToyOracle oracle(plan);
    const ArrayHandle x = ArrayHandle::from_plan(plan);
    const int top = oracle.top_block_level();
    const auto& top_block = oracle.block(top, 1);
    std::size_t holes_filled = 0;
    for (const Point& p : oracle.points(top)) {
      const Letter got = x(to_vector(p));
      ASSERT_EQ(got, static_cast<Letter>(top_block[oracle.offset(top, p)])) << name;
      // Every y_n agrees with x wherever it is defined.
      for (int n = 1; n <= top; ++n) {
        const int y = oracle.y(n, p);
        if (y >= 0) {
          ASSERT_EQ(got, static_cast<Letter>(y)) << name << " n=" << n;
        } else if (n == top) {
          ++holes_filled;
        }
      }
    }
    // The points where every θ_i is nonzero stay holes of y_top and are filled only in the limit.
    EXPECT_GT(holes_filled, 0u) << name;
  }
}

TEST(Toeplitz, RestrictionToEachDomainIsTheBaseBlock) {
  for (const auto& name : testing::oracle_presets()) {
    const ConstructionPlan plan = toy_preset(name);
    const ArrayHandle x = ArrayHandle::from_plan(plan);
    const Construction& c = x.construction_source()->construction();
    for (int n = 0; n <= c.levels() + 1; ++n) {
      const Patch base = c.materialize(n, Integer(1));
      EXPECT_EQ(patch(x, base.box).letters, base.letters) << name << " level " << n;
    }
  }
  const ArrayHandle k5 = ArrayHandle::from_plan(plan_theorem(5, 2, Rational(3, 10)));
  const Construction& c = k5.construction_source()->construction();
  for (int n = 0; n <= 2; ++n) {
    const Patch base = c.materialize(n, Integer(1));
    EXPECT_EQ(patch(k5, base.box).letters, base.letters) << "level " << n;
  }
}

TEST(Toeplitz, SymbolicLevelsEvaluateOnlyThroughVanishingComponents) {
  const ArrayHandle k5 = ArrayHandle::from_plan(plan_theorem(5, 2, Rational(3, 10)));
  // θ_1 vanishes, so the letter comes from C_0^{(1)} even far out in the symbolic level.
  const LatticeVector far(std::vector<Integer>{Integer("10000000000000000000000"), Integer(1)});
  ASSERT_EQ(min_zero_level(k5.family(), far), 1);
  EXPECT_EQ(k5(far), 0u);
  // Every component below the symbolic level is nonzero: the block of D_4 is needed.
  const LatticeVector deep = far + LatticeVector{1, 1};
  ASSERT_EQ(min_zero_level(k5.family(), deep), 5);
  EXPECT_THROW(k5(deep), DepthBudgetExceeded);
}

// Brute force over a window: g's letter repeats on every point of g + Γ_n inside it.
bool constant_on_window(const std::map<LatticeVector, Letter>& letters, const DiagonalMatrix& period,
                        const LatticeVector& g) {
  const Letter a = letters.at(g);
  for (const auto& [h, b] : letters) {
    if (period.divides(h - g) && b != a) return false;
  }
  return true;
}

void check_per_formula(const ArrayHandle& x, const std::string& label) {
  const DomainFamily& fam = x.family();
  const int top = top_level(x);
  const FundamentalDomain window = fam.domain(top);
  std::map<LatticeVector, Letter> letters;
  const Patch all = patch(x, window);
  window.for_each_point([&](const LatticeVector& h) { letters[h] = all.at(h); });
  for (int n = 1; n + 1 < top; ++n) {
    const DiagonalMatrix period = fam.period(n);
    std::size_t periodic = 0, aperiodic = 0;
    fam.domain(n + 1).for_each_point([&](const LatticeVector& g) {
      const bool formula = per_membership(x, g, n);
      const bool brute = constant_on_window(letters, period, g);
      if (formula) {
        ++periodic;
        EXPECT_TRUE(brute) << label << " n=" << n << " g=" << g.str();
        return;
      }
      ++aperiodic;
      EXPECT_FALSE(brute) << label << " n=" << n << " g=" << g.str();
      const auto w = x.construction_source() ? nonperiodicity_witness(x, g, n) : std::nullopt;
      if (x.construction_source()) {
        ASSERT_TRUE(w.has_value()) << label << " n=" << n << " g=" << g.str();
        EXPECT_TRUE(period.divides(w->first));
        EXPECT_TRUE(period.divides(w->second));
        EXPECT_EQ(x(g + w->first), w->first_letter);
        EXPECT_EQ(x(g + w->second), w->second_letter);
        EXPECT_NE(w->first_letter, w->second_letter);
      }
    });
    EXPECT_GT(periodic, 0u);
    EXPECT_GT(aperiodic, 0u);
  }
}

TEST(Toeplitz, PeriodicPartFormulaMatchesBruteForce) {
  for (const auto& name : testing::oracle_presets()) check_per_formula(ArrayHandle::from_plan(toy_preset(name)), name);
}

TEST(Toeplitz, PeriodicPartOfATranslate) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A")).translated(LatticeVector{7});
  const ArrayHandle base = ArrayHandle::from_plan(toy_preset("A"));
  base.family().domain(2).for_each_point([&](const LatticeVector& g) {
    EXPECT_EQ(per_membership(x, g, 1), per_membership(base, g + LatticeVector{7}, 1)) << g.str();
  });
}

TEST(Toeplitz, AperiodicityWitnessHitsEveryNonzeroLetter) {
  for (const auto& name : testing::oracle_presets()) {
    const ArrayHandle x = ArrayHandle::from_plan(toy_preset(name));
    const DomainFamily& fam = x.family();
    for (int n = 1; n <= 2; ++n) {
      std::size_t checked = 0;
      fam.domain(2).for_each_point([&](const LatticeVector& g) {
        if (has_zero_component(fam, g, n)) return;
        for (Letter alpha = 1; alpha < x.alphabet_size(); ++alpha) {
          const LatticeVector gamma = aperiodicity_witness(x, g, n, alpha);
          EXPECT_TRUE(fam.period(n).divides(gamma)) << name;
          EXPECT_EQ(x(g + gamma), alpha) << name << " g=" << g.str() << " n=" << n;
          ++checked;
        }
      });
      EXPECT_GT(checked, 0u) << name << " n=" << n;
    }
  }
}

TEST(Toeplitz, AperiodicityWitnessOnTheoremPlan) {
  const ArrayHandle x = ArrayHandle::from_plan(plan_theorem(5, 2, Rational(3, 10)));
  const DomainFamily& fam = x.family();
  const LatticeVector g = fam.domain(2).upper_inclusive();
  ASSERT_FALSE(has_zero_component(fam, g, 1));
  for (Letter alpha = 1; alpha < 5; ++alpha) {
    const LatticeVector gamma = aperiodicity_witness(x, g, 1, alpha);
    EXPECT_TRUE(fam.period(1).divides(gamma));
    EXPECT_EQ(x(g + gamma), alpha);
  }
}

TEST(Toeplitz, EssentialPeriodCheckOnToys) {
  for (const auto& name : testing::oracle_presets()) {
    const ArrayHandle x = ArrayHandle::from_plan(toy_preset(name));
    const DomainFamily& fam = x.family();
    for (int n = 1; n <= 2; ++n) {
      fam.domain(n + 1).for_each_point([&](const LatticeVector& h) {
        const EssentialCheck c = essential_period_check(x, n, h);
        if (fam.period(n).divides(h)) {
          EXPECT_TRUE(c.trivial);
          return;
        }
        ASSERT_EQ(c.verdict, Verdict::kTrue) << name << " n=" << n << " h=" << h.str() << ": " << c.detail;
        EXPECT_TRUE(per_membership(x, c.witness, n));
        EXPECT_EQ(x(c.witness), c.alpha);
        ASSERT_TRUE(c.shifted_evidence.has_value());
        const LatticeVector g = c.witness + h;
        EXPECT_FALSE(per_membership(x, g, n));
        EXPECT_NE(x(g + c.shifted_evidence->first), x(g + c.shifted_evidence->second));
      });
    }
  }
}

TEST(Patch, TranslationEquivariance) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("B"));
  // Zero offsets: the array is defined on the nonnegative quadrant.
  const FundamentalDomain box(0, LatticeVector{3, 2}, {Integer(9), Integer(7)});
  for (const LatticeVector& v : {LatticeVector{1, 0}, LatticeVector{5, 11}, LatticeVector{24, 17}}) {
    EXPECT_EQ(patch(x.translated(v), box).letters, patch(x, box.translated(v)).letters) << v.str();
  }
  // Translations compose.
  const LatticeVector a{2, 1}, b{7, 4};
  EXPECT_EQ(patch(x.translated(a).translated(b), box).letters, patch(x.translated(a + b), box).letters);
}

TEST(Patch, ThreadCountDoesNotChangeTheResult) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("D"));
  const FundamentalDomain box(0, LatticeVector{-40, -33}, {Integer(97), Integer(101)});
  const Patch one = patch(x, box, {kDefaultCellBudget, 1});
  for (unsigned threads : {2u, 4u, 7u}) EXPECT_EQ(patch(x, box, {kDefaultCellBudget, threads}), one) << threads;
}

TEST(Patch, CellBudget) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  const FundamentalDomain box(0, LatticeVector{0}, {Integer(100)});
  EXPECT_THROW(patch(x, box, {99, 1}), BudgetExceeded);
  EXPECT_NO_THROW(patch(x, box, {100, 1}));
}

TEST(Patch, TextRoundTrip) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("B"));
  const Patch p = patch(x, FundamentalDomain(0, LatticeVector{2, 1}, {Integer(5), Integer(8)}));
  std::stringstream ss;
  write_patch_text(ss, p);
  EXPECT_EQ(read_patch_text(ss), p);
  std::stringstream bad("2 3 3 0 0\n0 1\n");
  EXPECT_THROW(read_patch_text(bad), FormatError);
}

TEST(Patch, PgmLayout) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("B"));
  const Patch p = patch(x, FundamentalDomain(0, LatticeVector{0, 0}, {Integer(3), Integer(5)}));
  std::ostringstream out;
  write_patch_pgm(out, p, 4);
  const std::string s = out.str();
  const std::string header = "P5\n5 3\n3\n";
  ASSERT_EQ(s.substr(0, header.size()), header);
  ASSERT_EQ(s.size(), header.size() + 15);
  for (std::size_t i = 0; i < 15; ++i) EXPECT_EQ(static_cast<unsigned char>(s[header.size() + i]), p.letters[i]);
}

TEST(Substitution, CanonicalMapIsPinnedAndInjective) {
  const SubstitutionMap s = SubstitutionMap::canonical(2, 3, 2);
  EXPECT_EQ(s.cells(), 9u);
  EXPECT_EQ(s.source_alphabet(), 512u);
  std::vector<Letter> pinned(9, 1);
  pinned[0] = 0;
  EXPECT_EQ(s.block(0), pinned);
  std::set<std::vector<Letter>> seen;
  for (Letter a = 0; a < 512; ++a) {
    const auto b = s.block(a);
    for (Letter v : b) EXPECT_LT(v, 2u);
    EXPECT_TRUE(seen.insert(b).second) << a;
  }
  EXPECT_EQ(seen.size(), 512u);
}

TEST(Substitution, TableValidation) {
  std::vector<std::vector<Letter>> table{{0, 1}, {1, 1}, {0, 0}, {1, 0}};
  EXPECT_NO_THROW(SubstitutionMap::from_table(2, 2, 1, table));
  table[3] = {1, 1};
  EXPECT_THROW(SubstitutionMap::from_table(2, 2, 1, table), InvalidArgument);
  std::vector<std::vector<Letter>> unpinned{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  EXPECT_THROW(SubstitutionMap::from_table(2, 2, 1, unpinned), InvalidArgument);
}

TEST(Substitution, EvaluationFormula) {
  const ArrayHandle y = ArrayHandle::from_plan(toy_preset("A"));
  const SubstitutionMap map = SubstitutionMap::canonical(2, 2, 1);
  const ArrayHandle ys = substitute(y, map);
  EXPECT_EQ(ys.alphabet_size(), 2u);
  for (long g = -20; g < 60; ++g) {
    for (long f = 0; f < 2; ++f) {
      EXPECT_EQ(ys(LatticeVector{f + 2 * g}), map.image(y(LatticeVector{g}), static_cast<std::uint64_t>(f)));
    }
  }
  EXPECT_THROW(substitute(y, SubstitutionMap::canonical(2, 3, 1)), InvalidArgument);
}

TEST(Substitution, PeriodicPartMatchesBruteForce) {
  check_per_formula(substitute(ArrayHandle::from_plan(toy_preset("A")), SubstitutionMap::canonical(2, 2, 1)),
                    "A substituted");
}

TEST(BlockSize, TwoLettersInTheFlatPlane) {
  const BlockSizeChoice c = choose_block_size(2, 2, Rational(1, 10));
  EXPECT_EQ(c.side, 3u);
  EXPECT_EQ(c.size, 9u);
  EXPECT_EQ(c.alphabet, 512u);
  // Direct scan: least t with 2^(t²) ≥ 5, t²(log 2 − h) ≥ 5 and t² h below the bound.
  for (std::uint64_t t = 1; t < c.side; ++t) {
    const double s = static_cast<double>(t * t);
    EXPECT_TRUE(std::pow(2.0, s) < 5 || s * (std::log(2.0) - 0.1) < 5) << t;
  }
  EXPECT_EQ(less(Interval::of(Rational(9, 10)), c.bound), Verdict::kTrue);
  EXPECT_THROW(choose_block_size(2, 2, Rational(7, 10)), InfeasibleEntropy);
}

TEST(SmallAlphabet, PinnedBlockRefutesEveryShiftInsideTheCube) {
  const SmallAlphabetResult r = small_alphabet_pipeline(2, 2, Rational(1, 10));
  EXPECT_EQ(r.choice.size, 9u);
  EXPECT_EQ(r.plan.alphabet_size, 512u);
  ASSERT_TRUE(r.plan.substitution.has_value());
  const ArrayHandle& y = r.handle;
  EXPECT_EQ(y.alphabet_size(), 2u);
  EXPECT_EQ(y(LatticeVector{0, 0}), 0u);
  for (long a = 0; a < 3; ++a) {
    for (long b = 0; b < 3; ++b) {
      const LatticeVector h{a, b};
      if (h.is_zero()) continue;
      EXPECT_EQ(y(h), 1u);
      for (int n = 1; n <= 2; ++n) {
        const EssentialCheck c = essential_period_check(y, n, h);
        EXPECT_EQ(c.verdict, Verdict::kTrue) << h.str() << " n=" << n << ": " << c.detail;
        EXPECT_TRUE(per_membership(y, c.witness, n));
        EXPECT_TRUE(per_membership(y, c.witness + h, n));
        EXPECT_EQ(c.alpha, 0u);
        EXPECT_EQ(c.shifted_letter, 1u);
      }
    }
  }
}

TEST(ToyPreset, UnknownNameThrows) { EXPECT_THROW(toy_preset("Z"), InvalidArgument); }

}  // namespace
}  // namespace toeplitz_forge
