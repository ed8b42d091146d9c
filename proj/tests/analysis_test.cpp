#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "toeplitz_forge/analysis.hpp"
#include "toeplitz_forge/errors.hpp"

namespace toeplitz_forge {
namespace {

using testing::Point;
using testing::ToyOracle;

LatticeVector to_vector(const Point& p) {
  std::vector<Integer> c;
  for (auto v : p) c.emplace_back(static_cast<long>(v));
  return LatticeVector(std::move(c));
}

std::vector<Letter> letters_of(const std::vector<int>& v) { return {v.begin(), v.end()}; }

const ArrayHandle& k5() {
  static const ArrayHandle h = ArrayHandle::from_plan(plan_theorem(5, 2, Rational(3, 10)));
  return h;
}

// ap straight from the oracle: positions γ ∈ D_s ∩ Γ_t, letters compared through coordinates.
Rational oracle_ap(const ToyOracle& o, int t, const std::vector<int>& B, int s, const std::vector<int>& C) {
  long hits = 0, total = 0;
  for (const Point& gamma : o.points(s)) {
    bool aligned = true;
    for (std::size_t i = 0; i < o.dim(); ++i) aligned = aligned && (gamma[i] % o.period(t)[i] == 0);
    if (!aligned) continue;
    bool fits = true, match = true;
    for (const Point& d : o.points(t)) {
      Point h(o.dim());
      for (std::size_t i = 0; i < o.dim(); ++i) h[i] = d[i] + gamma[i];
      if (!o.contains(s, h)) {
        fits = false;
        break;
      }
      match = match && C[o.offset(s, h)] == B[o.offset(t, d)];
    }
    if (!fits) continue;
    ++total;
    hits += match ? 1 : 0;
  }
  Rational r(hits, total);
  r.canonicalize();
  return r;
}

TEST(Census, LevelZeroIsTheAlphabet) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  const Census c = census(x, 0);
  EXPECT_EQ(c.size(), 4u);
  EXPECT_EQ(census(k5(), 0).size(), 5u);
}

TEST(Census, EqualsTheBlockSetOfTheOracle) {
  for (const auto& name : testing::oracle_presets()) {
    const ConstructionPlan plan = toy_preset(name);
    const ToyOracle oracle(plan);
    const ArrayHandle x = ArrayHandle::from_plan(plan);
    for (int t = 1; t <= 2; ++t) {
      const Census c = census(x, t);
      std::set<std::vector<Letter>> got, want;
      for (const auto& b : c.blocks()) got.insert(b.letters);
      for (std::size_t j = 1; j <= oracle.block_count(t); ++j) want.insert(letters_of(oracle.block(t, j)));
      EXPECT_EQ(got, want) << name << " t=" << t;
      EXPECT_EQ(Integer(static_cast<unsigned long>(c.size())), *census_count(x, t).exact) << name << " t=" << t;
      for (std::size_t i = 0; i < c.size(); ++i) EXPECT_EQ(c.index_of(c.blocks()[i].letters), i);
    }
  }
}

TEST(Census, TheoremPlanLevelOne) {
  const Census c = census(k5(), 1);
  EXPECT_EQ(c.size(), 24u);
  EXPECT_EQ(c.window_level(), 2);  // D_3 exceeds the default cell budget
  EXPECT_EQ(*census_count(k5(), 1).exact, 24);
}

TEST(Census, BudgetAndWindowValidation) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  EXPECT_THROW(census(x, 2, CensusOptions{10, 1, std::nullopt}), BudgetExceeded);
  EXPECT_THROW(census(x, 2, CensusOptions{kDefaultCellBudget, 1, 1}), InvalidArgument);
}

TEST(Census, TranslateHasTheSameBlocks) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("D"));
  const Census a = census(x, 1), b = census(x.translated(LatticeVector{5, -3}), 1);
  std::set<std::vector<Letter>> sa, sb;
  for (const auto& blk : a.blocks()) sa.insert(blk.letters);
  for (const auto& blk : b.blocks()) sb.insert(blk.letters);
  EXPECT_EQ(sa, sb);
}

TEST(Ap, MatchesBruteForceAndIsUniform) {
  for (const auto& name : testing::oracle_presets()) {
    const ConstructionPlan plan = toy_preset(name);
    const ToyOracle oracle(plan);
    const DomainFamily family = build_family(plan);
    for (int t = 0; t <= 1; ++t) {
      for (int s = t + 1; s <= t + 2; ++s) {
        for (std::size_t i = 1; i <= oracle.block_count(t); ++i) {
          const SymbolBlock B{t, family.domain(t), letters_of(oracle.block(t, i))};
          for (std::size_t j = 1; j <= std::min<std::size_t>(oracle.block_count(s), 6); ++j) {
            const SymbolBlock C{s, family.domain(s), letters_of(oracle.block(s, j))};
            const Rational got = ap(family, B, C);
            EXPECT_EQ(got, oracle_ap(oracle, t, oracle.block(t, i), s, oracle.block(s, j)))
                << name << " t=" << t << " s=" << s;
            EXPECT_EQ(got, Rational(1, static_cast<unsigned long>(oracle.block_count(t))))
                << name << " t=" << t << " s=" << s << " i=" << i << " j=" << j;
          }
        }
      }
    }
  }
}

TEST(Ap, RejectsMismatchedLevels) {
  const ConstructionPlan plan = toy_preset("A");
  const DomainFamily family = build_family(plan);
  const auto c = Construction::from_plan(plan);
  const SymbolBlock B{1, family.domain(1), c->materialize(1, Integer(1)).letters};
  const SymbolBlock C{2, family.domain(2), c->materialize(2, Integer(1)).letters};
  EXPECT_THROW(ap(family, C, B), InvalidArgument);
  EXPECT_EQ(ap(family, B, B), 1);
}

TEST(Probe, TheoremPlanFrequencies) {
  for (int t = 0; t <= 1; ++t) {
    const FrequencyReport r = unique_ergodicity_probe(k5(), t, ProbeOptions{50, 3, {}});
    EXPECT_TRUE(r.passed) << "t=" << t;
    EXPECT_EQ(r.rows.size(), t == 0 ? 5u : 24u);
    EXPECT_GE(r.columns.size(), t == 0 ? 24u : 50u);
    const Rational want(1, t == 0 ? 5 : 24);
    EXPECT_EQ(r.min, want);
    EXPECT_EQ(r.max, want);
  }
}

TEST(Probe, SeedOnlyChangesTheSampledColumns) {
  const FrequencyReport a = unique_ergodicity_probe(k5(), 1, ProbeOptions{20, 1, {}});
  const FrequencyReport b = unique_ergodicity_probe(k5(), 1, ProbeOptions{20, 1, {}});
  EXPECT_EQ(a.column_positions, b.column_positions);
  EXPECT_EQ(a.min, b.min);
}

TEST(Probe, DuplicatedBlockIsDetected) {
  const ConstructionPlan plan = toy_preset("A");
  const ToyOracle oracle(plan);
  const DomainFamily family = build_family(plan);
  std::vector<SymbolBlock> rows, columns;
  for (std::size_t i = 1; i <= oracle.block_count(1); ++i) rows.push_back({1, family.domain(1), letters_of(oracle.block(1, i))});
  for (std::size_t j = 1; j <= oracle.block_count(2); ++j) columns.push_back({2, family.domain(2), letters_of(oracle.block(2, j))});
  const FrequencyReport clean = frequency_table(family, rows, columns);
  EXPECT_TRUE(clean.passed);
  EXPECT_EQ(clean.min, clean.max);
  // Overwrite the sub-block at the last grid position of one column with the sub-block at the origin.
  SymbolBlock& corrupt = columns[3];
  const FundamentalDomain d1 = family.domain(1), d2 = family.domain(2);
  const auto positions = aligned_positions(family, 1, 2);
  const LatticeVector last = positions.back();
  d1.for_each_point([&](const LatticeVector& d) {
    corrupt.letters[d2.offset_of(d + last).get_ui()] = corrupt.letters[d2.offset_of(d).get_ui()];
  });
  const FrequencyReport bad = frequency_table(family, rows, columns);
  EXPECT_FALSE(bad.passed);
  ASSERT_TRUE(bad.witness.has_value());
  const auto [row, c0, c1] = *bad.witness;
  EXPECT_NE(bad.table[row][c0], bad.table[row][c1]);
  EXPECT_EQ(bad.min, 0);
  Rational doubled(2, static_cast<unsigned long>(oracle.block_count(1)));
  doubled.canonicalize();
  EXPECT_EQ(bad.max, doubled);
}

TEST(Entropy, TheoremPlanLevelTwo) {
  const auto est = handle_entropy_estimates(k5());
  ASSERT_GE(est.size(), 2u);
  const EntropyEstimate& e = est[1];
  ASSERT_EQ(e.level, 2);
  EXPECT_EQ(less_equal(Interval::of(Rational(13, 40)), e.estimate), Verdict::kTrue);
  EXPECT_EQ(less_equal(e.estimate, Interval::of(Rational(143, 400))), Verdict::kTrue);
}

TEST(Entropy, SubstitutionDividesByTheCubeVolume) {
  const SmallAlphabetResult r = small_alphabet_pipeline(2, 2, Rational(1, 10));
  const auto scaled = handle_entropy_estimates(r.handle);
  const auto plain = entropy_estimates(r.plan);
  ASSERT_EQ(scaled.size(), plain.size());
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (!plain[i].estimate.finite() || plain[i].estimate.mid_double() == 0) continue;
    EXPECT_NEAR(scaled[i].estimate.mid_double() * 9 / plain[i].estimate.mid_double(), 1.0, 1e-9);
  }
}

TEST(Birkhoff, MatchesDirectCount) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  const FundamentalDomain box(0, LatticeVector{0}, {Integer(3)});
  const Patch A = patch(x, box.translated(LatticeVector{5}));
  ASSERT_EQ(A.box.lower(), LatticeVector{5});
  const DomainFamily& fam = x.family();
  for (int n = 1; n <= 3; ++n) {
    for (long g : {0L, 3L, 17L}) {
      const FundamentalDomain dn = fam.domain(n);
      long hits = 0;
      dn.for_each_point([&](const LatticeVector& d) {
        const LatticeVector h = d + LatticeVector{g};
        bool match = true;
        // m runs over the box of A, here 5..7.
        for (long m = 5; m < 8; ++m) match = match && x(h + LatticeVector{m}) == A.letters[static_cast<std::size_t>(m - 5)];
        hits += match ? 1 : 0;
      });
      Rational want(Integer(hits), dn.cardinality());
      want.canonicalize();
      EXPECT_EQ(birkhoff(x, A, LatticeVector{g}, n), want) << n << " " << g;
    }
  }
}

TEST(PsiQuantity, MatchesDirectCountAndFrequency) {
  for (const auto& name : testing::oracle_presets()) {
    const ArrayHandle x = ArrayHandle::from_plan(toy_preset(name));
    const DomainFamily& fam = x.family();
    const Census c1 = census(x, 1);
    for (const SymbolBlock& B : c1.blocks()) {
      // Aligned windows contain every level-1 block exactly once per level-2 tile.
      for (int n = 2; n <= 3; ++n) {
        EXPECT_EQ(psi_quantity(x, 1, n, B, LatticeVector(fam.dim())), Rational(1, static_cast<unsigned long>(c1.size())))
            << name;
      }
      // Unaligned windows against a direct count.
      LatticeVector g(fam.dim());
      g[0] = 3;
      const auto ir = fam.interior_rest(1, 2, g);
      long hits = 0;
      for_each_interior_point(fam, 1, ir, [&](const LatticeVector& gamma) {
        if (read_block(x, 1, gamma).letters == B.letters) ++hits;
      });
      Rational want(Integer(hits), ir.interior_size);
      want.canonicalize();
      EXPECT_EQ(psi_quantity(x, 1, 2, B, g), want) << name;
    }
  }
}

TEST(Substitution, BlocksCensusAndFrequenciesCarryOver) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  const SubstitutionMap map = SubstitutionMap::canonical(2, 2, 1);
  const ArrayHandle y = substitute(x, map);
  const DomainFamily& fx = x.family();
  const DomainFamily& fy = y.family();
  for (int t = 0; t <= 2; ++t) {
    const SymbolBlock B = read_block(x, t, LatticeVector(1));
    EXPECT_EQ(substitute_block(map, fy, B), read_block(y, t, LatticeVector(1))) << t;
  }
  const Census cx = census(x, 1), cy = census(y, 1);
  EXPECT_EQ(cy.size(), cx.size());
  EXPECT_EQ(*census_count(y, 1).exact, *census_count(x, 1).exact);
  const Census cx2 = census(x, 2);
  for (const SymbolBlock& B : cx.blocks()) {
    for (const SymbolBlock& C : cx2.blocks()) {
      EXPECT_EQ(ap(fy, substitute_block(map, fy, B), substitute_block(map, fy, C)), ap(fx, B, C));
    }
  }
}

TEST(AlignedPositions, CountsMatchGridCount) {
  const DomainFamily fam = build_family(toy_preset("B"));
  for (int t = 0; t <= 2; ++t) {
    for (int s = t; s <= 3; ++s) {
      const auto pos = aligned_positions(fam, t, s);
      EXPECT_EQ(Integer(static_cast<unsigned long>(pos.size())), fam.grid_count(t, s));
      EXPECT_TRUE(std::is_sorted(pos.begin(), pos.end()));
    }
  }
}

}  // namespace
}  // namespace toeplitz_forge
