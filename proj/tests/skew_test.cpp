#include <gtest/gtest.h>

#include <random>

#include "toeplitz_forge/errors.hpp"
#include "toeplitz_forge/skew.hpp"

namespace toeplitz_forge {
namespace {

DomainFamily line_family(const std::vector<long>& lowers, const std::vector<long>& periods) {
  std::vector<FundamentalDomain> doms{FundamentalDomain(0, LatticeVector{0}, {Integer(1)})};
  for (std::size_t n = 0; n < periods.size(); ++n) {
    doms.emplace_back(static_cast<int>(n + 1), LatticeVector{lowers[n]}, std::vector<Integer>{Integer(periods[n])});
  }
  return DomainFamily::from_domains(doms);
}

long floor_div_long(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

TEST(Epsilon, ClosedFormOnTheLine) {
  for (long P : {2L, 3L, 5L, 8L}) {
    for (long lower = -(P - 1); lower <= 0; ++lower) {
      const DomainFamily fam = line_family({lower}, {P});
      for (long c = -3 * P; c <= 3 * P; ++c) {
        for (long d = lower; d < lower + P; ++d) {
          // With h = d ∈ D_t the carry is the number of tiles crossed by c.
          EXPECT_EQ(epsilon_t(fam, LatticeVector{c}, LatticeVector{d}, 1), LatticeVector{floor_div_long(c + d - lower, P)})
              << "P=" << P << " lower=" << lower << " c=" << c << " d=" << d;
        }
      }
    }
  }
}

TEST(Epsilon, PlaneExample) {
  const DomainFamily fam = DomainFamily::from_domains(
      {FundamentalDomain(0, LatticeVector{0, 0}, {Integer(1), Integer(1)}),
       FundamentalDomain(1, LatticeVector{0, 0}, {Integer(4), Integer(6)})});
  EXPECT_EQ(epsilon_t(fam, LatticeVector{3, 5}, LatticeVector{2, 2}, 1), (LatticeVector{1, 1}));
  EXPECT_EQ(epsilon_t(fam, LatticeVector{-1, 0}, LatticeVector{0, 3}, 1), (LatticeVector{-1, 0}));
}

TEST(Epsilon, CocycleAndInvariance) {
  const DomainFamily fam = DomainFamily::from_domains(
      {FundamentalDomain(0, LatticeVector{0, 0}, {Integer(1), Integer(1)}),
       FundamentalDomain(1, LatticeVector{-2, -1}, {Integer(5), Integer(3)})});
  std::mt19937_64 rng(13);
  std::uniform_int_distribution<long> coord(-30, 30);
  const DiagonalMatrix P = fam.period(1);
  for (int trial = 0; trial < 2000; ++trial) {
    const LatticeVector g{coord(rng), coord(rng)}, g2{coord(rng), coord(rng)}, h{coord(rng), coord(rng)};
    EXPECT_TRUE(epsilon_t(fam, LatticeVector{0, 0}, h, 1).is_zero());
    // ε(g + g′, h) = ε(g′, h) + ε(g, h + g′).
    EXPECT_EQ(epsilon_t(fam, g + g2, h, 1), epsilon_t(fam, g2, h, 1) + epsilon_t(fam, g, h + g2, 1));
    // Invariant under h ↦ h + Γ_t.
    const LatticeVector z{coord(rng), coord(rng)};
    EXPECT_EQ(epsilon_t(fam, g, h + P.apply(z), 1), epsilon_t(fam, g, h, 1));
    // Shifting g by P z adds z.
    EXPECT_EQ(epsilon_t(fam, g + P.apply(z), h, 1), epsilon_t(fam, g, h, 1) + z);
  }
}

TEST(Odometer, ResiduesAreCompatible) {
  const DomainFamily fam = build_family(toy_preset("B"));
  std::mt19937_64 rng(2);
  std::uniform_int_distribution<long> coord(0, 200);
  for (int trial = 0; trial < 100; ++trial) {
    const LatticeVector g{coord(rng), coord(rng)};
    const OdometerCoordinate c = OdometerCoordinate::of(fam, g, 3);
    EXPECT_TRUE(c.compatible(fam));
    EXPECT_EQ(c.at(0), (LatticeVector{0, 0}));
    EXPECT_THROW(c.at(4), InvalidArgument);
  }
  OdometerCoordinate broken = OdometerCoordinate::of(fam, LatticeVector{3, 5}, 2);
  broken.residues[1] = broken.residues[1] + LatticeVector{1, 0};
  EXPECT_FALSE(broken.compatible(fam));
}

TEST(PiT, ProjectionOfTheTranslation) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  EXPECT_EQ(pi_t(x, 1), LatticeVector{0});
  const DomainFamily& fam = x.family();
  for (long g : {1L, 5L, -3L, 37L}) {
    const ArrayHandle y = x.translated(LatticeVector{g});
    for (int t = 1; t <= 2; ++t) {
      EXPECT_EQ(pi_t(y, t), fam.project(t, LatticeVector{g}));
      EXPECT_TRUE(verify_pi_t(y, t, fam.domain(2))) << "g=" << g << " t=" << t;
    }
  }
}

TEST(DerivedArray, BaseBlockAtTheOrigin) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("B"));
  const Construction& c = x.construction_source()->construction();
  for (int t = 0; t <= 2; ++t) EXPECT_EQ(w_t(x, LatticeVector{0, 0}, t).letters, c.materialize(t, Integer(1)).letters);
  EXPECT_THROW(w_t(x, LatticeVector{1, 0}, 1), InvalidArgument);
}

TEST(DerivedArray, SymbolFrequenciesMatchAp) {
  const ArrayHandle x = ArrayHandle::from_plan(toy_preset("A"));
  const DomainFamily& fam = x.family();
  const int t = 1, s = 3;
  const Census c = census(x, t);
  const SymbolBlock C = read_block(x, s, LatticeVector{0});
  const auto positions = aligned_positions(fam, t, s);
  std::vector<long> counts(c.size(), 0);
  for (const auto& gamma : positions) ++counts[derived_array_eval(x, t, fam.period(t).solve(gamma), c)];
  for (std::size_t b = 0; b < c.size(); ++b) {
    Rational share(counts[b], static_cast<long>(positions.size()));
    share.canonicalize();
    EXPECT_EQ(share, ap(fam, c.blocks()[b], C)) << b;
  }
}

TEST(Skew, FourPeriodicExample) {
  // x(g) = 1 iff g ≡ 1 mod 4 over D_n = [0, 2^n).
  std::vector<FundamentalDomain> doms;
  for (int n = 0; n <= 3; ++n) doms.emplace_back(n, LatticeVector{0}, std::vector<Integer>{Integer(1 << n)});
  const DomainFamily fam = DomainFamily::from_domains(doms);
  const ArrayHandle x(std::make_shared<FunctionSource>(
      2, fam, [](const LatticeVector& g) { return floor_mod(g[0], Integer(4)) == 1 ? Letter(1) : Letter(0); }));
  const Census cx = census(x, 1);
  ASSERT_EQ(cx.size(), 2u);
  const std::size_t b01 = *cx.index_of({0, 1}), b00 = *cx.index_of({0, 0});
  // x^{(1)}(h) reads x on {2h, 2h+1}: (0,1) for even h, (0,0) for odd h.
  for (long h = -4; h < 4; ++h) EXPECT_EQ(derived_array_eval(x, 1, LatticeVector{h}, cx), h % 2 == 0 ? b01 : b00);
  const ArrayHandle y = x.translated(LatticeVector{1});
  EXPECT_EQ(pi_t(y, 1), LatticeVector{1});
  EXPECT_EQ(pi_t(y.translated(LatticeVector{1}), 1), LatticeVector{0});
  const SkewCheck check = skew_equivariance_check(y, LatticeVector{1}, 1, FundamentalDomain(0, LatticeVector{-4}, {Integer(8)}), cx);
  EXPECT_EQ(check.verdict, Verdict::kTrue) << check.detail;
  EXPECT_TRUE(check.first_coordinate);
  EXPECT_EQ(check.carry, LatticeVector{1});
  EXPECT_EQ(check.cells, 8u);
  // (1·y)^{(1)} is y^{(1)} shifted by the carry, i.e. x^{(1)} shifted by one.
  for (long h = -4; h < 4; ++h) {
    EXPECT_EQ(derived_array_eval(y.translated(LatticeVector{1}), 1, LatticeVector{h}, cx),
              derived_array_eval(x, 1, LatticeVector{h + 1}, cx));
  }
}

TEST(Skew, EquivarianceOnToyPlans) {
  std::mt19937_64 rng(31);
  for (const char* name : {"A", "B", "C", "D"}) {
    const ArrayHandle x = ArrayHandle::from_plan(toy_preset(name));
    const std::size_t d = x.dim();
    std::uniform_int_distribution<long> coord(0, 30);
    for (int t = 1; t <= 2; ++t) {
      const Census c = census(x, t);
      for (int trial = 0; trial < 6; ++trial) {
        LatticeVector v(d), g(d);
        for (std::size_t i = 0; i < d; ++i) {
          v[i] = coord(rng);
          g[i] = coord(rng);
        }
        const ArrayHandle y = x.translated(v);
        const FundamentalDomain window(0, LatticeVector(d), std::vector<Integer>(d, Integer(2)));
        const SkewCheck check = skew_equivariance_check(y, g, t, window, c);
        EXPECT_EQ(check.verdict, Verdict::kTrue) << name << " t=" << t << " " << check.detail;
        EXPECT_EQ(check.carry, epsilon_t(x.family(), g, pi_t(y, t), t));
      }
    }
  }
}

TEST(Skew, EquivarianceOnTheoremPlan) {
  const ArrayHandle x = ArrayHandle::from_plan(plan_theorem(5, 2, Rational(3, 10)));
  const Census c = census(x, 1);
  const FundamentalDomain window(0, LatticeVector{-1, 0}, {Integer(3), Integer(1)});
  for (const LatticeVector& g : {LatticeVector{1, 0}, LatticeVector{7, 0}, LatticeVector{-13, 0}, LatticeVector{123, 0}}) {
    const SkewCheck check = skew_equivariance_check(x.translated(LatticeVector{3, 0}), g, 1, window, c);
    EXPECT_EQ(check.verdict, Verdict::kTrue) << g.str() << " " << check.detail;
  }
}

}  // namespace
}  // namespace toeplitz_forge
