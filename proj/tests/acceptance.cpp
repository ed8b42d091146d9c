// One line per acceptance criterion; exits nonzero when any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "toeplitz_forge/analysis.hpp"
#include "toeplitz_forge/errors.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/skew.hpp"
#include "toeplitz_forge/theta.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace tf = toeplitz_forge;

namespace {

// Pinned tolerances.
constexpr double kThetaFixtureSeconds = 1e-3;
constexpr long kEpsilonRange = 3;              // c ∈ [−3P, 3P]
constexpr std::size_t kFrequencyColumns = 50;  // sampled level-2 windows
const tf::Rational kBracketLo(13, 40);         // h + 3/p_N
const tf::Rational kBracketHi(143, 400);       // above h + (d log M + 3)/p_N
const tf::Rational kLambda2Lo(4299, 10000);
const tf::Rational kLambda2Hi(4302, 10000);
const tf::Rational kLowerBoundLo(388, 1000);
const tf::Rational kLowerBoundHi(389, 1000);

struct Outcome {
  bool passed = false;
  std::string detail;
};

Outcome fail(std::string detail) { return {false, std::move(detail)}; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

tf::LatticeVector to_vector(const tf::testing::Point& p) {
  std::vector<tf::Integer> c;
  for (auto v : p) c.emplace_back(static_cast<long>(v));
  return tf::LatticeVector(std::move(c));
}

bool inside(const tf::Interval& v, const tf::Rational& lo, const tf::Rational& hi) {
  return less_equal(tf::Interval::of(lo), v) == tf::Verdict::kTrue &&
         less_equal(v, tf::Interval::of(hi)) == tf::Verdict::kTrue;
}

Outcome theta_fixture() {
  const tf::DomainFamily f = tf::testing::four_level_family();
  const tf::LatticeVector g{10, 5};
  double best = 1e9;
  tf::ThetaDecomposition dec;
  int zero = 0;
  for (int rep = 0; rep < 5; ++rep) {
    const auto t0 = std::chrono::steady_clock::now();
    dec = tf::decompose(f, g);
    zero = tf::min_zero_level(f, g);
    best = std::min(best, seconds_since(t0));
  }
  const bool values = dec.component(4) == tf::LatticeVector{8, 12} && dec.component(3) == tf::LatticeVector{4, -6} &&
                      dec.component(2) == tf::LatticeVector{-2, 0} && dec.component(1) == tf::LatticeVector{0, -1} &&
                      zero == 5;
  if (!values) return fail("decomposition of (10,5) differs from the fixture");
  if (best >= kThetaFixtureSeconds) return fail("took " + std::to_string(best) + " s");
  std::ostringstream os;
  os << "θ_4..θ_1 = (8,12) (4,-6) (-2,0) (0,-1), least vanishing level 5, " << best * 1e6 << " us";
  return {true, os.str()};
}

Outcome epsilon_closed_form() {
  long cases = 0;
  for (long P : {2L, 3L, 5L, 8L}) {
    for (long lower = -(P - 1); lower <= 0; ++lower) {
      const auto fam = tf::DomainFamily::from_domains(
          {tf::FundamentalDomain(0, tf::LatticeVector{0}, {tf::Integer(1)}),
           tf::FundamentalDomain(1, tf::LatticeVector{lower}, {tf::Integer(P)})});
      for (long c = -kEpsilonRange * P; c <= kEpsilonRange * P; ++c) {
        for (long d = lower; d < lower + P; ++d) {
          const long num = c + d - lower;
          const long want = num >= 0 ? num / P : -((-num + P - 1) / P);
          if (tf::epsilon_t(fam, tf::LatticeVector{c}, tf::LatticeVector{d}, 1) != tf::LatticeVector{want}) {
            return fail("P=" + std::to_string(P) + " c=" + std::to_string(c) + " d=" + std::to_string(d));
          }
          ++cases;
        }
      }
    }
  }
  return {true, std::to_string(cases) + " cases, P ∈ {2,3,5,8}, every corner"};
}

Outcome skew_example() {
  std::vector<tf::FundamentalDomain> doms;
  for (int n = 0; n <= 3; ++n) doms.emplace_back(n, tf::LatticeVector{0}, std::vector<tf::Integer>{tf::Integer(1 << n)});
  const tf::ArrayHandle x(std::make_shared<tf::FunctionSource>(
      2, tf::DomainFamily::from_domains(doms),
      [](const tf::LatticeVector& g) { return tf::floor_mod(g[0], tf::Integer(4)) == 1 ? tf::Letter(1) : tf::Letter(0); }));
  const tf::Census cx = tf::census(x, 1);
  const tf::ArrayHandle y = x.translated(tf::LatticeVector{1});
  const tf::SkewCheck check =
      tf::skew_equivariance_check(y, tf::LatticeVector{1}, 1, tf::FundamentalDomain(0, tf::LatticeVector{-4}, {tf::Integer(8)}), cx);
  if (check.verdict != tf::Verdict::kTrue) return fail(check.detail);
  if (!(check.carry == tf::LatticeVector{1}) || !(tf::pi_t(y, 1) == tf::LatticeVector{1})) return fail("carry or π_1 differs");
  for (long h = -4; h < 4; ++h) {
    const std::size_t want = *cx.index_of(h % 2 == 0 ? std::vector<tf::Letter>{0, 1} : std::vector<tf::Letter>{0, 0});
    if (tf::derived_array_eval(x, 1, tf::LatticeVector{h}, cx) != want) return fail("derived array at " + std::to_string(h));
  }
  return {true, "π_1(y) = 1, carry 1, " + check.detail};
}

Outcome oracle_equivalence() {
  std::size_t cells = 0, blocks = 0;
  for (const auto& name : tf::testing::oracle_presets()) {
    const tf::ConstructionPlan plan = tf::toy_preset(name);
    const tf::testing::ToyOracle oracle(plan);
    const tf::ArrayHandle x = tf::ArrayHandle::from_plan(plan);
    const auto c = tf::Construction::from_plan(plan);
    const int top = oracle.top_block_level();
    for (int n = 0; n <= top; ++n) {
      for (std::size_t j = 1; j <= oracle.block_count(n); ++j) {
        const auto p = c->materialize(n, tf::Integer(static_cast<unsigned long>(j)));
        const auto& want = oracle.block(n, j);
        if (!std::equal(p.letters.begin(), p.letters.end(), want.begin(), want.end(),
                        [](tf::Letter a, int b) { return a == static_cast<tf::Letter>(b); })) {
          return fail(name + " block (" + std::to_string(n) + "," + std::to_string(j) + ")");
        }
        ++blocks;
      }
    }
    for (const auto& p : oracle.points(top)) {
      const tf::Letter got = x(to_vector(p));
      if (got != static_cast<tf::Letter>(oracle.block(top, 1)[oracle.offset(top, p)])) return fail(name + " x differs");
      for (int n = 1; n <= top; ++n) {
        const int yn = oracle.y(n, p);
        if (yn >= 0 && static_cast<tf::Letter>(yn) != got) return fail(name + " y_n differs");
      }
      ++cells;
    }
  }
  return {true, "toys A, B, C: " + std::to_string(blocks) + " blocks, " + std::to_string(cells) + " cells"};
}

Outcome theorem_identities() {
  const tf::ConstructionPlan plan = tf::plan_theorem(5, 2, tf::Rational(3, 10));
  if (plan.tail_base != 7 || plan.tail_start != 2) return fail("M or N differs");
  if (!plan.certified()) return fail("plan is not certified");
  const tf::ArrayHandle x = tf::ArrayHandle::from_plan(plan);
  const tf::FrequencyReport r = tf::unique_ergodicity_probe(x, 1, tf::ProbeOptions{kFrequencyColumns, 1, {}});
  if (!r.passed || r.min != tf::Rational(1, 24) || r.max != tf::Rational(1, 24)) return fail("ap is not constant 1/24");
  if (r.columns.size() < kFrequencyColumns) return fail("only " + std::to_string(r.columns.size()) + " columns");
  const auto est = tf::entropy_estimates(plan);
  const auto it = std::find_if(est.begin(), est.end(), [&](const tf::EntropyEstimate& e) { return e.level == plan.tail_start; });
  if (it == est.end() || !inside(it->estimate, kBracketLo, kBracketHi)) return fail("entropy estimate outside the bracket");
  return {true, "M = 7, N = 2, ap = 1/24 on " + std::to_string(r.rows.size()) + " x " + std::to_string(r.columns.size()) +
                    ", log(q_2)/p_2 = " + it->estimate.str(8)};
}

Outcome substitution_laws() {
  const tf::ArrayHandle x = tf::ArrayHandle::from_plan(tf::toy_preset("A"));
  const tf::SubstitutionMap map = tf::SubstitutionMap::canonical(2, 2, 1);
  const tf::ArrayHandle y = tf::substitute(x, map);
  for (long g = -40; g < 200; ++g) {
    for (long f = 0; f < 2; ++f) {
      if (y(tf::LatticeVector{f + 2 * g}) != map.image(x(tf::LatticeVector{g}), static_cast<std::uint64_t>(f))) {
        return fail("evaluation formula at " + std::to_string(g));
      }
    }
  }
  for (int t = 1; t <= 2; ++t) {
    if (tf::census(y, t).size() != tf::census(x, t).size()) return fail("census size changes at level " + std::to_string(t));
  }
  const tf::Census c1 = tf::census(x, 1), c2 = tf::census(x, 2);
  for (const auto& B : c1.blocks()) {
    for (const auto& C : c2.blocks()) {
      if (tf::ap(y.family(), tf::substitute_block(map, y.family(), B), tf::substitute_block(map, y.family(), C)) !=
          tf::ap(x.family(), B, C)) {
        return fail("ap changes under substitution");
      }
    }
  }
  const tf::SmallAlphabetResult ta = tf::small_alphabet_pipeline(2, 2, tf::Rational(1, 10));
  const auto scaled = tf::handle_entropy_estimates(ta.handle);
  const auto plain = tf::entropy_estimates(ta.plan);
  for (std::size_t i = 0; i < plain.size(); ++i) {
    if (!plain[i].estimate.finite()) continue;
    const tf::Interval ratio = scaled[i].estimate * tf::Interval::of(9L) - plain[i].estimate;
    if (std::abs(ratio.mid_double()) > 1e-12 * std::max(1.0, std::abs(plain[i].estimate.mid_double()))) {
      return fail("entropy does not scale by 1/9 at level " + std::to_string(plain[i].level));
    }
  }
  return {true, "evaluation formula, census sizes, ap table and entropy/#F preserved"};
}

Outcome small_alphabet() {
  const tf::SmallAlphabetResult r = tf::small_alphabet_pipeline(2, 2, tf::Rational(1, 10));
  if (r.choice.size != 9 || r.choice.side != 3 || r.choice.alphabet != 512) return fail("block size differs");
  const tf::ArrayHandle& y = r.handle;
  if (y(tf::LatticeVector{0, 0}) != 0) return fail("y(0) != 0");
  std::size_t periodic = 0, aperiodic = 0;
  const tf::DiagonalMatrix P1 = y.family().period(1);
  for (long a = 0; a < 6; ++a) {
    for (long b = 0; b < 6; ++b) {
      const tf::LatticeVector g{a, b};
      if (tf::per_membership(y, g, 1)) {
        for (long z = -3; z <= 3; ++z) {
          if (y(g + P1.apply(tf::LatticeVector{z, 0})) != y(g)) return fail("periodic point " + g.str() + " moves");
        }
        ++periodic;
      } else {
        const auto w = tf::nonperiodicity_witness(y, g, 1);
        if (!w || !P1.divides(w->first) || !P1.divides(w->second) || y(g + w->first) == y(g + w->second)) {
          return fail("no verified witness at " + g.str());
        }
        ++aperiodic;
      }
    }
  }
  for (long a = 0; a < 3; ++a) {
    for (long b = 0; b < 3; ++b) {
      const tf::LatticeVector h{a, b};
      if (h.is_zero()) continue;
      if (y(h) != 1) return fail("y(" + h.str() + ") != 1");
      for (int n = 1; n <= 2; ++n) {
        const tf::EssentialCheck c = tf::essential_period_check(y, n, h);
        if (c.verdict != tf::Verdict::kTrue || c.alpha != 0 || c.shifted_letter != 1) {
          return fail("h=" + h.str() + " n=" + std::to_string(n) + ": " + c.detail);
        }
      }
    }
  }
  return {true, "s = 9, K = 512, periodic part on [0,6)^2: " + std::to_string(periodic) + " periodic, " +
                    std::to_string(aperiodic) + " certified aperiodic, all 8 shifts of F essential"};
}

Outcome sequence_table() {
  const tf::PrimeSequences s = tf::prime_sequences(5, 2);
  if (*s.p[1].exact != 5 || *s.p[2].exact != 120 || *s.q[1].exact != 24 || *s.q[2].exact != tf::Integer("25852016738884976640000")) {
    return fail("p or q differs");
  }
  if (!inside(s.lambda[2], kLambda2Lo, kLambda2Hi)) return fail("λ_2 = " + s.lambda[2].str(8));
  const tf::Interval L = tf::lambda_lower_bound(5, 2);
  if (!inside(L, kLowerBoundLo, kLowerBoundHi)) return fail("L = " + L.str(8));
  return {true, "p = 1, 5, 120; q = 5, 24, 23!; λ = " + s.lambda[0].str(5) + ", " + s.lambda[1].str(4) + ", " +
                    s.lambda[2].str(4) + "; L = " + L.str(4)};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism(const std::string& cli) {
  if (cli.empty()) return fail("no command-line tool path given");
  const auto dir = std::filesystem::temp_directory_path() / "toeplitz_forge_acceptance";
  std::filesystem::create_directories(dir);
  auto run = [&](const std::string& args, const std::string& out) {
    const std::string cmd = "\"" + cli + "\" " + args + " --out \"" + (dir / out).string() + "\" 2>/dev/null";
    return std::system(cmd.c_str()) == 0;
  };
  const std::string box = "--toy-preset D --box -256,-256:512,512";
  bool ok = run("plan --k 5 --d 2 --h 0.3", "plan1") && run("plan --k 5 --d 2 --h 0.3", "plan2") &&
            run("patch " + box + " --threads 1", "patch1") && run("patch " + box + " --threads 4", "patch4") &&
            run("patch " + box + " --threads 1", "patch1b");
  if (!ok) {
    std::filesystem::remove_all(dir);
    return fail("a command exited nonzero");
  }
  const std::string p1 = slurp(dir / "plan1"), a = slurp(dir / "patch1");
  const bool same = !p1.empty() && p1 == slurp(dir / "plan2") && !a.empty() && a == slurp(dir / "patch4") &&
                    a == slurp(dir / "patch1b");
  std::filesystem::remove_all(dir);
  if (!same) return fail("outputs differ between runs");
  return {true, "plan x2 and 512x512 patch with 1, 4, 1 threads byte-identical"};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"theta decomposition fixture", theta_fixture},
      {"carry closed form on the line", epsilon_closed_form},
      {"skew product on a 4-periodic array", skew_example},
      {"toy constructions against the oracle", oracle_equivalence},
      {"k=5 planner identities and frequencies", theorem_identities},
      {"block substitution laws", substitution_laws},
      {"small-alphabet construction essentials", small_alphabet},
      {"prime sequences and entropy bound", sequence_table},
      {"deterministic command-line output", [&] { return determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = fail(std::string("exception: ") + e.what());
    }
    std::ostringstream line;
    line << (o.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": " << o.detail << " ["
         << std::fixed;
    line.precision(2);
    line << seconds_since(t0) << " s]";
    std::cout << line.str() << std::endl;
    failures += o.passed ? 0 : 1;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
