#include "toeplitz_forge/cli/verify_suite.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <gmpxx.h>

#include "toeplitz_forge/analysis.hpp"
#include "toeplitz_forge/errors.hpp"
#include "toeplitz_forge/plan_io.hpp"
#include "toeplitz_forge/skew.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace toeplitz_forge::cli {
namespace {

constexpr std::uint64_t kToyExhaustiveCells = 100000;

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(gmp_randinit_mt) { rng_.seed(static_cast<unsigned long>(seed)); }
  Integer below(const Integer& n) { return rng_.get_z_range(n); }

 private:
  gmp_randclass rng_;
};

// Every point of a small box; otherwise both corners, the origin when inside, and random points.
std::vector<LatticeVector> sample_points(const FundamentalDomain& box, std::size_t samples, std::uint64_t limit,
                                         Sampler& rng) {
  const Integer card = box.cardinality();
  std::vector<LatticeVector> out;
  if (card <= Integer(static_cast<unsigned long>(limit))) {
    box.for_each_point([&](const LatticeVector& g) { out.push_back(g); });
    return out;
  }
  out.push_back(box.lower());
  out.push_back(box.upper_inclusive());
  LatticeVector zero(box.dim());
  if (box.contains(zero)) out.push_back(zero);
  while (out.size() < samples) out.push_back(box.point_at(rng.below(card)));
  return out;
}

std::string level_name(const char* what, int n) { return std::string(what) + " level " + std::to_string(n); }

class Suite {
 public:
  Suite(const ConstructionPlan& plan, const SuiteOptions& options)
      : plan_(plan), options_(options), rng_(options.seed) {}

  SuiteReport run();

 private:
  void add(std::string name, bool passed, std::string detail) {
    report_.checks.push_back(SuiteCheck{std::move(name), passed, false, std::move(detail)});
  }
  void skip(std::string name, std::string detail) {
    report_.checks.push_back(SuiteCheck{std::move(name), true, true, std::move(detail)});
  }
  // Runs body; budget errors become a skipped check and other library errors a failure.
  void guarded(const std::string& name, const std::function<void()>& body);

  void certificates();
  void coverage();
  void theta_properties();
  void per_formula();
  void frequencies();
  void entropy();
  void carry_closed_form();
  void skew();
  void toy_oracles();

  const ConstructionPlan& plan_;
  SuiteOptions options_;
  Sampler rng_;
  SuiteReport report_;
  ArrayHandle handle_;
  ArrayHandle inner_;
  const Construction* construction_ = nullptr;
};

void Suite::guarded(const std::string& name, const std::function<void()>& body) {
  try {
    body();
  } catch (const BudgetExceeded& e) {
    skip(name, e.what());
  } catch (const DepthBudgetExceeded& e) {
    skip(name, e.what());
  } catch (const Error& e) {
    add(name, false, e.what());
  }
}

SuiteReport Suite::run() {
  certificates();
  if (!report_.passed()) {
    report_.stopped_at_certification = true;
    return report_;
  }
  try {
    handle_ = ArrayHandle::from_plan(plan_, options_.depth_budget);
  } catch (const Error& e) {
    add("construction", false, e.what());
    return report_;
  }
  if (const auto* sub = dynamic_cast<const SubstitutedSource*>(&handle_.source())) {
    inner_ = sub->inner();
  } else {
    inner_ = handle_;
  }
  construction_ = &inner_.construction_source()->construction();
  coverage();
  theta_properties();
  per_formula();
  frequencies();
  entropy();
  carry_closed_form();
  skew();
  if (plan_.mode == PlanMode::kToy) toy_oracles();
  return report_;
}

void Suite::certificates() {
  for (const auto& c : verify_plan(plan_)) add("certificate " + c.name, c.passed, c.detail);
}

void Suite::coverage() {
  for (int n = 1; n <= construction_->levels(); ++n) {
    guarded(level_name("coverage", n), [&] {
      PermutationFamily::Coverage cov = construction_->permutations(n).coverage();
      std::string detail = cov.method;
      if (cov.missing) {
        detail += "; rank " + cov.missing->first.get_str(10) + " never reaches " + cov.missing->second.get_str(10);
      }
      add(level_name("coverage", n), cov.passed, detail);
    });
  }
}

void Suite::theta_properties() {
  const DomainFamily& family = inner_.family();
  const int top = family.exact_prefix_end();
  guarded("theta decomposition", [&] {
    const std::vector<LatticeVector> points =
        sample_points(family.domain(top), options_.samples, options_.exhaustive_limit, rng_);
    for (const auto& g : points) {
      ThetaDecomposition dec = decompose(family, g, options_.depth_budget);
      std::string fault;
      if (!(dec.sum() == g)) fault = "components do not sum to the point";
      int first_zero = -1;
      for (int i = family.first_index() + 1; fault.empty() && i <= top + 1; ++i) {
        const LatticeVector th = dec.component(i);
        if (first_zero < 0 && th.is_zero()) first_zero = i;
        if (i > dec.depth) {
          if (!th.is_zero()) fault = "component beyond the depth is nonzero";
          continue;
        }
        if (!(th == family.project(i, g) - family.project(i - 1, g))) {
          fault = "component " + std::to_string(i) + " differs from the projection difference";
        } else if (!family.domain(i).contains(th) || !family.period(i - 1).divides(th)) {
          fault = "component " + std::to_string(i) + " is not in the level grid";
        }
      }
      if (fault.empty() && first_zero != min_zero_level(family, g, options_.depth_budget)) {
        fault = "least vanishing component disagrees";
      }
      if (!fault.empty()) {
        add("theta decomposition", false, fault + " at " + g.str());
        return;
      }
    }
    add("theta decomposition", true,
        std::to_string(points.size()) + " points of D_" + std::to_string(top) + " decompose consistently");
  });
}

void Suite::per_formula() {
  const DomainFamily& family = handle_.family();
  int region = family.exact_prefix_end();
  std::uint64_t limit = options_.exhaustive_limit;
  if (plan_.mode == PlanMode::kToy) {
    while (region > 1 && family.domain(region).cardinality() > Integer(static_cast<unsigned long>(kToyExhaustiveCells))) {
      --region;
    }
    limit = kToyExhaustiveCells;
  }
  for (int n = 1; n <= std::max(1, region - 1); ++n) {
    const std::string name = level_name("periodic part", n);
    guarded(name, [&] {
      const FundamentalDomain box = family.domain(region);
      const std::vector<LatticeVector> points = sample_points(box, options_.samples, limit, rng_);
      const DiagonalMatrix period = family.period(n);
      std::size_t periodic = 0, witnessed = 0;
      for (const auto& g : points) {
        const Letter value = handle_(g);
        if (per_membership(handle_, g, n)) {
          ++periodic;
          for (int r = 0; r < 4 && n < region; ++r) {
            const LatticeVector h = box.point_at(rng_.below(box.cardinality()));
            const LatticeVector other = h - family.project(n, h) + family.project(n, g);
            if (handle_(other) != value) {
              add(name, false, "periodic point " + g.str() + " differs from " + other.str());
              return;
            }
          }
          continue;
        }
        auto w = nonperiodicity_witness(handle_, g, n);
        if (!w) {
          add(name, false, "no witness for the non-periodic point " + g.str());
          return;
        }
        const bool valid = period.divides(w->first) && period.divides(w->second) &&
                           w->first_letter != w->second_letter && handle_(g + w->first) == w->first_letter &&
                           handle_(g + w->second) == w->second_letter;
        if (!valid) {
          add(name, false, "witness for " + g.str() + " does not check out");
          return;
        }
        ++witnessed;
      }
      add(name, true,
          std::to_string(periodic) + " periodic and " + std::to_string(witnessed) + " witnessed points of D_" +
              std::to_string(region));
    });
  }
}

void Suite::frequencies() {
  for (int t = 0; t <= construction_->levels(); ++t) {
    const std::string name = level_name("frequencies", t);
    bool skipped = false;
    try {
      ProbeOptions probe{options_.samples, options_.seed, CensusOptions{options_.cell_budget, options_.threads, {}}};
      FrequencyReport r = unique_ergodicity_probe(inner_, t, probe);
      const Magnitude& q = construction_->block_count(t);
      std::ostringstream detail;
      detail << r.rows.size() << " blocks against " << r.columns.size() << " columns, ap in [" << to_string(r.min)
             << ", " << to_string(r.max) << "]";
      bool ok = r.passed;
      if (q.exact) {
        Rational expected(1, *q.exact);
        ok = ok && r.rows.size() == q.exact->get_ui() && r.min == expected && r.max == expected;
        detail << ", expected " << to_string(expected);
      }
      if (r.witness) {
        const auto& w = *r.witness;
        detail << "; block " << w[0] << " differs between columns " << w[1] << " and " << w[2];
      }
      add(name, ok, detail.str());
    } catch (const BudgetExceeded& e) {
      skip(name, e.what());
      skipped = true;
    } catch (const DepthBudgetExceeded& e) {
      skip(name, e.what());
      skipped = true;
    } catch (const Error& e) {
      add(name, false, e.what());
    }
    if (skipped) break;
  }
}

void Suite::entropy() {
  guarded("entropy estimates", [&] {
    bool any = false;
    for (const auto& e : handle_entropy_estimates(handle_)) {
      if (!e.inside) continue;
      any = true;
      std::string detail = "estimate " + e.estimate.str(10);
      if (e.bracket_lo && e.bracket_hi) {
        detail += " against [" + e.bracket_lo->str(10) + ", " + e.bracket_hi->str(10) + "]";
      }
      add(level_name("entropy bracket", e.level), *e.inside == Verdict::kTrue, detail);
    }
    if (!any) skip("entropy estimates", "no level carries a bracket");
  });
}

void Suite::carry_closed_form() {
  const DomainFamily& family = inner_.family();
  const int top = std::min(family.exact_prefix_end(), 3);
  for (int t = 1; t <= top; ++t) {
    const std::string name = level_name("carry closed form", t);
    guarded(name, [&] {
      const FundamentalDomain dt = family.domain(t);
      const DiagonalMatrix p = family.period(t);
      const Integer card = dt.cardinality();
      std::vector<std::pair<LatticeVector, LatticeVector>> pairs;
      if (card * card <= Integer(static_cast<unsigned long>(options_.exhaustive_limit))) {
        dt.for_each_point([&](const LatticeVector& c) {
          dt.for_each_point([&](const LatticeVector& d) { pairs.emplace_back(c, d); });
        });
      } else {
        pairs.emplace_back(dt.lower(), dt.lower());
        pairs.emplace_back(dt.upper_inclusive(), dt.upper_inclusive());
        while (pairs.size() < 4 * options_.samples) {
          pairs.emplace_back(dt.point_at(rng_.below(card)), dt.point_at(rng_.below(card)));
        }
      }
      for (const auto& [c, d] : pairs) {
        const LatticeVector eps = epsilon_t(family, c, d, t);
        for (std::size_t i = 0; i < family.dim(); ++i) {
          if (eps[i] != floor_div(c[i] + d[i] - dt.lower()[i], p[i])) {
            add(name, false, "carry of " + c.str() + " and " + d.str() + " is " + eps.str());
            return;
          }
        }
        LatticeVector z(family.dim());
        for (std::size_t i = 0; i < family.dim(); ++i) z[i] = rng_.below(5) - 2;
        if (!(epsilon_t(family, c, d + p.apply(z), t) == eps)) {
          add(name, false, "carry of " + c.str() + " changes along the level subgroup");
          return;
        }
      }
      add(name, true, std::to_string(pairs.size()) + " pairs match the per-axis floor formula");
    });
  }
}

void Suite::skew() {
  const DomainFamily& family = inner_.family();
  const int top = family.exact_prefix_end();
  for (int t = 1; t <= std::min(2, construction_->levels()) && t + 1 <= top; ++t) {
    const std::string name = level_name("skew equivariance", t);
    guarded(name, [&] {
      Census c = census(inner_, t, CensusOptions{options_.cell_budget, options_.threads, {}});
      const FundamentalDomain next = family.domain(t + 1);
      const LatticeVector g0 = next.point_at(rng_.below(next.cardinality()));
      const LatticeVector g = next.point_at(rng_.below(next.cardinality()));
      const FundamentalDomain region = family.domain(top);
      const DiagonalMatrix p = family.period(t + 1);
      std::vector<Integer> sides(family.dim());
      for (std::size_t i = 0; i < family.dim(); ++i) {
        sides[i] = std::clamp(Integer(region.sides()[i] / (4 * p[i])), Integer(1), Integer(3));
      }
      const FundamentalDomain window(0, LatticeVector(family.dim()), sides);
      const ArrayHandle y = inner_.translated(g0);
      if (!verify_pi_t(y, t, window)) {
        add(level_name("translate representative", t), false, "periodic parts disagree for translation " + g0.str());
        return;
      }
      SkewCheck s = skew_equivariance_check(y, g, t, window, c);
      std::string detail = "translation " + g0.str() + ", action " + g.str() + ", carry " + s.carry.str() + ", " +
                           std::to_string(s.cells) + " cells";
      if (s.mismatch) detail += "; mismatch at " + s.mismatch->str();
      if (!s.detail.empty()) detail += "; " + s.detail;
      add(name, s.verdict == Verdict::kTrue && s.first_coordinate, detail);
    });
  }
}

void Suite::toy_oracles() {
  for (int t = 1; t <= construction_->levels(); ++t) {
    const std::string name = level_name("census equals block set", t);
    guarded(name, [&] {
      const Magnitude& q = construction_->block_count(t);
      if (!q.exact || *q.exact > Integer(static_cast<unsigned long>(options_.exhaustive_limit))) {
        skip(name, "too many blocks to materialize");
        return;
      }
      Census c = census(inner_, t, CensusOptions{options_.cell_budget, options_.threads, {}});
      std::set<std::vector<Letter>> from_census, materialized;
      for (const auto& b : c.blocks()) from_census.insert(b.letters);
      for (Integer j = 1; j <= *q.exact; ++j) {
        materialized.insert(construction_->materialize(t, j, options_.cell_budget).letters);
      }
      add(name, from_census == materialized,
          std::to_string(from_census.size()) + " census blocks, " + std::to_string(materialized.size()) +
              " materialized blocks");
    });
    const std::string base = level_name("patch equals base block", t);
    guarded(base, [&] {
      const Patch p = patch(inner_, inner_.family().domain(t), PatchOptions{options_.cell_budget, options_.threads});
      add(base, p == construction_->materialize(t, 1, options_.cell_budget),
          std::to_string(p.letters.size()) + " cells of D_" + std::to_string(t));
    });
  }
}

}  // namespace

bool SuiteReport::passed() const { return failures() == 0; }

std::size_t SuiteReport::failures() const {
  return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const SuiteCheck& c) {
    return !c.passed && !c.skipped;
  }));
}

const SuiteCheck* SuiteReport::first_failure() const {
  for (const auto& c : checks) {
    if (!c.passed && !c.skipped) return &c;
  }
  return nullptr;
}

SuiteReport run_verify_suite(const ConstructionPlan& plan, const SuiteOptions& options) {
  return Suite(plan, options).run();
}

}  // namespace toeplitz_forge::cli
