#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "toeplitz_forge/blocks.hpp"
#include "toeplitz_forge/planner.hpp"
#include "toeplitz_forge/theta.hpp"
#include "toeplitz_forge/toeplitz.hpp"

namespace tf = toeplitz_forge;

namespace {

const tf::ConstructionPlan& k5_plan() {
  static const tf::ConstructionPlan plan = tf::plan_theorem(5, 2, tf::Rational(3, 10));
  return plan;
}

void BM_Plan(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(tf::plan_theorem(5, 2, tf::Rational(3, 10)));
}
BENCHMARK(BM_Plan)->Unit(benchmark::kMillisecond);

void BM_Decompose(benchmark::State& state) {
  const tf::DomainFamily family = tf::build_family(k5_plan());
  long i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(tf::decompose(family, tf::LatticeVector{(i * 7919) % 1000003, i % 7}));
    ++i;
  }
}
BENCHMARK(BM_Decompose);

void BM_XEval(benchmark::State& state) {
  const tf::ArrayHandle x = tf::ArrayHandle::from_plan(k5_plan());
  std::vector<tf::LatticeVector> points;
  for (long i = 0; points.size() < 1024; ++i) {
    const tf::LatticeVector g{(i * 7919) % 1000003, i % 7};
    if (tf::min_zero_level(x.family(), g) < 4) points.push_back(g);
  }
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(x(points[i++ % points.size()]));
}
BENCHMARK(BM_XEval);

void BM_Patch(benchmark::State& state) {
  const tf::ArrayHandle x = tf::ArrayHandle::from_plan(tf::toy_preset("D"));
  const long side = state.range(0);
  const tf::FundamentalDomain box(0, tf::LatticeVector{-side / 2, -side / 2},
                                  {tf::Integer(side), tf::Integer(side)});
  for (auto _ : state) benchmark::DoNotOptimize(tf::patch(x, box));
  state.SetItemsProcessed(state.iterations() * side * side);
}
BENCHMARK(BM_Patch)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_LehmerRank(benchmark::State& state) {
  std::vector<std::uint64_t> perm(static_cast<std::size_t>(state.range(0)));
  std::iota(perm.rbegin(), perm.rend(), 0);
  for (auto _ : state) benchmark::DoNotOptimize(tf::lehmer_rank(perm));
}
BENCHMARK(BM_LehmerRank)->Arg(24)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
