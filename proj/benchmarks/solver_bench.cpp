#include <benchmark/benchmark.h>

#include "evcap/bp.hpp"
#include "evcap/formulation.hpp"
#include "evcap/generator.hpp"
#include "evcap/heuristic.hpp"
#include "evcap/queueing.hpp"

namespace {

using namespace evcap;

Instance tiny(std::uint64_t seed) {
  auto p = preset_params(Preset::Tiny, 4);
  p.n_zones = 5;
  p.n_locations = 6;
  return generate(p, seed);
}

void rho_table(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(queueing::RhoTable::build(m, 2, 0.9));
}
BENCHMARK(rho_table)->Arg(10)->Arg(30);

void greedy_heuristic(benchmark::State& state) {
  const auto inst = generate(preset_params(state.range(0) ? Preset::Medium : Preset::Small, 10), 1);
  for (auto _ : state) benchmark::DoNotOptimize(heuristic::best_greedy(inst));
}
BENCHMARK(greedy_heuristic)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void relaxation_lp(benchmark::State& state) {
  const auto built = build_revcec(tiny(1));
  for (auto _ : state) benchmark::DoNotOptimize(milp::solve_lp(built.model));
}
BENCHMARK(relaxation_lp)->Unit(benchmark::kMillisecond);

void mip_tiny(benchmark::State& state) {
  const auto built = build_evcec(tiny(2));
  for (auto _ : state) benchmark::DoNotOptimize(milp::solve_mip(built.model));
}
BENCHMARK(mip_tiny)->Unit(benchmark::kMillisecond);

void branch_and_price_tiny(benchmark::State& state) {
  const auto inst = tiny(2);
  for (auto _ : state) benchmark::DoNotOptimize(bp::branch_and_price(inst));
}
BENCHMARK(branch_and_price_tiny)->Unit(benchmark::kMillisecond);

}  // namespace
