#include <benchmark/benchmark.h>

#include "umbilic/scenarios.hpp"
#include "umbilic/sweep.hpp"

using namespace umbilic;

namespace {

ClosedLoopSystem aircraft() {
  const auto p = PlantParams::nominal(PlantFamily::aircraft);
  return ClosedLoopSystem::build(p, deployed_controllers(p, {0.1, 0.3, 0.7}), 1.0);
}

void BM_Rhs(benchmark::State& state) {
  const auto sys = aircraft();
  Eigen::VectorXd x(3);
  x << 0.3, -0.2, 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(sys.rhs(x));
}
BENCHMARK(BM_Rhs);

void BM_Jacobian(benchmark::State& state) {
  const auto sys = aircraft();
  Eigen::VectorXd x(3);
  x << 0.3, -0.2, 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(sys.jacobian(x));
}
BENCHMARK(BM_Jacobian);

void BM_Integrate(benchmark::State& state) {
  const auto sys = aircraft();
  SolverConfig c;
  c.method = static_cast<SolverMethod>(state.range(0));
  c.t_end = 100.0;
  c.step = 0.01;
  c.record_every = 10;
  for (auto _ : state) benchmark::DoNotOptimize(integrate(sys, Eigen::VectorXd::Zero(3), c));
}
BENCHMARK(BM_Integrate)->Arg(static_cast<int>(SolverMethod::rk4_fixed))
    ->Arg(static_cast<int>(SolverMethod::rk45_adaptive))->Unit(benchmark::kMillisecond);

void BM_FindEquilibria(benchmark::State& state) {
  const auto sys = aircraft();
  const std::vector<Interval> box(3, Interval{-20, 20});
  for (auto _ : state) benchmark::DoNotOptimize(find_equilibria_numeric(sys, box, 7));
}
BENCHMARK(BM_FindEquilibria)->Unit(benchmark::kMillisecond);

void BM_SweepFig5(benchmark::State& state) {
  const auto& spec = builtin_scenario("fig5");
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(spec, static_cast<unsigned>(state.range(0))));
}
BENCHMARK(BM_SweepFig5)->Arg(1)->Arg(0)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
