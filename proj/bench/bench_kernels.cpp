// Serial vs OpenMP timings for the grid kernels. Arg 0 is serial, 1 parallel.

#include <benchmark/benchmark.h>

#include "posdelay/certify.hpp"
#include "posdelay/ddesim.hpp"

using namespace posdelay;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::Parallel : Exec::Serial; }

SystemSpec example1() {
  return SystemSpec::from_strings({"x1*(1 - exp(x1 + x2))", "-x2"}, {"x1*x2", "x2/(1+x2)"}, 1.0);
}

void BM_SupBox(benchmark::State& state) {
  const Expr e = Expr::parse("x1 - x1^3 + 0.5*x2 - x3^2 + exp(-x1*x2)", 3);
  BoxSolverConfig cfg;
  cfg.resolution = static_cast<int>(state.range(1));
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(sup_box(e, {2, 1, 1}, cfg));
}
BENCHMARK(BM_SupBox)->ArgsProduct({{0, 1}, {33, 65}})->Unit(benchmark::kMillisecond);

void BM_Certificate(benchmark::State& state) {
  const auto sys = example1();
  CertifyConfig cfg;
  cfg.exec = exec_of(state);
  cfg.solver.exec = cfg.exec;
  for (auto _ : state) benchmark::DoNotOptimize(find_certificate(sys, static_cast<int>(state.range(1)), cfg));
}
BENCHMARK(BM_Certificate)->ArgsProduct({{0, 1}, {3, 5}})->Unit(benchmark::kMillisecond);

void BM_Scan(benchmark::State& state) {
  const auto sys = example1();
  BoxSolverConfig cfg;
  cfg.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(scan_condition(sys, 5.0, 500, cfg, kMarginEps, cfg.exec));
}
BENCHMARK(BM_Scan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  const auto sys = example1();
  const std::vector<HistorySpec> phis{HistorySpec::constant({0.5, 0.5}), HistorySpec::constant({2, 1}),
                                      HistorySpec::constant({0, 3})};
  for (auto _ : state)
    benchmark::DoNotOptimize(delay_sweep(sys, {0.0, 0.5, 1.0, 5.0, 10.0}, phis, 20.0, 0.01, 1e-3, exec_of(state)));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
