#include <benchmark/benchmark.h>

#include "xtalk/xtalk.hpp"

using namespace xtalk;

namespace {

PulseParams cz_pulse() {
  PulseParams p;
  p.delta_amp = 3.5727200527201384;
  p.delta_width = 1.1621607156408618;
  p.delta_offset = -0.49463499903306984;
  return p;
}

void BM_QubitBlockSingle(benchmark::State& state) {
  SystemParams s;
  s.epsilon = 1e-2;
  const auto spec = single_pulse(cz_pulse());
  IntegratorConfig cfg;
  cfg.samples_per_pulse = 0;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_qubit_block(spec, s, cfg));
}
BENCHMARK(BM_QubitBlockSingle)->Unit(benchmark::kMillisecond);

void BM_FullStateDouble(benchmark::State& state) {
  SystemParams s;
  s.epsilon = 1e-2;
  const auto spec = double_pulse(cz_pulse(), 1.0);
  const StateVector psi = kron(kron(plus_state(), plus_state()), plus_state());
  IntegratorConfig cfg;
  cfg.samples_per_pulse = 0;
  for (auto _ : state) benchmark::DoNotOptimize(propagate(psi, spec, s, cfg));
}
BENCHMARK(BM_FullStateDouble)->Unit(benchmark::kMillisecond);

void BM_GateObjective(benchmark::State& state) {
  IntegratorConfig cfg;
  cfg.step = state.range(0) * 1e-3;
  cfg.samples_per_pulse = 0;
  for (auto _ : state) benchmark::DoNotOptimize(gate_fidelity_objective(cz_pulse(), GateTarget::cz(), 21.1, cfg));
}
BENCHMARK(BM_GateObjective)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_PerturbReport(benchmark::State& state) {
  const auto spec = double_pulse(cz_pulse(), 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(perturb_report(spec));
}
BENCHMARK(BM_PerturbReport)->Unit(benchmark::kMillisecond);

void BM_Hamiltonian(benchmark::State& state) {
  SystemParams s;
  s.epsilon = 0.1;
  for (auto _ : state) benchmark::DoNotOptimize(build_hamiltonian(s, Complex(0.3, 0.4), 1.2));
}
BENCHMARK(BM_Hamiltonian);

}  // namespace

BENCHMARK_MAIN();
