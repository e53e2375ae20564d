#include <benchmark/benchmark.h>

#include "lindcd/counterdiabatic.hpp"
#include "lindcd/evolution.hpp"
#include "lindcd/models.hpp"
#include "lindcd/spectral.hpp"

using namespace lindcd;

namespace {

const models::AnnealingScenario& open_qubit() {
  static const auto sc = models::make_qubit_scenario({}, models::BathSpec{});
  return sc;
}

const models::AnnealingScenario& open_pspin() {
  static const auto sc = models::make_pspin_scenario({}, models::BathSpec{});
  return sc;
}

void BM_AmeQubit(benchmark::State& state) {
  const auto& sc = open_qubit();
  for (auto _ : state)
    benchmark::DoNotOptimize(models::ame_superop(sc, 0.5));
}
BENCHMARK(BM_AmeQubit);

void BM_AmePspin(benchmark::State& state) {
  const auto& sc = open_pspin();
  for (auto _ : state)
    benchmark::DoNotOptimize(models::ame_superop(sc, 0.5));
}
BENCHMARK(BM_AmePspin);

void BM_DecomposePspin(benchmark::State& state) {
  const auto gen = models::ame_superop(open_pspin(), 0.5);
  for (auto _ : state)
    benchmark::DoNotOptimize(spectral::decompose(gen));
}
BENCHMARK(BM_DecomposePspin);

void BM_ExactGaugeQubit(benchmark::State& state) {
  const auto provider = cd::GaugeProvider::exact(open_qubit());
  for (auto _ : state)
    benchmark::DoNotOptimize(provider.gauge(0.5));
}
BENCHMARK(BM_ExactGaugeQubit);

void BM_VariationalPoint(benchmark::State& state,
                         const std::string& ansatz) {
  const auto& sc = open_pspin();
  const cd::GeneratorFn gen_at = [&sc](double s) {
    return models::lindbladian(sc, s);
  };
  const auto gen = gen_at(0.5);
  const auto dgen = cd::generator_derivative(gen_at, 0.5);
  const auto terms = cd::named_ansatz(ansatz, sc);
  for (auto _ : state) {
    const auto sys = cd::assemble_lsq(gen, dgen.value, terms, sc.basis);
    benchmark::DoNotOptimize(cd::solve_variational(sys));
  }
}
BENCHMARK_CAPTURE(BM_VariationalPoint, sy, "Sy");
BENCHMARK_CAPTURE(BM_VariationalPoint, dissipators, "basis_dissipators");

void BM_EvolveClosedQubit(benchmark::State& state) {
  const auto sc = models::make_qubit_scenario({}, std::nullopt);
  const auto gauge = cd::GaugeProvider::none();
  for (auto _ : state)
    benchmark::DoNotOptimize(evo::evolve(sc, gauge, 1.0, {.samples = 21}));
}
BENCHMARK(BM_EvolveClosedQubit);

void BM_EvolveOpenPspin(benchmark::State& state) {
  const auto& sc = open_pspin();
  const auto gauge = cd::GaugeProvider::none();
  for (auto _ : state)
    benchmark::DoNotOptimize(evo::evolve(sc, gauge, 1.0, {.samples = 21}));
}
BENCHMARK(BM_EvolveOpenPspin);

}  // namespace

BENCHMARK_MAIN();
