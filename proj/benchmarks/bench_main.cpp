#include <benchmark/benchmark.h>

#include "rpl/chessboard.hpp"
#include "rpl/fourier.hpp"
#include "rpl/kernels.hpp"
#include "rpl/monte_carlo.hpp"
#include "rpl/spin_wave.hpp"

using namespace rpl;

static void BM_TransienceNN3(benchmark::State& st) {
  const auto k = KernelSpec::nearest_neighbor(3);
  for (auto _ : st) benchmark::DoNotOptimize(transience_integral(k).value);
}
BENCHMARK(BM_TransienceNN3)->Unit(benchmark::kMillisecond);

static void BM_TorusDft(benchmark::State& st) {
  const TorusSpec t(3, static_cast<int>(st.range(0)));
  std::vector<double> data(t.N());
  for (std::size_t i = 0; i < data.size(); ++i) data[i] = double(i % 7) - 3.0;
  for (auto _ : st) benchmark::DoNotOptimize(torus_dft(t, data));
}
BENCHMARK(BM_TorusDft)->Arg(4)->Arg(8)->Arg(16)->Unit(benchmark::kMicrosecond);

static void BM_GreenFunction(benchmark::State& st) {
  const auto J = periodize(KernelSpec::nearest_neighbor(3), TorusSpec(3, static_cast<int>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(torus_green_function(J)[0]);
}
BENCHMARK(BM_GreenFunction)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

// Sweeps per iteration are fixed, so time per iteration scales as time per sweep.
static void BM_SweepsO2(benchmark::State& st) {
  const auto J = periodize(KernelSpec::nearest_neighbor(3), TorusSpec(3, 6));
  SamplerSpec s;
  s.beta = 1.0;
  s.sweeps = 100;
  s.burn_in = 0;
  s.seed = 1;
  for (auto _ : st) {
    std::size_t n = 0;
    run_chain(ModelSpec::o_n(2), J, s, 0, [&](const SpinConfiguration&) { ++n; });
    benchmark::DoNotOptimize(n);
  }
}
BENCHMARK(BM_SweepsO2)->Unit(benchmark::kMillisecond);

static void BM_SpinWaveCompass(benchmark::State& st) {
  const auto f = SpinWaveIntegrand::compass(0.3);
  for (auto _ : st) benchmark::DoNotOptimize(sw_free_energy(f).F);
}
BENCHMARK(BM_SpinWaveCompass)->Unit(benchmark::kMillisecond);

static void BM_PeierlsCertificate(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(peierls_certificate(100, 100, 12).pass);
}
BENCHMARK(BM_PeierlsCertificate)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
