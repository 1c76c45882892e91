#include <benchmark/benchmark.h>

#include <complex>

#include "rotorvib/dsp.hpp"
#include "rotorvib/rng.hpp"

namespace {

static void Fft(benchmark::State& state) {
  rotorvib::Rng rng(1);
  std::vector<std::complex<double>> x(static_cast<std::size_t>(state.range()));
  for (auto& v : x) v = {rng.uniform01() * 2 - 1, 0.0};
  for (auto _ : state) {
    auto y = x;
    rotorvib::fft_inplace(y);
    benchmark::DoNotOptimize(y);
  }
  state.SetComplexityN(state.range());
}
BENCHMARK(Fft)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

static void StftWindow(benchmark::State& state) {
  rotorvib::Rng rng(2);
  std::vector<float> x(3932);
  for (auto& v : x) v = static_cast<float>(rng.uniform01() * 2 - 1);
  const rotorvib::StftConfig cfg;
  for (auto _ : state) {
    auto spec = rotorvib::stft(x, cfg, 65536.0);
    benchmark::DoNotOptimize(spec);
  }
}
BENCHMARK(StftWindow);

static void MfccWindow(benchmark::State& state) {
  rotorvib::Rng rng(3);
  std::vector<float> x(3932);
  for (auto& v : x) v = static_cast<float>(rng.uniform01() * 2 - 1);
  const rotorvib::StftConfig stft_cfg;
  const rotorvib::MelConfig mel_cfg;
  for (auto _ : state) {
    auto m = rotorvib::mfcc(x, stft_cfg, mel_cfg, 65536.0);
    benchmark::DoNotOptimize(m);
  }
}
BENCHMARK(MfccWindow);

}  // namespace

BENCHMARK_MAIN();
