#include <benchmark/benchmark.h>

#include "rotorvib/imaging.hpp"
#include "rotorvib/rng.hpp"

namespace {

static void RenderCanvas(benchmark::State& state) {
  rotorvib::Rng rng(4);
  rotorvib::Matrix m(513, 6);
  for (auto& v : m.data) v = rng.uniform01();
  const auto& cmap = rotorvib::default_colormap();
  for (auto _ : state) {
    auto img = rotorvib::render(m, cmap);
    benchmark::DoNotOptimize(img);
  }
}
BENCHMARK(RenderCanvas);

static void ResizeToInput(benchmark::State& state) {
  rotorvib::Rng rng(5);
  rotorvib::ImageRGB img;
  img.width = 432;
  img.height = 288;
  img.pixels.resize(432 * 288 * 3);
  for (auto& b : img.pixels) b = static_cast<std::uint8_t>(rng.below(256));
  const int side = static_cast<int>(state.range());
  for (auto _ : state) {
    auto out = rotorvib::resize_bilinear(img, side, side);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(ResizeToInput)->Arg(64)->Arg(298);

}  // namespace
