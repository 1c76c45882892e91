#include <benchmark/benchmark.h>

#include "rotorvib/nn/model.hpp"
#include "rotorvib/nn/train.hpp"
#include "rotorvib/rng.hpp"

namespace {

using rotorvib::nn::Model;
using rotorvib::nn::Tensor;

Tensor random_batch(int n, int side, std::uint64_t seed) {
  rotorvib::Rng rng(seed);
  Tensor x({n, 3, side, side});
  for (auto& v : x.data) v = static_cast<float>(rng.uniform01());
  return x;
}

static void Conv3x3Forward(benchmark::State& state) {
  const int ch = static_cast<int>(state.range());
  rotorvib::Rng rng(6);
  rotorvib::nn::Tensor x({4, ch, 64, 64}), w({ch, ch, 3, 3}), b({ch}), y;
  for (auto& v : x.data) v = static_cast<float>(rng.uniform01());
  for (auto& v : w.data) v = static_cast<float>(rng.uniform01() - 0.5);
  for (auto _ : state) {
    rotorvib::nn::conv3x3_forward(x, w, b, y);
    benchmark::DoNotOptimize(y);
  }
  state.SetItemsProcessed(state.iterations() * 4LL * ch * ch * 9 * 64 * 64);
}
BENCHMARK(Conv3x3Forward)->Arg(8)->Arg(16)->Arg(32);

static void DeskModelTrainStep(benchmark::State& state) {
  Model model(rotorvib::nn::build_vgg19_gap(0.125, 64, 4), 1);
  rotorvib::nn::TrainConfig cfg;
  cfg.weight_decay = 5e-4;
  cfg.milestones = {};
  rotorvib::nn::Trainer trainer(model, cfg);
  const Tensor x = random_batch(4, 64, 7);
  const std::vector<int> labels = {0, 1, 2, 3};
  for (auto _ : state) {
    const double loss = trainer.step(x, labels, 0.01);
    benchmark::DoNotOptimize(loss);
  }
}
BENCHMARK(DeskModelTrainStep);

static void DeskModelInference(benchmark::State& state) {
  Model model(rotorvib::nn::build_vgg19_gap(0.125, 64, 4), 1);
  const Tensor x = random_batch(8, 64, 8);
  for (auto _ : state) {
    auto logits = model.forward(x, /*training=*/false, nullptr);
    benchmark::DoNotOptimize(logits);
  }
}
BENCHMARK(DeskModelInference);

}  // namespace
