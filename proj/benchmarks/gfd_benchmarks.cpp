#include <benchmark/benchmark.h>

#include <vector>

#include "gfd/dataset.hpp"
#include "gfd/fusion_model.hpp"
#include "gfd/layers.hpp"
#include "gfd/rng.hpp"
#include "gfd/series_transform.hpp"
#include "gfd/spectral.hpp"
#include "gfd/training.hpp"

namespace {

std::vector<double> noise(std::size_t n, std::uint64_t seed) {
  gfd::Rng rng(seed);
  std::vector<double> x(n);
  for (auto& v : x) v = rng.gaussian();
  return x;
}

void BM_SeriesToImage(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto x = noise(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(gfd::series_to_image(x, n));
}
BENCHMARK(BM_SeriesToImage)->Arg(64)->Arg(128)->Arg(256);

void BM_Conv3x3(benchmark::State& state) {
  const auto ch = static_cast<std::size_t>(state.range(0));
  gfd::nn::Conv2d conv(ch, ch, 3, 3, 1, 1, 1);
  gfd::Rng rng(2);
  conv.init(rng);
  gfd::Tensor x({8, ch, 16, 16});
  for (auto& v : x.data()) v = rng.gaussian();
  for (auto _ : state) benchmark::DoNotOptimize(conv.forward(x));
}
BENCHMARK(BM_Conv3x3)->Arg(16)->Arg(32)->Arg(64);

void BM_TrainStep(benchmark::State& state) {
  gfd::DatasetConfig d;
  d.windows_per_class = {40, 14, 13, 13};
  const auto ds = gfd::build_dataset(d, 3);
  gfd::TrainConfig config;
  config.channel_scale = 0.25;
  gfd::FusionModel model = gfd::make_model(64, 64, config);
  const auto params = model.parameters();
  auto adam = gfd::make_adam_state(params);
  const std::span<const gfd::PairedSample> batch(ds.train.data(), 32);
  const auto series = gfd::series_batch_of(batch);
  const auto images = gfd::image_batch_of(batch);
  const auto labels = gfd::targets_of(batch, config.loss_mode);
  std::uint64_t step = 0;
  for (auto _ : state) {
    model.zero_grad();
    const auto logits = model.forward_train(series, images, step++);
    const auto loss = gfd::compute_loss(logits, labels, config.loss_mode);
    model.backward(loss.grad);
    gfd::adam_step(params, adam, config.initial_lr);
  }
}
BENCHMARK(BM_TrainStep)->Unit(benchmark::kMillisecond);

void BM_Dft(benchmark::State& state) {
  const auto x = noise(static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) benchmark::DoNotOptimize(gfd::dft(x));
}
BENCHMARK(BM_Dft)->Arg(1000)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
