#include <benchmark/benchmark.h>

#include <random>

#include "momentsnet/pipeline.hpp"

using namespace momentsnet;

namespace {

RealGrid noise_image(std::size_t n) {
  RealGrid g(n, n);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto& v : g.values()) v = u(rng);
  return g;
}

void BM_ApplyBank(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto bank = build_kernel_bank({Family::Zernike}, k, k, 9);
  const auto image = noise_image(32);
  for (auto _ : state) benchmark::DoNotOptimize(apply_bank(image, bank));
  state.SetItemsProcessed(state.iterations() * 32 * 32);
}
BENCHMARK(BM_ApplyBank)->Arg(5)->Arg(7)->Arg(11);

void BM_ExtractFeatures(benchmark::State& state) {
  NetConfig c;
  c.stages = static_cast<int>(state.range(0));
  c.family = {Family::Zernike};
  c.l1 = c.stages == 1 ? 9 : 8;
  c.l2 = 8;
  c.k1 = c.k2 = c.stages == 1 ? 11 : 7;
  c.h1 = c.h2 = c.stages == 1 ? 8 : 7;
  c.overlap = 0.5;
  c.threshold = 0.0;
  c.validate();
  const auto banks = build_net_banks(c);
  const auto image = noise_image(c.input_rows);
  for (auto _ : state) benchmark::DoNotOptimize(extract_features(image, c, banks));
}
BENCHMARK(BM_ExtractFeatures)->Arg(1)->Arg(2)->Unit(benchmark::kMillisecond);

}  // namespace
