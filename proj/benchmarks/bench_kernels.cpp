#include <benchmark/benchmark.h>

#include <random>

#include "momentsnet/kernels.hpp"

using namespace momentsnet;

namespace {

void BM_BuildBank(benchmark::State& state) {
  const auto family = static_cast<Family>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(build_kernel_bank({family}, k, k, 9));
  state.SetLabel(std::string(family_name(family)));
}
BENCHMARK(BM_BuildBank)
    ->ArgsProduct({{static_cast<long>(Family::Zernike), static_cast<long>(Family::Tchebichef),
                    static_cast<long>(Family::Krawtchouk), static_cast<long>(Family::DualHahn),
                    static_cast<long>(Family::PCET)},
                   {7, 11}});

void BM_MomentProject(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  const auto bank = build_kernel_bank({Family::Zernike}, k, k, 9);
  RealGrid patch(k, k);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto& v : patch.values()) v = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(moment_project(patch, bank));
}
BENCHMARK(BM_MomentProject)->Arg(7)->Arg(11);

}  // namespace
