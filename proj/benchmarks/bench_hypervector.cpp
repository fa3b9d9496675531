#include <benchmark/benchmark.h>

#include "hdseizure/hypervector.hpp"

using namespace hdseizure;

static void BM_Bind(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto a = RandomHypervector(dim, 1);
  const auto b = RandomHypervector(dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Bind(a, b));
}
BENCHMARK(BM_Bind)->Arg(1024)->Arg(10000);

static void BM_Similarity(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto a = RandomHypervector(dim, 1);
  const auto b = RandomHypervector(dim, 2);
  for (auto _ : state) benchmark::DoNotOptimize(Similarity(a, b));
}
BENCHMARK(BM_Similarity)->Arg(1024)->Arg(10000);

static void BM_AccumulatorAdd(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  const auto v = RandomHypervector(dim, 1);
  Accumulator acc(dim);
  for (auto _ : state) {
    acc.Add(v, FixedWeight(1));
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_AccumulatorAdd)->Arg(1024)->Arg(10000);

static void BM_Binarize(benchmark::State& state) {
  const auto dim = static_cast<std::size_t>(state.range(0));
  Accumulator acc(dim);
  for (std::uint64_t s = 0; s < 7; ++s) acc.Add(RandomHypervector(dim, s), FixedWeight::One());
  const auto tie = RandomHypervector(dim, 99);
  for (auto _ : state) benchmark::DoNotOptimize(Binarize(acc, tie));
}
BENCHMARK(BM_Binarize)->Arg(1024)->Arg(10000);
