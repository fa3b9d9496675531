#include <benchmark/benchmark.h>

#include <random>

#include "hdseizure/dataio.hpp"
#include "hdseizure/encoder.hpp"
#include "hdseizure/features.hpp"
#include "hdseizure/learning.hpp"

using namespace hdseizure;

namespace {

const Recording& DemoRecording() {
  static const Recording rec = SynthGenerate(MultimodalDemoSpec(1, 120.0), 1);
  return rec;
}

// Encoded training data with class 0 spread over three modes and class 1 on
// one, at roughly 10:1.
struct Encoded {
  std::vector<Hypervector> x;
  std::vector<int> y;
  Hypervector tie;
};

const Encoded& DemoEncoded() {
  static const Encoded data = [] {
    Encoded d;
    const std::size_t dim = kDefaultDim;
    std::mt19937_64 rng(3);
    std::bernoulli_distribution flip(0.2);
    std::vector<Hypervector> modes;
    for (std::uint64_t m = 0; m < 4; ++m) modes.push_back(RandomHypervector(dim, m + 10));
    for (std::size_t i = 0; i < 2200; ++i) {
      const bool seizure = i % 11 == 5;
      Hypervector v = seizure ? modes[3] : modes[i % 3];
      for (std::size_t b = 0; b < dim; ++b) {
        if (flip(rng)) v.Flip(b);
      }
      d.x.push_back(std::move(v));
      d.y.push_back(seizure ? 1 : 0);
    }
    d.tie = RandomHypervector(dim, 77);
    return d;
  }();
  return data;
}

}  // namespace

static void BM_WindowFeatures(benchmark::State& state) {
  const auto& rec = DemoRecording();
  const auto reg = state.range(0) == 0 ? DefaultRegistry() : CompactRegistry();
  const auto n = static_cast<std::size_t>(4.0 * rec.fs);
  for (auto _ : state) benchmark::DoNotOptimize(ComputeWindowFeatures(rec, 0, n, reg));
  state.SetLabel(reg.id);
}
BENCHMARK(BM_WindowFeatures)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

static void BM_EncodeWindow(benchmark::State& state) {
  const auto& rec = DemoRecording();
  const auto reg = DefaultRegistry();
  const auto windows = ExtractFeatures(rec, 4.0, 4.0, reg);
  const auto memory = FitItemMemory(windows, reg.names(), rec.channels, ItemMemoryOptions{});
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(EncodeWindow(windows[i++ % windows.size()], memory));
}
BENCHMARK(BM_EncodeWindow)->Unit(benchmark::kMicrosecond);

static void BM_Train(benchmark::State& state) {
  const auto& d = DemoEncoded();
  const auto strategy = kAllStrategies[static_cast<std::size_t>(state.range(0))];
  const TrainingSet set{d.x, d.y, {0}, 0.5};
  const LearningOptions options;
  for (auto _ : state) benchmark::DoNotOptimize(Train(strategy, set, options, d.tie));
  state.SetLabel(std::string(StrategyTag(strategy)));
}
BENCHMARK(BM_Train)->DenseRange(0, 8)->Unit(benchmark::kMillisecond);
