#include <benchmark/benchmark.h>

#include <random>

#include "adgan/metrics.hpp"
#include "adgan/postprocess.hpp"

using namespace adgan;

namespace {

BinaryMask noise_mask(int size, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution on(0.4);
  BinaryMask m(size, size);
  for (auto& v : m.data) v = on(rng);
  return m;
}

void BM_PixelMetrics(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto a = noise_mask(n, 1);
  const auto b = noise_mask(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::pixel_metrics(a, b));
  state.SetItemsProcessed(state.iterations() * n * n);
}
BENCHMARK(BM_PixelMetrics)->Arg(128)->Arg(512);

void BM_ConnectedComponents(benchmark::State& state) {
  const auto m = noise_mask(static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::connected_components(m));
}
BENCHMARK(BM_ConnectedComponents)->Arg(128)->Arg(512);

void BM_ObjectF1(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto pred = metrics::connected_components(noise_mask(n, 4));
  const auto gt = metrics::connected_components(noise_mask(n, 5));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::object_f1(pred, gt));
}
BENCHMARK(BM_ObjectF1)->Arg(128)->Arg(512);

void BM_SemanticPostprocess(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  BinaryMask m(n, n);
  for (int y = 0; y < n; ++y) {
    for (int x = 0; x < n; ++x) {
      const int cy = (y / 32) * 32 + 16, cx = (x / 32) * 32 + 16;
      m(y, x) = (y - cy) * (y - cy) + (x - cx) * (x - cx) < 14 * 14;
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(inference::semantic_postprocess(m));
}
BENCHMARK(BM_SemanticPostprocess)->Arg(128)->Arg(512);

}  // namespace
