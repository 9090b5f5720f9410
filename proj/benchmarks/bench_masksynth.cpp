#include <benchmark/benchmark.h>

#include "adgan/masksynth.hpp"
#include "adgan/phantom.hpp"

using namespace adgan;

namespace {

masksynth::MaskSynthConfig hacat_like() {
  masksynth::MaskSynthConfig c;
  c.a_range = {20.0, 30.0};
  c.n_max = 15;
  return c;
}

void BM_GenerateMask(benchmark::State& state) {
  const auto cfg = hacat_like();
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(masksynth::generate_mask(seed++, cfg));
}
BENCHMARK(BM_GenerateMask);

void BM_RasterizeInstance(benchmark::State& state) {
  const auto spec = masksynth::generate_mask(1, hacat_like());
  for (auto _ : state) benchmark::DoNotOptimize(masksynth::rasterize_instance_mask(spec, 2));
}
BENCHMARK(BM_RasterizeInstance);

void BM_RenderPhantom(benchmark::State& state) {
  const auto spec = masksynth::generate_mask(2, hacat_like());
  const phantom::PhantomParams params;
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(phantom::render_phantom(spec, params, seed++));
}
BENCHMARK(BM_RenderPhantom);

}  // namespace
