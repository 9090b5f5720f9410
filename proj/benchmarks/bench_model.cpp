#include <benchmark/benchmark.h>

#include "adgan/inference.hpp"
#include "adgan/model.hpp"

using namespace adgan;

namespace {

model::GeneratorConfig desk() {
  model::GeneratorConfig c;
  c.scale_preset = model::ScalePreset::kDesk;
  return c;
}

void BM_GeneratorForward(benchmark::State& state) {
  torch::NoGradGuard no_grad;
  torch::manual_seed(0);
  model::Generator g(desk());
  g->eval();
  const auto n = state.range(0);
  const auto x = torch::rand({1, 1, n, n}) * 2 - 1;
  const auto src = model::DomainLabel::of(model::Domain::kImage).to_tensor(1);
  const auto dst = model::DomainLabel::of(model::Domain::kMask).to_tensor(1);
  for (auto _ : state) benchmark::DoNotOptimize(g->decode(g->encode(x, src), dst));
}
BENCHMARK(BM_GeneratorForward)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DiscriminatorForward(benchmark::State& state) {
  torch::NoGradGuard no_grad;
  torch::manual_seed(0);
  model::Discriminator d(desk());
  const auto x = torch::rand({4, 1, 64, 64}) * 2 - 1;
  for (auto _ : state) benchmark::DoNotOptimize(d->forward(x, model::Domain::kMask));
}
BENCHMARK(BM_DiscriminatorForward)->Unit(benchmark::kMillisecond);

void BM_TiledSegment(benchmark::State& state) {
  torch::manual_seed(0);
  inference::InferenceSession session{model::Generator(desk())};
  const ImageTensor x(256, 256, 0.0f);
  for (auto _ : state) benchmark::DoNotOptimize(session.segment(x, 2, 0.0f, {128, 16}));
}
BENCHMARK(BM_TiledSegment)->Unit(benchmark::kMillisecond);

}  // namespace
