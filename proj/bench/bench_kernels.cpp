// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "tempctx/embedder.hpp"
#include "tempctx/synth.hpp"
#include "tempctx/trainer.hpp"

using namespace tempctx;

namespace {

const Dataset& data() {
  static const Dataset d = generate(SynthSpec{});
  return d;
}

struct BatchFixture {
  EmbeddingModel model = init_model(32, 32, 1);
  Sampler sampler{data(), SamplerConfig{}};
  std::vector<TrainingExample> batch;
  explicit BatchFixture(std::size_t n) : batch(batch_for_iteration(sampler, 1, 0, n)) {}
};

void BM_batch_gradient_serial(benchmark::State& st) {
  BatchFixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(batch_gradient_serial(f.model, data(), f.batch, 1, 0, true));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_batch_gradient_parallel_ordered(benchmark::State& st) {
  BatchFixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(batch_gradient_parallel(f.model, data(), f.batch, 1, 0, true, true));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_batch_gradient_parallel_unordered(benchmark::State& st) {
  BatchFixture f(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(batch_gradient_parallel(f.model, data(), f.batch, 1, 0, true, false));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_embed_all_serial(benchmark::State& st) {
  const auto e = Embedder::learned(init_model(32, 32, 1));
  for (auto _ : st) benchmark::DoNotOptimize(embed_all_serial(data(), e));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(data().total_frames()));
}

void BM_embed_all_parallel(benchmark::State& st) {
  const auto e = Embedder::learned(init_model(32, 32, 1));
  for (auto _ : st) benchmark::DoNotOptimize(embed_all_parallel(data(), e));
  st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(data().total_frames()));
}

}  // namespace

BENCHMARK(BM_batch_gradient_serial)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_gradient_parallel_ordered)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_batch_gradient_parallel_unordered)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_all_serial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_all_parallel)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
