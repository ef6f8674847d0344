// Serial reference vs OpenMP kernels. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include <map>
#include <numeric>

#include "corextm/analytics.hpp"
#include "corextm/corex.hpp"
#include "corextm/corex_reference.hpp"
#include "planted.hpp"

using namespace corextm;

namespace {

struct Workload {
  testing::PlantedCorpus pc;
  Vocabulary vocab;
  DocTermMatrix matrix;
  SeedSet seeds;
  FitOptions opts;
  std::vector<uint32_t> docs;
  CorexModel model;
};

// 20 planted topics over 50 words each; the model is fitted once so the
// per-iteration kernels run on realistic parameters.
const Workload& workload(size_t n_docs) {
  static std::map<size_t, Workload> cache;
  auto [it, fresh] = cache.try_emplace(n_docs);
  Workload& w = it->second;
  if (!fresh) return w;
  w.pc = testing::make_planted({.n_docs = n_docs, .n_topics = 20, .words_per_topic = 50, .noise_words = 200});
  w.vocab = build_vocabulary(w.pc.docs, 1, 20000);
  w.matrix = vectorize(w.pc.docs, w.vocab);
  w.seeds.groups = testing::planted_anchor_groups(w.pc);
  w.opts.n_topics = 20;
  w.opts.n_iter = 5;
  w.docs.resize(n_docs);
  std::iota(w.docs.begin(), w.docs.end(), 0u);
  w.model = fit(w.matrix, w.vocab, w.seeds, w.opts);
  return w;
}

void BM_EStepParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(kernels::estep(w.model, w.matrix, w.docs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_EStepReference(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::estep(w.model, w.matrix, w.docs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_AccumulateParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  const auto e = kernels::estep(w.model, w.matrix, w.docs);
  for (auto _ : state) benchmark::DoNotOptimize(kernels::accumulate(w.matrix, w.docs, e.q1, 20));
}

void BM_AccumulateReference(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  const auto e = kernels::estep(w.model, w.matrix, w.docs);
  for (auto _ : state) benchmark::DoNotOptimize(reference::accumulate(w.matrix, w.docs, e.q1, 20));
}

void BM_FitParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  FitOptions o = w.opts;
  o.n_iter = 10;
  for (auto _ : state) benchmark::DoNotOptimize(fit(w.matrix, w.vocab, w.seeds, o));
}

void BM_FitReference(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  FitOptions o = w.opts;
  o.n_iter = 10;
  for (auto _ : state) benchmark::DoNotOptimize(reference::fit(w.matrix, w.vocab, w.seeds, o));
}

void BM_HeatmapParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(similarity_heatmap(w.pc.docs, w.pc.truth, w.pc.docs, w.pc.truth, 20));
  }
}

void BM_HeatmapReference(benchmark::State& state) {
  const auto& w = workload(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(reference::similarity_heatmap(w.pc.docs, w.pc.truth, w.pc.docs, w.pc.truth, 20));
  }
}

}  // namespace

BENCHMARK(BM_EStepParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EStepReference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AccumulateParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AccumulateReference)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitReference)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeatmapParallel)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HeatmapReference)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
