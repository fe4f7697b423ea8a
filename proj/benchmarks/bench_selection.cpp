#include <benchmark/benchmark.h>

#include "merit/epds.hpp"
#include "merit/pipeline.hpp"
#include "merit/synthetic.hpp"

using namespace merit;

static void BM_SelectTopK(benchmark::State& state) {
  synthetic::Rng rng(1);
  std::vector<ScoredPair> pool(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < pool.size(); ++i) {
    pool[i].pair.id = "SNT." + std::to_string(i);
    pool[i].s_final = rng.unit();
  }
  const std::size_t k = pool.size() / 4;
  for (auto _ : state) benchmark::DoNotOptimize(select_top_k(pool, k));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SelectTopK)->Arg(8000)->Arg(40000);

// Filter, features, fallback LM scoring and composite score.
static void BM_ScoreCorpus(benchmark::State& state) {
  synthetic::Options so;
  so.pairs = static_cast<std::size_t>(state.range(0));
  const Corpus corpus(so.lang, synthetic::make_pairs(so));
  PipelineConfig cfg;
  const auto scorer = make_scorer(cfg, corpus);
  for (auto _ : state) benchmark::DoNotOptimize(score_corpus(corpus, cfg.epds, *scorer));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ScoreCorpus)->Arg(1000)->Arg(8000)->Unit(benchmark::kMillisecond);
