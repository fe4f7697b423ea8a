#include <benchmark/benchmark.h>

#include "merit/div_splitter.hpp"
#include "merit/synthetic.hpp"

using namespace merit;

static void BM_Split(benchmark::State& state) {
  synthetic::Options so;
  so.pairs = static_cast<std::size_t>(state.range(0));
  const Corpus corpus(so.lang, synthetic::make_pairs(so));
  const std::size_t n = corpus.size();
  const SplitSpec spec{n * 8 / 10, n / 10, n / 10, 42};
  for (auto _ : state) benchmark::DoNotOptimize(split(corpus, spec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Split)->Arg(10000)->Arg(20000)->Unit(benchmark::kMillisecond);
