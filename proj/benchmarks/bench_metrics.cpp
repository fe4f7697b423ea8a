#include <benchmark/benchmark.h>

#include "merit/metrics.hpp"
#include "merit/synthetic.hpp"

using namespace merit;

namespace {

std::vector<std::string> references(std::size_t n) {
  synthetic::Options so;
  so.pairs = n;
  so.noise_rate = 0.0;
  std::vector<std::string> out;
  for (const auto& p : synthetic::make_pairs(so)) out.push_back(p.target_text);
  return out;
}

}  // namespace

static void BM_SentenceBleu(benchmark::State& state) {
  const auto refs = references(64);
  std::vector<metrics::TokenSequence> r, h;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    r.push_back(metrics::tokenize_target(refs[i]));
    h.push_back(metrics::tokenize_target(synthetic::perturb(refs[i], i)));
  }
  for (auto _ : state)
    for (std::size_t i = 0; i < r.size(); ++i) benchmark::DoNotOptimize(metrics::bleu4(h[i], r[i]));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(r.size()));
}
BENCHMARK(BM_SentenceBleu);

static void BM_SentenceChrf(benchmark::State& state) {
  const auto refs = references(64);
  std::vector<std::string> hyps;
  for (std::size_t i = 0; i < refs.size(); ++i) hyps.push_back(synthetic::perturb(refs[i], i));
  for (auto _ : state)
    for (std::size_t i = 0; i < refs.size(); ++i) benchmark::DoNotOptimize(metrics::chrf(hyps[i], refs[i]));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(refs.size()));
}
BENCHMARK(BM_SentenceChrf);

static void BM_CorpusEval(benchmark::State& state) {
  const auto refs = references(static_cast<std::size_t>(state.range(0)));
  std::vector<std::string> hyps;
  for (std::size_t i = 0; i < refs.size(); ++i) hyps.push_back(synthetic::perturb(refs[i], i));
  for (auto _ : state) benchmark::DoNotOptimize(metrics::evaluate_corpus(hyps, refs));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_CorpusEval)->Arg(100)->Arg(1000);
