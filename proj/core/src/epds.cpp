#include "merit/epds.hpp"

#include <algorithm>
#include <cmath>

#include "merit/error.hpp"

namespace merit {

void ComposeWeights::validate() const {
  for (double w : {alpha, beta, gamma}) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidWeights, "composite weights must be non-negative");
    }
  }
  if (std::abs(alpha + beta + gamma - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidWeights, "composite weights must sum to 1");
  }
}

void EpdsConfig::validate() const {
  validity.validate();
  base.validate();
  scorer.validate();
  weights.validate();
}

double final_score(double s_base, double s_ppl, double s_ifd, const ComposeWeights& w) {
  w.validate();
  return w.alpha * s_base + w.beta * s_ppl + w.gamma * s_ifd;
}

bool ranks_before(const ScoredPair& a, const ScoredPair& b) noexcept {
  if (a.s_final != b.s_final) return a.s_final > b.s_final;
  return a.pair.id < b.pair.id;
}

std::vector<ScoredPair> select_top_k(std::vector<ScoredPair> scored, std::size_t k) {
  if (k >= scored.size()) {
    std::sort(scored.begin(), scored.end(), ranks_before);
    return scored;
  }
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k),
                    scored.end(), ranks_before);
  scored.resize(k);
  return scored;
}

std::vector<ScoredPair> select_above(std::vector<ScoredPair> scored, double threshold) {
  std::erase_if(scored, [threshold](const ScoredPair& s) { return s.s_final < threshold; });
  std::sort(scored.begin(), scored.end(), ranks_before);
  return scored;
}

ScoringOutcome score_corpus(const Corpus& corpus, const EpdsConfig& cfg,
                            const LogprobScorer& scorer) {
  cfg.validate();
  ScoringOutcome out;
  std::vector<ScoringInput> inputs;
  const std::string instruction =
      corpus.empty() ? std::string() : cfg.prompt.render(corpus.source_lang());
  for (const auto& pair : corpus.pairs()) {
    if (auto reason = validity_failure(pair, cfg.validity)) {
      out.dropped.push_back({pair.id, *reason});
      continue;
    }
    FeatureVector fv;
    try {
      fv = extract_features(pair.source_text, pair.target_text);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyText) throw;
      out.dropped.push_back({pair.id, "no_tokens"});
      continue;
    }
    out.scored.push_back({pair, base_score(fv, cfg.base), 0.0, 0.0, 0.0});
    inputs.push_back({instruction, pair.source_text, pair.target_text});
  }
  const auto lm = score_pairs(scorer, inputs);
  for (std::size_t i = 0; i < out.scored.size(); ++i) {
    auto& s = out.scored[i];
    s.s_ppl = s_ppl(lm[i].ppl_cond, cfg.scorer.sigma);
    s.s_ifd = s_ifd(lm[i].ppl_uncond, lm[i].ppl_cond, cfg.scorer.tau);
    s.s_final = final_score(s.s_base, s.s_ppl, s.s_ifd, cfg.weights);
  }
  return out;
}

EpdsResult select_from_scored(LanguageTag lang, ScoringOutcome outcome, std::size_t k,
                              bool strict) {
  const std::size_t valid = outcome.scored.size();
  if (strict && valid < k) {
    throw Error(ErrorCode::InsufficientValidPairs,
                std::to_string(valid) + " valid pairs, " + std::to_string(k) + " requested");
  }
  auto ranked = outcome.scored;
  std::sort(ranked.begin(), ranked.end(), ranks_before);

  EpdsResult result{Corpus(lang), {}, {}, valid, valid < k};
  const std::size_t keep = std::min(k, ranked.size());
  std::vector<SentencePair> pairs;
  pairs.reserve(keep);
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& s = ranked[i];
    AuditEntry entry{s.pair.id, std::nullopt, std::nullopt,
                     s.s_base, s.s_ppl, s.s_ifd, s.s_final};
    if (i < keep) {
      entry.rank = i + 1;
      pairs.push_back(s.pair);
    } else {
      entry.dropped_reason = "below_top_k";
    }
    result.audit.push_back(std::move(entry));
  }
  ranked.resize(keep);
  result.selected = std::move(ranked);

  std::sort(outcome.dropped.begin(), outcome.dropped.end(),
            [](const DroppedPair& a, const DroppedPair& b) { return a.id < b.id; });
  for (auto& d : outcome.dropped) {
    result.audit.push_back({std::move(d.id), std::move(d.reason), std::nullopt,
                            std::nullopt, std::nullopt, std::nullopt, std::nullopt});
  }
  result.clean = Corpus(lang, std::move(pairs));
  return result;
}

EpdsResult run_epds(const Corpus& corpus, const EpdsConfig& cfg, std::size_t k,
                    const LogprobScorer& scorer) {
  return select_from_scored(corpus.source_lang(), score_corpus(corpus, cfg, scorer), k,
                            cfg.strict);
}

}  // namespace merit
