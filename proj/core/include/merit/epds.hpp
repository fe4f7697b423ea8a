#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "merit/corpus.hpp"
#include "merit/lm_scoring.hpp"
#include "merit/stat_features.hpp"
#include "merit/training_prep.hpp"

namespace merit {

/// Weights of the composite score. Defaults are (0.3, 0.3, 0.4); the plain
/// unweighted sum is equivalent to unweighted() up to a constant factor.
struct ComposeWeights {
  double alpha = 0.3;
  double beta = 0.3;
  double gamma = 0.4;

  static ComposeWeights unweighted() { return {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0}; }

  void validate() const;  // throws InvalidWeights
};

struct ScoredPair {
  SentencePair pair;
  double s_base = 0.0;
  double s_ppl = 0.0;
  double s_ifd = 0.0;
  double s_final = 0.0;
};

/// alpha*s_base + beta*s_ppl + gamma*s_ifd.
double final_score(double s_base, double s_ppl, double s_ifd, const ComposeWeights& w);

/// Strict weak order used everywhere for ranking: s_final descending, then id
/// ascending.
bool ranks_before(const ScoredPair& a, const ScoredPair& b) noexcept;

/// The k best pairs under ranks_before, sorted.
std::vector<ScoredPair> select_top_k(std::vector<ScoredPair> scored, std::size_t k);

/// All pairs with s_final >= threshold, sorted.
std::vector<ScoredPair> select_above(std::vector<ScoredPair> scored, double threshold);

struct EpdsConfig {
  ValidityConfig validity;
  BaseScoreConfig base;
  ScorerConfig scorer;
  ComposeWeights weights;
  PromptTemplate prompt;
  /// Fail with InsufficientValidPairs instead of returning a short selection.
  bool strict = false;

  void validate() const;
};

struct DroppedPair {
  std::string id;
  std::string reason;
};

struct ScoringOutcome {
  std::vector<ScoredPair> scored;  // input order
  std::vector<DroppedPair> dropped;
};

/// Hard filter, statistical features, LM scores and composite score for every
/// pair. Pairs failing the filter are reported in `dropped`.
ScoringOutcome score_corpus(const Corpus& corpus, const EpdsConfig& cfg,
                            const LogprobScorer& scorer);

struct AuditEntry {
  std::string id;
  std::optional<std::string> dropped_reason;
  std::optional<std::size_t> rank;  // 1-based, selected pairs only
  std::optional<double> s_base, s_ppl, s_ifd, s_final;
};

struct EpdsResult {
  Corpus clean;
  std::vector<ScoredPair> selected;  // ranked
  /// Selected pairs by rank, then unselected scored pairs by rank, then
  /// filtered-out pairs by id.
  std::vector<AuditEntry> audit;
  std::size_t valid_count = 0;
  bool shortfall = false;            // fewer than k pairs survived the filter
};

/// Selection step alone: top-k of an already scored set plus its audit trail.
EpdsResult select_from_scored(LanguageTag lang, ScoringOutcome outcome, std::size_t k,
                              bool strict = false);

/// Filter, score and keep the k best pairs.
EpdsResult run_epds(const Corpus& corpus, const EpdsConfig& cfg, std::size_t k,
                    const LogprobScorer& scorer);

}  // namespace merit
