#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace merit {

struct ScorerConfig {
  double sigma = 0.01;  // S_PPL = 1 / (1 + sigma * PPL)
  double tau = 2.0;     // IFD saturation threshold, > 1
  std::optional<std::string> endpoint;  // e.g. "http://127.0.0.1:8080/score"
  std::chrono::milliseconds timeout{30000};
  std::size_t max_in_flight = 4;
  std::size_t batch_size = 32;

  void validate() const;
};

/// Endpoint after applying the MERIT_SCORER_URL override.
std::optional<std::string> resolve_endpoint(const ScorerConfig& cfg);

struct LmScore {
  double ppl_cond = 1.0;    // PPL(y | x, I)
  double ppl_uncond = 1.0;  // PPL(y | nothing)
};

/// One scoring request. An unconditional request has an empty instruction and
/// no source.
struct ScoreRequest {
  std::string instruction;
  std::optional<std::string> source;
  std::string target;
};

struct LogprobResult {
  double logprob_sum = 0.0;  // natural log
  std::int64_t token_count = 0;
};

/// Anything that returns summed target log-probabilities. Implementations must
/// return results in request order.
class LogprobScorer {
 public:
  virtual ~LogprobScorer() = default;
  virtual std::vector<LogprobResult> score(
      std::span<const ScoreRequest> requests) const = 0;
};

/// Add-k smoothed character n-gram model over Unicode scalar values. Unseen
/// characters collapse to one UNK symbol, so every context distribution sums
/// to one over (seen characters + UNK).
class CharNgramModel {
 public:
  static constexpr char32_t kBos = 0x110000;
  static constexpr char32_t kUnk = 0x110001;

  CharNgramModel(std::size_t order, double k);

  std::size_t order() const noexcept { return order_; }
  double smoothing() const noexcept { return k_; }
  /// Alphabet size including UNK.
  std::size_t vocabulary_size() const noexcept { return alphabet_.size() + 1; }

  void add(std::u32string_view text);

  /// p(symbol | context); context holds the previous order-1 symbols
  /// (already mapped, BOS-padded).
  double prob(std::u32string_view context, char32_t symbol) const;

  /// Sum of log p over target characters, conditioned on `history`.
  double logprob(std::u32string_view history, std::u32string_view target) const;

  char32_t map(char32_t cp) const noexcept;
  std::vector<char32_t> alphabet() const;

 private:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::unordered_map<char32_t, std::uint64_t> next;
  };

  std::size_t order_;
  double k_;
  std::unordered_map<char32_t, std::size_t> alphabet_;
  std::unordered_map<std::u32string, ContextCounts> contexts_;
};

/// Trains the offline fallback model. Throws EmptyCorpus.
CharNgramModel train_char_ngram(std::span<const std::string> corpus,
                                std::size_t order = 4, double k = 0.1);

/// Scores requests with a CharNgramModel. The conditioning history is the
/// instruction followed by the source; tokens are target characters.
class CharNgramScorer final : public LogprobScorer {
 public:
  explicit CharNgramScorer(std::shared_ptr<const CharNgramModel> model)
      : model_(std::move(model)) {}

  std::vector<LogprobResult> score(
      std::span<const ScoreRequest> requests) const override;

  const CharNgramModel& model() const noexcept { return *model_; }

 private:
  std::shared_ptr<const CharNgramModel> model_;
};

/// Client for the JSON logprob service. Requests are sent in batches of
/// cfg.batch_size with at most cfg.max_in_flight batches outstanding.
/// Throws ScorerUnavailable on connection failure, timeout or a non-200 reply.
class RemoteScorer final : public LogprobScorer {
 public:
  explicit RemoteScorer(std::string endpoint, ScorerConfig cfg = {});

  std::vector<LogprobResult> score(
      std::span<const ScoreRequest> requests) const override;

  const std::string& endpoint() const noexcept { return endpoint_; }

 private:
  std::string endpoint_;
  ScorerConfig cfg_;
};

/// Server-side half of the wire protocol: takes a request body (one object or
/// an array of objects) and returns the JSON reply body.
std::string handle_scoring_request(std::string_view body,
                                   const LogprobScorer& scorer);

/// exp(-logprob_sum / token_count). Throws NonFinite when the result is not a
/// positive finite number.
double perplexity(const LogprobResult& r);

struct ScoringInput {
  std::string instruction;
  std::string source;
  std::string target;
};

/// Conditional and unconditional perplexities for many pairs, in input order.
std::vector<LmScore> score_pairs(const LogprobScorer& scorer,
                                 std::span<const ScoringInput> inputs);

LmScore score_pair(const LogprobScorer& scorer, std::string_view instruction,
                   std::string_view x, std::string_view y);

/// 1 / (1 + sigma * ppl_cond).
double s_ppl(double ppl_cond, double sigma);

/// min(ppl_uncond / ppl_cond, tau) / tau.
double s_ifd(double ppl_uncond, double ppl_cond, double tau);

}  // namespace merit
