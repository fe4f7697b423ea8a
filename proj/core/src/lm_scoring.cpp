#include "merit/lm_scoring.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "merit/error.hpp"
#include "merit/unicode.hpp"

namespace merit {

void ScorerConfig::validate() const {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw Error(ErrorCode::InvalidConfig, "sigma must be positive");
  }
  if (!(tau > 1.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::InvalidConfig, "tau must be greater than 1");
  }
  if (max_in_flight == 0 || batch_size == 0) {
    throw Error(ErrorCode::InvalidConfig,
                "max_in_flight and batch_size must be positive");
  }
}

std::optional<std::string> resolve_endpoint(const ScorerConfig& cfg) {
  if (const char* env = std::getenv("MERIT_SCORER_URL"); env && *env) {
    return std::string(env);
  }
  return cfg.endpoint;
}

CharNgramModel::CharNgramModel(std::size_t order, double k) : order_(order), k_(k) {
  if (order_ == 0) throw Error(ErrorCode::InvalidConfig, "n-gram order must be >= 1");
  if (!(k_ > 0.0)) throw Error(ErrorCode::InvalidConfig, "smoothing constant must be > 0");
}

char32_t CharNgramModel::map(char32_t cp) const noexcept {
  if (cp == kBos) return kBos;
  return alphabet_.count(cp) ? cp : kUnk;
}

std::vector<char32_t> CharNgramModel::alphabet() const {
  std::vector<char32_t> out;
  out.reserve(alphabet_.size() + 1);
  for (const auto& [cp, idx] : alphabet_) out.push_back(cp);
  std::sort(out.begin(), out.end());
  out.push_back(kUnk);
  return out;
}

void CharNgramModel::add(std::u32string_view text) {
  for (char32_t cp : text) alphabet_.emplace(cp, alphabet_.size());
  std::u32string padded(order_ - 1, kBos);
  padded.append(text);
  for (std::size_t i = order_ - 1; i < padded.size(); ++i) {
    auto& ctx = contexts_[padded.substr(i + 1 - order_, order_ - 1)];
    ++ctx.total;
    ++ctx.next[padded[i]];
  }
}

double CharNgramModel::prob(std::u32string_view context, char32_t symbol) const {
  const double v = static_cast<double>(vocabulary_size());
  auto it = contexts_.find(std::u32string(context));
  if (it == contexts_.end()) return 1.0 / v;
  const auto& ctx = it->second;
  auto jt = ctx.next.find(symbol);
  const double c = jt == ctx.next.end() ? 0.0 : static_cast<double>(jt->second);
  return (c + k_) / (static_cast<double>(ctx.total) + k_ * v);
}

double CharNgramModel::logprob(std::u32string_view history,
                               std::u32string_view target) const {
  std::u32string seq(order_ - 1, kBos);
  seq.reserve(seq.size() + history.size() + target.size());
  for (char32_t cp : history) seq.push_back(map(cp));
  const std::size_t start = seq.size();
  for (char32_t cp : target) seq.push_back(map(cp));
  double sum = 0.0;
  const std::u32string_view view(seq);
  for (std::size_t i = start; i < seq.size(); ++i) {
    sum += std::log(prob(view.substr(i + 1 - order_, order_ - 1), seq[i]));
  }
  return sum;
}

CharNgramModel train_char_ngram(std::span<const std::string> corpus,
                                std::size_t order, double k) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "n-gram training corpus is empty");
  CharNgramModel model(order, k);
  for (const auto& text : corpus) model.add(unicode::decode(text));
  return model;
}

std::vector<LogprobResult> CharNgramScorer::score(
    std::span<const ScoreRequest> requests) const {
  std::vector<LogprobResult> out;
  out.reserve(requests.size());
  for (const auto& req : requests) {
    std::u32string history = unicode::decode(req.instruction);
    if (req.source) history += unicode::decode(*req.source);
    const auto target = unicode::decode(req.target);
    out.push_back({model_->logprob(history, target),
                   static_cast<std::int64_t>(target.size())});
  }
  return out;
}

double perplexity(const LogprobResult& r) {
  if (r.token_count <= 0) {
    throw Error(ErrorCode::NonFinite, "perplexity over zero tokens");
  }
  const double ppl = std::exp(-r.logprob_sum / static_cast<double>(r.token_count));
  if (!std::isfinite(ppl) || !(ppl > 0.0)) {
    throw Error(ErrorCode::NonFinite, "perplexity is not a positive finite number");
  }
  return ppl;
}

std::vector<LmScore> score_pairs(const LogprobScorer& scorer,
                                 std::span<const ScoringInput> inputs) {
  std::vector<ScoreRequest> requests;
  requests.reserve(inputs.size() * 2);
  for (const auto& in : inputs) {
    if (in.target.empty()) throw Error(ErrorCode::EmptyText, "scoring an empty target");
    requests.push_back({in.instruction, in.source, in.target});
    requests.push_back({std::string(), std::nullopt, in.target});
  }
  const auto results = scorer.score(requests);
  if (results.size() != requests.size()) {
    throw Error(ErrorCode::ScorerUnavailable,
                "scorer returned " + std::to_string(results.size()) +
                    " results for " + std::to_string(requests.size()) + " requests");
  }
  std::vector<LmScore> scores;
  scores.reserve(inputs.size());
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    scores.push_back({perplexity(results[2 * i]), perplexity(results[2 * i + 1])});
  }
  return scores;
}

LmScore score_pair(const LogprobScorer& scorer, std::string_view instruction,
                   std::string_view x, std::string_view y) {
  const ScoringInput in{std::string(instruction), std::string(x), std::string(y)};
  return score_pairs(scorer, std::span(&in, 1)).front();
}

double s_ppl(double ppl_cond, double sigma) {
  return 1.0 / (1.0 + sigma * ppl_cond);
}

double s_ifd(double ppl_uncond, double ppl_cond, double tau) {
  return std::min(ppl_uncond / ppl_cond, tau) / tau;
}

}  // namespace merit
