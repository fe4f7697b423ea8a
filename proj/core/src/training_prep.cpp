#include "merit/training_prep.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>

#include "merit/error.hpp"
#include "merit/unicode.hpp"

namespace merit {

PromptTemplate::PromptTemplate(std::string text, LanguageNaming naming)
    : text_(std::move(text)), naming_(naming) {
  const auto first = text_.find(kPlaceholder);
  if (first == std::string::npos ||
      text_.find(kPlaceholder, first + kPlaceholder.size()) != std::string::npos) {
    throw Error(ErrorCode::InvalidConfig,
                "prompt template must contain '{lang}' exactly once");
  }
}

PromptTemplate PromptTemplate::load(const std::string& path, LanguageNaming naming) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open prompt template '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (!text.empty() && text.back() == '\n') text.pop_back();
  return PromptTemplate(std::move(text), naming);
}

std::string PromptTemplate::render(LanguageTag lang) const {
  if (!is_source_language(lang)) {
    throw Error(ErrorCode::TargetLanguageAsSource,
                "Chinese is the target language, not a source");
  }
  const std::string_view name =
      naming_ == LanguageNaming::IsoCode ? to_code(lang) : english_name(lang);
  std::string out = text_;
  out.replace(out.find(kPlaceholder), kPlaceholder.size(), name);
  return out;
}

std::string language_token(LanguageTag lang) {
  return "\u27E8" + std::string(to_code(lang)) + "\u27E9";
}

Vocabulary Vocabulary::with_language_tokens() {
  Vocabulary v;
  for (auto lang : kSourceLanguages) v.add(language_token(lang));
  return v;
}

std::size_t Vocabulary::add(const std::string& token) {
  auto [it, inserted] = index_.emplace(token, tokens_.size());
  if (inserted) tokens_.push_back(token);
  return it->second;
}

bool Vocabulary::contains(std::string_view token) const {
  return index_.count(std::string(token)) != 0;
}

std::size_t Vocabulary::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  if (it == index_.end()) {
    throw Error(ErrorCode::IndexOutOfRange, "token not in vocabulary: " + std::string(token));
  }
  return it->second;
}

std::vector<std::string> build_ltp_input(std::span<const std::string> prompt_tokens,
                                         LanguageTag lang,
                                         std::span<const std::string> source_tokens,
                                         const Vocabulary& vocab) {
  if (source_tokens.empty()) throw Error(ErrorCode::EmptySource, "source has no tokens");
  const auto lang_tok = language_token(lang);
  if (!is_source_language(lang) || !vocab.contains(lang_tok)) {
    throw Error(ErrorCode::UnregisteredLanguage,
                "language token " + lang_tok + " is not in the vocabulary");
  }
  std::vector<std::string> input;
  input.reserve(prompt_tokens.size() + 1 + source_tokens.size());
  input.insert(input.end(), prompt_tokens.begin(), prompt_tokens.end());
  input.push_back(lang_tok);
  input.insert(input.end(), source_tokens.begin(), source_tokens.end());
  return input;
}

SftRecord make_sft_record(const SentencePair& pair, const PromptTemplate& tpl,
                          const Vocabulary& vocab) {
  const auto prompt = unicode::tokenize(tpl.render(pair.source_lang));
  const auto source = unicode::tokenize(pair.source_text);
  SftRecord rec;
  rec.lang = pair.source_lang;
  rec.input_tokens = build_ltp_input(prompt, pair.source_lang, source, vocab);
  rec.target_tokens = unicode::tokenize(pair.target_text);
  rec.prompt_length = prompt.size();
  return rec;
}

SmoothedDistribution smoothed_target(std::size_t y_star, std::size_t vocab_size,
                                     double eps, SmoothingVariant variant) {
  if (vocab_size == 0 || y_star >= vocab_size) {
    throw Error(ErrorCode::IndexOutOfRange, "target index outside the vocabulary");
  }
  if (!(eps >= 0.0 && eps < 1.0)) {
    throw Error(ErrorCode::InvalidEpsilon, "label smoothing epsilon must be in [0,1)");
  }
  const double v = static_cast<double>(vocab_size);
  SmoothedDistribution d{std::vector<double>(vocab_size), eps, y_star};
  if (variant == SmoothingVariant::Uniform) {
    std::fill(d.q.begin(), d.q.end(), eps / v);
    d.q[y_star] = (1.0 - eps) + eps / v;
  } else if (vocab_size == 1) {
    d.q[0] = 1.0;
  } else {
    std::fill(d.q.begin(), d.q.end(), eps / (v - 1.0));
    d.q[y_star] = 1.0 - eps;
  }
  return d;
}

double sft_loss(std::span<const double> pred, std::size_t y_star, double eps,
                SmoothingVariant variant) {
  double sum = 0.0;
  for (double p : pred) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(ErrorCode::InvalidDistribution, "predicted probabilities must be >= 0");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw Error(ErrorCode::InvalidDistribution, "predicted probabilities must sum to 1");
  }
  const auto q = smoothed_target(y_star, pred.size(), eps, variant);
  double loss = 0.0;
  for (std::size_t k = 0; k < pred.size(); ++k) {
    if (q.q[k] == 0.0) continue;
    if (pred[k] == 0.0) {
      throw Error(ErrorCode::InvalidDistribution,
                  "zero predicted probability where the smoothed target has mass");
    }
    loss -= q.q[k] * std::log(pred[k]);
  }
  return loss;
}

namespace {

std::vector<double> log_softmax(std::span<const double> logits) {
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double l : logits) z += std::exp(l - m);
  const double log_z = m + std::log(z);
  std::vector<double> out(logits.size());
  std::transform(logits.begin(), logits.end(), out.begin(),
                 [log_z](double l) { return l - log_z; });
  return out;
}

}  // namespace

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorCode::EmptyInput, "softmax of an empty vector");
  auto out = log_softmax(logits);
  for (double& v : out) v = std::exp(v);
  return out;
}

double sft_loss_from_logits(std::span<const double> logits, std::size_t y_star,
                            double eps, SmoothingVariant variant) {
  const auto q = smoothed_target(y_star, logits.size(), eps, variant);
  const auto logp = log_softmax(logits);
  double loss = 0.0;
  for (std::size_t k = 0; k < logp.size(); ++k) loss -= q.q[k] * logp[k];
  return loss;
}

std::vector<double> sft_loss_grad(std::span<const double> logits, std::size_t y_star,
                                  double eps, SmoothingVariant variant) {
  const auto q = smoothed_target(y_star, logits.size(), eps, variant);
  auto grad = softmax(logits);
  for (std::size_t k = 0; k < grad.size(); ++k) grad[k] -= q.q[k];
  return grad;
}

double mle_loss(std::span<const double> token_logprobs) {
  double loss = 0.0;
  for (double lp : token_logprobs) {
    if (lp > 0.0 || std::isnan(lp)) {
      throw Error(ErrorCode::PositiveLogProb, "token log-probability must be <= 0");
    }
    loss -= lp;
  }
  return loss;
}

}  // namespace merit
