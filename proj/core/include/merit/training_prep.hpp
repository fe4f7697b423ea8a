#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "merit/corpus.hpp"
#include "merit/language.hpp"

namespace merit {

enum class LanguageNaming { IsoCode, EnglishName };

/// Instruction template with exactly one language placeholder.
class PromptTemplate {
 public:
  static constexpr std::string_view kPlaceholder = "{lang}";
  static constexpr std::string_view kDefault = "Translate {lang} language into Chinese: ";

  PromptTemplate() : PromptTemplate(std::string(kDefault)) {}

  /// Throws InvalidConfig unless the placeholder occurs exactly once.
  explicit PromptTemplate(std::string text,
                          LanguageNaming naming = LanguageNaming::IsoCode);

  /// Reads the template verbatim (no newline stripping beyond one trailing LF).
  static PromptTemplate load(const std::string& path,
                             LanguageNaming naming = LanguageNaming::IsoCode);

  /// Throws TargetLanguageAsSource for zh.
  std::string render(LanguageTag lang) const;

  const std::string& text() const noexcept { return text_; }
  LanguageNaming naming() const noexcept { return naming_; }

 private:
  std::string text_;
  LanguageNaming naming_;
};

inline std::string render_prompt(const PromptTemplate& tpl, LanguageTag lang) {
  return tpl.render(lang);
}

/// "⟨vi⟩" etc. (U+27E8, U+27E9).
std::string language_token(LanguageTag lang);

/// Token-string vocabulary; language identifier tokens are single entries.
class Vocabulary {
 public:
  /// Empty vocabulary.
  Vocabulary() = default;

  /// Vocabulary holding the five source language tokens.
  static Vocabulary with_language_tokens();

  std::size_t add(const std::string& token);
  bool contains(std::string_view token) const;
  std::size_t size() const noexcept { return tokens_.size(); }
  std::size_t id(std::string_view token) const;  // throws IndexOutOfRange

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct SftRecord {
  LanguageTag lang = LanguageTag::vi;
  std::vector<std::string> input_tokens;  // prompt, lang token, source
  std::vector<std::string> target_tokens;
  std::size_t prompt_length = 0;          // r
};

/// [prompt..., lang_token, source...]. Throws EmptySource or
/// UnregisteredLanguage.
std::vector<std::string> build_ltp_input(std::span<const std::string> prompt_tokens,
                                         LanguageTag lang,
                                         std::span<const std::string> source_tokens,
                                         const Vocabulary& vocab);

/// Tokenizes prompt, source and target of a pair and assembles the LTP input.
SftRecord make_sft_record(const SentencePair& pair, const PromptTemplate& tpl,
                          const Vocabulary& vocab);

enum class SmoothingVariant {
  Uniform,        // eps / |V| on every entry, including the target
  ExcludeTarget,  // eps / (|V| - 1) on non-target entries only
};

struct SmoothedDistribution {
  std::vector<double> q;
  double epsilon = 0.0;
  std::size_t target = 0;
};

/// Throws IndexOutOfRange or InvalidEpsilon.
SmoothedDistribution smoothed_target(std::size_t y_star, std::size_t vocab_size,
                                     double eps,
                                     SmoothingVariant variant = SmoothingVariant::Uniform);

/// -sum_k q'(k) log pred(k). Throws InvalidDistribution.
double sft_loss(std::span<const double> pred, std::size_t y_star, double eps,
                SmoothingVariant variant = SmoothingVariant::Uniform);

std::vector<double> softmax(std::span<const double> logits);

/// sft_loss(softmax(logits)) evaluated through log-softmax.
double sft_loss_from_logits(std::span<const double> logits, std::size_t y_star,
                            double eps,
                            SmoothingVariant variant = SmoothingVariant::Uniform);

/// d sft_loss(softmax(z)) / dz = softmax(z) - q'.
std::vector<double> sft_loss_grad(std::span<const double> logits, std::size_t y_star,
                                  double eps,
                                  SmoothingVariant variant = SmoothingVariant::Uniform);

/// -sum log p(y_t | ...). Throws PositiveLogProb.
double mle_loss(std::span<const double> token_logprobs);

}  // namespace merit
