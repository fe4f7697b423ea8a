#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace merit::metrics {

enum class Granularity {
  Word,       // CJK scalars as single tokens, other runs split on whitespace
  Character,  // every non-space scalar is a token
};

struct TokenSequence {
  std::vector<std::string> tokens;
  Granularity granularity = Granularity::Word;

  bool empty() const noexcept { return tokens.empty(); }
  std::size_t size() const noexcept { return tokens.size(); }
};

TokenSequence tokenize_target(std::string_view text,
                              Granularity granularity = Granularity::Word);

enum class BleuSmoothing {
  AddOne,  // zero-match orders n >= 2 use (0 + 1) / (total + 1)
  None,    // any zero precision gives 0
};

/// Clipped n-gram statistics of one hypothesis against one reference. They
/// add up across sentences for corpus-level BLEU.
struct BleuStats {
  std::array<std::size_t, 4> matches{};
  std::array<std::size_t, 4> totals{};
  std::size_t hyp_len = 0;
  std::size_t ref_len = 0;

  BleuStats& operator+=(const BleuStats& o);
};

BleuStats bleu_stats(const TokenSequence& hyp, const TokenSequence& ref);

/// BLEU-4 in [0,100] from (possibly pooled) statistics. Orders for which the
/// hypothesis has no n-grams are left out of the geometric mean.
double bleu_from_stats(const BleuStats& stats, BleuSmoothing smoothing = BleuSmoothing::AddOne);

/// Sentence BLEU-4. Throws EmptyInput.
double bleu4(const TokenSequence& hyp, const TokenSequence& ref,
             BleuSmoothing smoothing = BleuSmoothing::AddOne);

/// Character n-gram statistics (whitespace removed), orders 1..max_order.
struct ChrfStats {
  std::vector<std::size_t> matches, hyp_totals, ref_totals;

  explicit ChrfStats(std::size_t max_order = 6)
      : matches(max_order), hyp_totals(max_order), ref_totals(max_order) {}
  ChrfStats& operator+=(const ChrfStats& o);
};

ChrfStats chrf_stats(std::string_view hyp, std::string_view ref, std::size_t max_order = 6);

/// Mean of per-order F_beta over the orders present on both sides, x100.
double chrf_from_stats(const ChrfStats& stats, double beta = 2.0);

/// Sentence chrF. Throws EmptyInput.
double chrf(std::string_view hyp, std::string_view ref, std::size_t max_order = 6,
            double beta = 2.0);

std::size_t lcs_length(std::span<const std::string> a, std::span<const std::string> b);

/// LCS-based F_beta x100. Throws EmptyInput.
double rouge_l(const TokenSequence& hyp, const TokenSequence& ref, double beta = 1.0);

/// (bleu4 + chrf) / 2. Throws OutOfRange outside [0,100].
double bleu_chrf(double bleu4, double chrf);

enum class Combination { Equal, Geometric, W46, W64 };

Combination parse_combination(std::string_view name);
std::string_view to_string(Combination c) noexcept;

/// equal: mean; geometric: sqrt(b*c); w46: 0.4b + 0.6c; w64: 0.6b + 0.4c.
double combine(double bleu4, double chrf, Combination method);

/// Pearson correlation of mid-ranked data. Throws LengthMismatch or
/// DegenerateInput.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// 1-based ranks; ties share their mean rank.
std::vector<double> average_ranks(std::span<const double> xs);

struct MetricOptions {
  BleuSmoothing smoothing = BleuSmoothing::AddOne;
  Granularity granularity = Granularity::Word;
  std::size_t chrf_order = 6;
  double chrf_beta = 2.0;
  double rouge_beta = 1.0;
};

struct MetricReport {
  double bleu4 = 0.0;
  double chrf = 0.0;
  double rouge_l = 0.0;
  double bleu_chrf = 0.0;
  bool corpus_level = true;
  std::size_t segments = 0;
};

/// Corpus-level scores over line-aligned segments: BLEU and chrF from pooled
/// statistics, ROUGE-L as the mean sentence score. Throws LengthMismatch or
/// EmptyInput.
MetricReport evaluate_corpus(std::span<const std::string> hyps,
                             std::span<const std::string> refs,
                             const MetricOptions& options = {});

MetricReport evaluate_sentence(std::string_view hyp, std::string_view ref,
                               const MetricOptions& options = {});

}  // namespace merit::metrics
