#pragma once

#include <array>
#include <string_view>

namespace merit {

/// Surface-alignment features of a (source, target) pair. Ratios lie in (0,1],
/// divergences in [0,1]; every field is symmetric in (source, target).
struct FeatureVector {
  double r_len = 1.0;
  double r_tok = 1.0;
  double d_punct = 0.0;
  double d_digit = 0.0;
  double d_uniq = 0.0;
};

/// Weights for r_len, r_tok, d_punct, d_digit, d_uniq (in that order).
/// Ratios enter the score as-is, divergences as 1 - d.
struct BaseScoreConfig {
  std::array<double, 5> weights = {0.2, 0.2, 0.2, 0.2, 0.2};

  /// Throws InvalidWeights unless non-negative and summing to 1 within 1e-9.
  void validate() const;
};

/// min(|y|/|x|, |x|/|y|) over Unicode scalar counts. Throws EmptyText.
double length_ratio(std::string_view x, std::string_view y);

/// Same ratio over tokens (whitespace split, CJK runs split per character).
double token_ratio(std::string_view x, std::string_view y);

/// |p_x - p_y| with p the punctuation share of scalar values; empty -> 0.
double punct_divergence(std::string_view x, std::string_view y);

/// |p_x - p_y| with p the decimal-digit share of scalar values; empty -> 0.
double digit_divergence(std::string_view x, std::string_view y);

/// |TTR_x - TTR_y|. Throws EmptyText when either side has no tokens.
double lexical_diversity_diff(std::string_view x, std::string_view y);

FeatureVector extract_features(std::string_view x, std::string_view y);

double base_score(const FeatureVector& fv, const BaseScoreConfig& cfg = {});

}  // namespace merit
