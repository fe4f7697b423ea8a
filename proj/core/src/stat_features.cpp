#include "merit/stat_features.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include "merit/error.hpp"
#include "merit/unicode.hpp"

namespace merit {

namespace {

double min_ratio(std::size_t a, std::size_t b) {
  const double da = static_cast<double>(a);
  const double db = static_cast<double>(b);
  return std::min(da / db, db / da);
}

template <typename Pred>
double share(std::string_view text, Pred pred) {
  const auto cps = unicode::decode(text);
  if (cps.empty()) return 0.0;
  const auto hits = std::count_if(cps.begin(), cps.end(), pred);
  return static_cast<double>(hits) / static_cast<double>(cps.size());
}

double type_token_ratio(const std::vector<std::string>& tokens) {
  std::unordered_set<std::string_view> types(tokens.begin(), tokens.end());
  return static_cast<double>(types.size()) / static_cast<double>(tokens.size());
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

void BaseScoreConfig::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::InvalidWeights, "feature weights must be non-negative");
    }
    sum += w;
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw Error(ErrorCode::InvalidWeights, "feature weights must sum to 1");
  }
}

double length_ratio(std::string_view x, std::string_view y) {
  const auto nx = unicode::char_count(x);
  const auto ny = unicode::char_count(y);
  if (nx == 0 || ny == 0) {
    throw Error(ErrorCode::EmptyText, "length ratio of an empty text");
  }
  return min_ratio(nx, ny);
}

double token_ratio(std::string_view x, std::string_view y) {
  const auto tx = unicode::tokenize(x).size();
  const auto ty = unicode::tokenize(y).size();
  if (tx == 0 || ty == 0) {
    throw Error(ErrorCode::EmptyText, "token ratio of a text without tokens");
  }
  return min_ratio(tx, ty);
}

double punct_divergence(std::string_view x, std::string_view y) {
  return clamp01(std::abs(share(x, unicode::is_punct) - share(y, unicode::is_punct)));
}

double digit_divergence(std::string_view x, std::string_view y) {
  return clamp01(std::abs(share(x, unicode::is_digit) - share(y, unicode::is_digit)));
}

double lexical_diversity_diff(std::string_view x, std::string_view y) {
  const auto tx = unicode::tokenize(x);
  const auto ty = unicode::tokenize(y);
  if (tx.empty() || ty.empty()) {
    throw Error(ErrorCode::EmptyText, "type-token ratio of a text without tokens");
  }
  return clamp01(std::abs(type_token_ratio(tx) - type_token_ratio(ty)));
}

FeatureVector extract_features(std::string_view x, std::string_view y) {
  return FeatureVector{length_ratio(x, y), token_ratio(x, y),
                       punct_divergence(x, y), digit_divergence(x, y),
                       lexical_diversity_diff(x, y)};
}

double base_score(const FeatureVector& fv, const BaseScoreConfig& cfg) {
  cfg.validate();
  const auto& w = cfg.weights;
  const double s = w[0] * fv.r_len + w[1] * fv.r_tok + w[2] * (1.0 - fv.d_punct) +
                   w[3] * (1.0 - fv.d_digit) + w[4] * (1.0 - fv.d_uniq);
  return clamp01(s);
}

}  // namespace merit
