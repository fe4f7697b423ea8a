#include "merit/sar.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numeric>

#include "merit/error.hpp"

namespace merit {

namespace {

// "Score: 85", "score = 85", "**Score**: 85/100", "score is 85", "Score：85".
// A trailing ".digit" marks a decimal and is not an integer match.
constexpr const char* kCuedPattern =
    R"(score(?:\s|\*|:|=|：|is\b)*(-?\d+)(?!\d|\.\d))";
constexpr const char* kPermissivePattern = R"((?:^|[^\d.])(-?\d+)(?!\d|\.\d))";

}  // namespace

void SarConfig::validate() const {
  if (score_min > score_max) {
    throw Error(ErrorCode::InvalidConfig, "score_min exceeds score_max");
  }
  if (tolerance < 0) throw Error(ErrorCode::InvalidConfig, "tolerance must be >= 0");
}

std::string SarConfig::effective_pattern() const {
  if (!pattern.empty()) return pattern;
  return mode == ExtractionMode::Cued ? kCuedPattern : kPermissivePattern;
}

ScoreExtractor::ScoreExtractor(SarConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  try {
    re_ = std::regex(cfg_.effective_pattern(),
                     std::regex::ECMAScript | std::regex::icase);
  } catch (const std::regex_error& e) {
    throw Error(ErrorCode::InvalidPattern, "'" + cfg_.pattern + "': " + e.what());
  }
}

std::set<int> ScoreExtractor::matches(std::string_view log) const {
  std::set<int> out;
  using It = std::string_view::const_iterator;
  for (std::regex_iterator<It> it(log.begin(), log.end(), re_), end; it != end; ++it) {
    const auto& m = *it;
    const auto& g = (m.size() > 1 && m[1].matched) ? m[1] : m[0];
    const std::string text = g.str();
    // Skip any leading non-numeric context a custom pattern may capture.
    const auto first = text.find_first_of("-0123456789");
    if (first == std::string::npos) continue;
    long long value = 0;
    const char* b = text.data() + first;
    const char* e = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(b, e, value);
    if (ec != std::errc() || ptr == b) continue;
    if (value < cfg_.score_min || value > cfg_.score_max) continue;
    out.insert(static_cast<int>(value));
  }
  return out;
}

int ScoreExtractor::conservative(std::string_view log) const {
  const auto m = matches(log);
  return m.empty() ? kNoScore : *m.begin();
}

std::set<int> extract_scores(std::string_view log, const SarConfig& cfg) {
  return ScoreExtractor(cfg).matches(log);
}

int conservative_extract(std::string_view log, const SarConfig& cfg) {
  return ScoreExtractor(cfg).conservative(log);
}

double sar_reward(int s, int a, const SarConfig& cfg) {
  if (a < cfg.score_min || a > cfg.score_max) {
    throw Error(ErrorCode::InvalidExpertScore,
                "expert score " + std::to_string(a) + " outside [" +
                    std::to_string(cfg.score_min) + "," + std::to_string(cfg.score_max) +
                    "]");
  }
  if (s < 0) return 0.0;
  const long d = std::labs(static_cast<long>(s) - a);
  if (d == 0) return cfg.reward_exact;
  if (d <= cfg.tolerance) return cfg.reward_partial;
  return 0.0;
}

std::vector<double> group_normalize(std::span<const double> rewards) {
  if (rewards.size() < 2) {
    throw Error(ErrorCode::GroupTooSmall, "group normalization needs at least 2 rewards");
  }
  const double n = static_cast<double>(rewards.size());
  const double mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mean) * (r - mean);
  const double denom = std::sqrt(ss / n) + 1e-8;
  std::vector<double> out(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mean) / denom;
  return out;
}

}  // namespace merit
