#pragma once

#include <regex>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace merit {

enum class ExtractionMode {
  Cued,        // integers following a case-insensitive "score" cue
  Permissive,  // any standalone integer
};

struct SarConfig {
  /// Custom ECMAScript pattern. Empty selects the built-in pattern for `mode`.
  /// Capture group 1 (or the whole match when there is no group) is the score.
  std::string pattern;
  ExtractionMode mode = ExtractionMode::Cued;
  int score_min = 0;
  int score_max = 100;
  int tolerance = 10;
  double reward_exact = 2.0;
  double reward_partial = 1.0;

  void validate() const;  // throws InvalidConfig
  std::string effective_pattern() const;
};

inline constexpr int kNoScore = -1;

/// Compiled form of a SarConfig's score pattern. Throws InvalidPattern.
class ScoreExtractor {
 public:
  explicit ScoreExtractor(SarConfig cfg);

  /// All in-range integers the pattern captures. Out-of-range values are
  /// excluded, never clamped.
  std::set<int> matches(std::string_view log) const;

  /// Smallest match, or kNoScore when there is none.
  int conservative(std::string_view log) const;

  const SarConfig& config() const noexcept { return cfg_; }

 private:
  SarConfig cfg_;
  std::regex re_;
};

std::set<int> extract_scores(std::string_view log, const SarConfig& cfg = {});
int conservative_extract(std::string_view log, const SarConfig& cfg = {});

/// Stepwise reward on d = |s - a|: exact match, within tolerance, otherwise
/// zero; a negative s (nothing parsed) earns zero. Throws InvalidExpertScore.
double sar_reward(int s, int a, const SarConfig& cfg = {});

/// (r_i - mean) / (population std + 1e-8). Throws GroupTooSmall for n < 2.
std::vector<double> group_normalize(std::span<const double> rewards);

}  // namespace merit
