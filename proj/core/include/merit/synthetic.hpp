#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "merit/corpus.hpp"

namespace merit::synthetic {

/// Portable generator (SplitMix64 stream); identical output on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next() noexcept;
  /// Uniform in [0, n) by rejection.
  std::uint64_t below(std::uint64_t n) noexcept;
  double unit() noexcept;  // [0,1)

 private:
  std::uint64_t state_;
};

struct Options {
  std::size_t pairs = 1000;
  LanguageTag lang = LanguageTag::vi;
  std::uint64_t seed = 7;
  std::vector<std::string> domains = {"news", "government", "travel", "health"};
  double noise_rate = 0.25;  // share of deliberately bad pairs
};

/// ALT-style files: source TSV, Chinese TSV and an id -> domain TSV. A few
/// ids exist on one side only.
struct AltFiles {
  std::vector<AltRecord> source;
  std::vector<AltRecord> target;
  std::vector<AltRecord> domains;
};

AltFiles make_alt_files(const Options& opts);

/// Aligned pairs with domains, ids "SNT.<seed>.<i>".
std::vector<SentencePair> make_pairs(const Options& opts);

struct EvalRecord {
  std::string id;
  std::string eval_log;
  int expert_score = 0;
  std::string group_id;
};

/// QE-agent style evaluation logs with expert scores, grouped in fours.
std::vector<EvalRecord> make_eval_records(std::size_t n, std::uint64_t seed);

/// A noisy "system output" for a reference sentence: drops or swaps a few
/// characters, deterministically.
std::string perturb(const std::string& reference, std::uint64_t seed);

}  // namespace merit::synthetic
