#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "merit/corpus.hpp"

namespace merit {

inline constexpr std::string_view kDefaultDomain = "__default__";

struct SplitSpec {
  std::size_t n_train = 8000;
  std::size_t n_dev = 1000;
  std::size_t n_test = 1000;
  std::uint64_t seed = 0;

  std::size_t total() const noexcept { return n_train + n_dev + n_test; }
};

/// Pairs partitioned by domain label, with the label's share of the corpus.
struct DomainGroups {
  std::map<std::string, std::vector<SentencePair>> groups;
  std::map<std::string, double> proportions;
};

/// Throws EmptyCorpus. Unlabelled pairs go to "__default__".
DomainGroups group_by_domain(const Corpus& corpus);

/// floor(n_target * p_k) for each domain.
std::map<std::string, std::size_t> allocate_quotas(
    std::size_t n_target, const std::map<std::string, double>& proportions);

struct QuotaEntry {
  std::size_t allocated = 0;    // floor(N_T * p_k)
  std::size_t sampled = 0;      // drawn against the quota
  std::size_t compensated = 0;  // extra slots granted by compensation
};

enum class SplitName { Train, Dev, Test };
std::string_view to_string(SplitName s) noexcept;

struct SplitResult {
  std::vector<SentencePair> train, dev, test;
  /// Indexed by SplitName, then domain.
  std::array<std::map<std::string, QuotaEntry>, 3> quota_report;

  const std::vector<SentencePair>& get(SplitName s) const;
};

/// Distribution-preserving exact-size split with Integrity Compensation.
///
/// Each domain pool is ordered by keyed_hash(id, seed) (ties by id), so drawing
/// a prefix is uniform sampling without replacement and independent of
/// platform. Splits are filled in train, dev, test order: every domain first
/// contributes its floor quota, then the deficit is granted one slot at a time
/// to domains in descending fractional-remainder order (ties by name),
/// round-robin, skipping domains whose pool is already reserved for later
/// quotas. Throws InfeasibleSpec when the corpus cannot supply the request.
SplitResult split(const Corpus& corpus, const SplitSpec& spec);

}  // namespace merit
