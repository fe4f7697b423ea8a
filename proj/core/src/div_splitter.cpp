#include "merit/div_splitter.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

#include "merit/error.hpp"
#include "merit/hash.hpp"

namespace merit {

std::string_view to_string(SplitName s) noexcept {
  switch (s) {
    case SplitName::Train: return "train";
    case SplitName::Dev: return "dev";
    case SplitName::Test: return "test";
  }
  return "";
}

const std::vector<SentencePair>& SplitResult::get(SplitName s) const {
  switch (s) {
    case SplitName::Train: return train;
    case SplitName::Dev: return dev;
    case SplitName::Test: return test;
  }
  return train;
}

DomainGroups group_by_domain(const Corpus& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "cannot group an empty corpus");
  DomainGroups g;
  for (const auto& p : corpus.pairs()) {
    g.groups[p.domain.empty() ? std::string(kDefaultDomain) : p.domain].push_back(p);
  }
  const double n = static_cast<double>(corpus.size());
  for (const auto& [k, pairs] : g.groups) {
    g.proportions[k] = static_cast<double>(pairs.size()) / n;
  }
  return g;
}

std::map<std::string, std::size_t> allocate_quotas(
    std::size_t n_target, const std::map<std::string, double>& proportions) {
  std::map<std::string, std::size_t> q;
  for (const auto& [k, p] : proportions) {
    // The nudge absorbs representation error such as 10 * 0.6 = 5.999...
    q[k] = static_cast<std::size_t>(std::floor(static_cast<double>(n_target) * p + 1e-9));
  }
  return q;
}

namespace {

struct DomainPool {
  std::string name;
  std::size_t count = 0;           // n_k in the input corpus
  std::deque<SentencePair> items;  // remaining, in sampling order
  std::size_t reserved = 0;        // quota still owed to later splits
};

}  // namespace

SplitResult split(const Corpus& corpus, const SplitSpec& spec) {
  const std::array<std::size_t, 3> targets = {spec.n_train, spec.n_dev, spec.n_test};
  if (spec.total() > corpus.size()) {
    throw Error(ErrorCode::InfeasibleSpec,
                "requested " + std::to_string(spec.total()) + " pairs from a corpus of " +
                    std::to_string(corpus.size()));
  }

  auto groups = group_by_domain(corpus);
  const std::size_t n = corpus.size();
  std::vector<DomainPool> pools;
  for (auto& [name, pairs] : groups.groups) {
    std::vector<std::pair<std::uint64_t, SentencePair>> keyed;
    keyed.reserve(pairs.size());
    for (auto& p : pairs) keyed.emplace_back(keyed_hash(p.id, spec.seed), std::move(p));
    std::sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
      return a.first != b.first ? a.first < b.first : a.second.id < b.second.id;
    });
    DomainPool pool{name, keyed.size(), {}, 0};
    for (auto& [h, p] : keyed) pool.items.push_back(std::move(p));
    pools.push_back(std::move(pool));
  }

  // Exact integer quotas: floor(N_T * n_k / n), remainder (N_T * n_k) mod n.
  // Both factors are bounded by n, so the product fits for n < 2^32.
  auto quota = [n](std::uint64_t target, std::uint64_t count) {
    return static_cast<std::size_t>(target * count / n);
  };
  auto remainder = [n](std::uint64_t target, std::uint64_t count) {
    return static_cast<std::size_t>(target * count % n);
  };
  for (auto& pool : pools) {
    for (auto t : targets) pool.reserved += quota(t, pool.count);
  }

  SplitResult result;
  std::array<std::vector<SentencePair>*, 3> outputs = {&result.train, &result.dev,
                                                       &result.test};
  for (std::size_t s = 0; s < 3; ++s) {
    const std::size_t target = targets[s];
    auto& out = *outputs[s];
    auto& report = result.quota_report[s];
    out.reserve(target);

    for (auto& pool : pools) {
      auto& entry = report[pool.name];
      entry.allocated = quota(target, pool.count);
      pool.reserved -= entry.allocated;
      const std::size_t take = std::min(entry.allocated, pool.items.size());
      for (std::size_t i = 0; i < take; ++i) {
        out.push_back(std::move(pool.items.front()));
        pool.items.pop_front();
      }
      entry.sampled = take;
    }

    std::vector<DomainPool*> order;
    for (auto& pool : pools) order.push_back(&pool);
    std::stable_sort(order.begin(), order.end(), [&](const DomainPool* a, const DomainPool* b) {
      const auto ra = remainder(target, a->count);
      const auto rb = remainder(target, b->count);
      return ra != rb ? ra > rb : a->name < b->name;
    });

    std::size_t deficit = target - std::min(target, out.size());
    bool progressed = true;
    while (deficit > 0 && progressed) {
      progressed = false;
      for (DomainPool* pool : order) {
        if (deficit == 0) break;
        if (pool->items.size() <= pool->reserved) continue;
        out.push_back(std::move(pool->items.front()));
        pool->items.pop_front();
        ++report[pool->name].compensated;
        --deficit;
        progressed = true;
      }
    }
    if (out.size() > target) {
      // Drop the most recently drawn items; the tail holds compensation first.
      for (std::size_t i = target; i < out.size(); ++i) {
        const auto& dom = out[i].domain.empty() ? std::string(kDefaultDomain) : out[i].domain;
        auto& entry = report[dom];
        if (entry.compensated > 0) {
          --entry.compensated;
        } else {
          --entry.sampled;
        }
      }
      out.resize(target);
    }
    if (out.size() != target) {
      throw Error(ErrorCode::InfeasibleSpec,
                  std::string(to_string(static_cast<SplitName>(s))) + " split has " +
                      std::to_string(out.size()) + " of " + std::to_string(target) +
                      " pairs");
    }
  }
  return result;
}

}  // namespace merit
