#include "doctest.h"
#include "merit/div_splitter.hpp"
#include "merit/error.hpp"
#include "split_checks.hpp"

using namespace merit;
using doctest::Approx;

namespace {

Corpus corpus_with(const std::vector<std::pair<std::string, std::size_t>>& domains) {
  std::vector<SentencePair> pairs;
  std::size_t i = 0;
  for (const auto& [dom, count] : domains)
    for (std::size_t j = 0; j < count; ++j, ++i)
      pairs.push_back({"SNT." + std::to_string(i), LanguageTag::id, "s", "t", dom});
  return Corpus(LanguageTag::id, std::move(pairs));
}

}  // namespace

TEST_CASE("group_by_domain") {
  auto g = group_by_domain(corpus_with({{"news", 60}, {"gov", 40}}));
  CHECK(g.proportions.at("news") == Approx(0.6));
  CHECK(g.proportions.at("gov") == Approx(0.4));
  CHECK(g.groups.at("news").size() == 60);

  auto single = group_by_domain(corpus_with({{"travel", 7}}));
  CHECK(single.proportions.at("travel") == 1.0);

  auto mixed = group_by_domain(corpus_with({{"news", 30}, {"", 10}}));
  CHECK(mixed.groups.at(std::string(kDefaultDomain)).size() == 10);

  CHECK_THROWS_AS(group_by_domain(Corpus(LanguageTag::id)), Error);
}

TEST_CASE("allocate_quotas") {
  auto q = allocate_quotas(10, {{"a", 0.6}, {"b", 0.4}});
  CHECK(q.at("a") == 6);
  CHECK(q.at("b") == 4);

  auto r = allocate_quotas(10, {{"a", 0.55}, {"b", 0.45}});
  CHECK(r.at("a") == 5);
  CHECK(r.at("b") == 4);  // deficit 1

  auto z = allocate_quotas(0, {{"a", 0.55}, {"b", 0.45}});
  CHECK(z.at("a") == 0);
  CHECK(z.at("b") == 0);
}

TEST_CASE("8000/1000/1000 over four equal domains") {
  auto corpus = corpus_with({{"health", 5000}, {"news", 5000}, {"travel", 5000}, {"gov", 5000}});
  SplitSpec spec{8000, 1000, 1000, 42};
  const auto r = split(corpus, spec);
  CHECK(r.train.size() == 8000);
  CHECK(r.dev.size() == 1000);
  CHECK(r.test.size() == 1000);
  CHECK(oracle::split_violation(corpus, spec, r).empty());
  for (const auto& [dom, q] : r.quota_report[0]) {
    CHECK(q.allocated == 2000);
    CHECK(q.compensated == 0);
  }
}

TEST_CASE("small single-domain split is seeded and disjoint") {
  auto corpus = corpus_with({{"news", 10}});
  SplitSpec spec{8, 1, 1, 3};
  const auto a = split(corpus, spec);
  const auto b = split(corpus, spec);
  CHECK(oracle::split_violation(corpus, spec, a).empty());
  CHECK(oracle::same_split(a, b));
  spec.seed = 4;
  const auto c = split(corpus, spec);
  CHECK(oracle::split_violation(corpus, spec, c).empty());
  CHECK_FALSE(c.train == a.train);
}

TEST_CASE("infeasible requests") {
  auto corpus = corpus_with({{"news", 10}});
  try {
    split(corpus, SplitSpec{9, 1, 1, 0});
    FAIL("expected InfeasibleSpec");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InfeasibleSpec);
  }
}

TEST_CASE("compensation respects later quotas") {
  // Plain largest-remainder compensation would drain domain a in train and
  // leave the test split short of its quota for a.
  auto corpus = corpus_with({{"a", 6}, {"b", 6}, {"c", 3}});
  SplitSpec spec{6, 6, 3, 0};
  const auto r = split(corpus, spec);
  CHECK(oracle::split_violation(corpus, spec, r).empty());
}

TEST_CASE("deficit goes to the largest remainders") {
  // 10 of 20 with proportions 0.55/0.45: floors 5 and 4, one slot left, a wins.
  auto corpus = corpus_with({{"a", 11}, {"b", 9}});
  SplitSpec spec{10, 5, 5, 1};
  const auto r = split(corpus, spec);
  CHECK(r.quota_report[0].at("a").allocated == 5);
  CHECK(r.quota_report[0].at("a").compensated == 1);
  CHECK(r.quota_report[0].at("b").compensated == 0);
  CHECK(oracle::split_violation(corpus, spec, r).empty());
}

TEST_CASE("zero-size split is allowed") {
  auto corpus = corpus_with({{"a", 5}, {"b", 5}});
  SplitSpec spec{8, 0, 2, 9};
  const auto r = split(corpus, spec);
  CHECK(r.dev.empty());
  CHECK(oracle::split_violation(corpus, spec, r).empty());
}

TEST_CASE("split names") {
  CHECK(to_string(SplitName::Train) == "train");
  CHECK(to_string(SplitName::Test) == "test");
}
