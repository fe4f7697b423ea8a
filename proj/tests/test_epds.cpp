#include <algorithm>
#include <memory>

#include "doctest.h"
#include "merit/epds.hpp"
#include "merit/error.hpp"
#include "merit/synthetic.hpp"

using namespace merit;
using doctest::Approx;

namespace {

ScoredPair scored(std::string id, double s_final) {
  ScoredPair s;
  s.pair.id = std::move(id);
  s.s_final = s_final;
  return s;
}

std::vector<std::string> ids(const std::vector<ScoredPair>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(s.pair.id);
  return out;
}

// Always returns the same logprob per token, so S_PPL and S_IFD are constant.
struct FlatScorer final : LogprobScorer {
  std::vector<LogprobResult> score(std::span<const ScoreRequest> reqs) const override {
    std::vector<LogprobResult> out;
    for (const auto& r : reqs) {
      const auto n = static_cast<std::int64_t>(r.target.size());
      out.push_back({-2.0 * static_cast<double>(n), n});
    }
    return out;
  }
};

}  // namespace

TEST_CASE("final_score") {
  const ComposeWeights w;
  CHECK(final_score(1, 1, 1, w) == Approx(1.0));
  CHECK(final_score(0.5, 0.5, 0.5, w) == Approx(0.5));
  CHECK(final_score(0.8, 0.6, 0.5, w) == Approx(0.62).epsilon(1e-12));
  CHECK(final_score(0.9, 0.3, 0.6, ComposeWeights::unweighted()) == Approx(0.6));
  CHECK_THROWS_AS(final_score(1, 1, 1, ComposeWeights{0.5, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(final_score(1, 1, 1, ComposeWeights{1.5, -0.5, 0.0}), Error);
}

TEST_CASE("select_top_k basics") {
  std::vector<ScoredPair> v{scored("a", 0.1), scored("b", 0.9), scored("c", 0.5)};
  CHECK(select_top_k(v, 0).empty());
  CHECK(ids(select_top_k(v, 5)) == std::vector<std::string>{"b", "c", "a"});
  CHECK(ids(select_top_k(v, 1)) == std::vector<std::string>{"b"});
}

TEST_CASE("ties break by ascending id") {
  std::vector<ScoredPair> v{scored("z", 0.5), scored("m", 0.5), scored("a", 0.5),
                            scored("q", 0.7)};
  CHECK(ids(select_top_k(v, 3)) == std::vector<std::string>{"q", "a", "m"});
}

TEST_CASE("ten hand-built scores, K=3") {
  const double s[10] = {0.31, 0.77, 0.12, 0.94, 0.55, 0.77, 0.08, 0.61, 0.43, 0.29};
  std::vector<ScoredPair> v;
  for (int i = 0; i < 10; ++i) v.push_back(scored("p" + std::to_string(i), s[i]));
  CHECK(ids(select_top_k(v, 3)) == std::vector<std::string>{"p3", "p1", "p5"});
}

TEST_CASE("select_above") {
  std::vector<ScoredPair> v{scored("a", 0.1), scored("b", 0.9), scored("c", 0.5)};
  CHECK(ids(select_above(v, 0.5)) == std::vector<std::string>{"b", "c"});
  CHECK(select_above(v, 0.95).empty());
}

TEST_CASE("run_epds with every pair invalid") {
  std::vector<SentencePair> pairs{{"a", LanguageTag::lo, "text", "", ""},
                                  {"b", LanguageTag::lo, "", "文本", ""}};
  Corpus corpus(LanguageTag::lo, pairs);
  FlatScorer scorer;
  const auto r = run_epds(corpus, EpdsConfig{}, 5, scorer);
  CHECK(r.selected.empty());
  CHECK(r.clean.empty());
  CHECK(r.valid_count == 0);
  CHECK(r.shortfall);
  REQUIRE(r.audit.size() == 2);
  CHECK(r.audit[0].dropped_reason == std::optional<std::string>("empty_text"));
  CHECK_FALSE(r.audit[0].rank.has_value());

  EpdsConfig strict;
  strict.strict = true;
  try {
    run_epds(corpus, strict, 1, scorer);
    FAIL("expected InsufficientValidPairs");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientValidPairs);
  }
}

TEST_CASE("run_epds audit trail") {
  synthetic::Options opts;
  opts.pairs = 300;
  opts.lang = LanguageTag::my;
  Corpus corpus(LanguageTag::my, synthetic::make_pairs(opts));
  FlatScorer scorer;
  EpdsConfig cfg;
  const auto r = run_epds(corpus, cfg, 100, scorer);
  CHECK(r.selected.size() == 100);
  CHECK(r.clean.size() == 100);
  CHECK(r.audit.size() == corpus.size());
  CHECK_FALSE(r.shortfall);
  CHECK(r.valid_count < corpus.size());  // the generator plants broken pairs

  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(r.audit[i].rank == std::optional<std::size_t>(i + 1));
    CHECK(r.audit[i].id == r.selected[i].pair.id);
    CHECK(r.clean.pairs()[i] == r.selected[i].pair);
  }
  for (std::size_t i = 100; i < r.valid_count; ++i)
    CHECK(r.audit[i].dropped_reason == std::optional<std::string>("below_top_k"));
  for (std::size_t i = r.valid_count; i < r.audit.size(); ++i) {
    CHECK(r.audit[i].dropped_reason.has_value());
    CHECK_FALSE(r.audit[i].s_final.has_value());
  }
  // Components recombine into s_final.
  for (const auto& s : r.selected)
    CHECK(std::abs(final_score(s.s_base, s.s_ppl, s.s_ifd, cfg.weights) - s.s_final) <= 1e-12);
}

TEST_CASE("EpdsConfig validation reaches every sub-config") {
  EpdsConfig cfg;
  cfg.scorer.tau = 0.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = EpdsConfig{};
  cfg.weights = {0.2, 0.2, 0.2};
  CHECK_THROWS_AS(cfg.validate(), Error);
}
