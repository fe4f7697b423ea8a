#include <cmath>

#include "doctest.h"
#include "merit/error.hpp"
#include "merit/metrics.hpp"
#include "oracles.hpp"

using namespace merit;
using namespace merit::metrics;
using doctest::Approx;

namespace {

TokenSequence toks(std::vector<std::string> t) { return {std::move(t), Granularity::Word}; }

}  // namespace

TEST_CASE("tokenize_target") {
  CHECK(tokenize_target("你好 world").tokens == std::vector<std::string>{"你", "好", "world"});
  CHECK(tokenize_target("").empty());
  CHECK(tokenize_target("2024年").tokens == std::vector<std::string>{"2024", "年"});
  CHECK(tokenize_target("ab c", Granularity::Character).tokens ==
        std::vector<std::string>{"a", "b", "c"});
}

TEST_CASE("bleu4") {
  const auto x = toks({"the", "cat", "sat", "on", "the", "mat"});
  CHECK(bleu4(x, x) == 100.0);
  CHECK(bleu4(toks({"a", "b", "c", "d"}), toks({"a", "b", "c", "d", "e"})) ==
        Approx(100.0 * std::exp(-0.25)).epsilon(1e-12));
  CHECK(bleu4(toks({"a", "b", "c", "d"}), toks({"a", "b", "c", "d", "e"})) ==
        Approx(77.88).epsilon(1e-4));
  // No 4-gram matches.
  const auto h = toks({"a", "b", "c", "x", "b", "c", "d"});
  const auto r = toks({"a", "b", "c", "y", "b", "c", "d"});
  CHECK(bleu4(h, r, BleuSmoothing::None) == 0.0);
  CHECK(bleu4(h, r, BleuSmoothing::AddOne) > 0.0);
  CHECK(bleu4(toks({"p", "q"}), toks({"r", "s"})) == 0.0);
  CHECK_THROWS_AS(bleu4(toks({}), x), Error);
}

TEST_CASE("bleu add-one smoothing by hand") {
  // hyp a b c x b c d, ref a b c y b c d:
  // 1-grams 6/7 (x misses), 2-grams 4/6, 3-grams 2/5, 4-grams 0/4 -> 1/5.
  const auto h = toks({"a", "b", "c", "x", "b", "c", "d"});
  const auto r = toks({"a", "b", "c", "y", "b", "c", "d"});
  const double expected =
      100.0 * std::exp((std::log(6.0 / 7) + std::log(4.0 / 6) + std::log(2.0 / 5) + std::log(1.0 / 5)) / 4);
  CHECK(bleu4(h, r) == Approx(expected).epsilon(1e-12));
}

TEST_CASE("bleu counts agree with an independent n-gram count") {
  oracle::BleuCounts want = oracle::bleu_counts({"a", "a", "b", "a", "b"}, {"a", "b", "a", "b", "b"});
  const auto got = bleu_stats(toks({"a", "a", "b", "a", "b"}), toks({"a", "b", "a", "b", "b"}));
  for (int n = 0; n < 4; ++n) {
    CHECK(got.matches[static_cast<std::size_t>(n)] == want.matches[n]);
    CHECK(got.totals[static_cast<std::size_t>(n)] == want.totals[n]);
  }
}

TEST_CASE("chrf") {
  CHECK(chrf("abcdef", "abcdef") == 100.0);
  CHECK(chrf("abc", "xyz") == 0.0);
  // Orders 1-4 present on both sides: F = 3/4, 2/3, 1/2, 0.
  const double expected = 100.0 * (0.75 + 2.0 / 3.0 + 0.5 + 0.0) / 4.0;
  CHECK(chrf("abcd", "abce") == Approx(expected).epsilon(1e-12));
  CHECK(chrf("abcd", "abce") == Approx(oracle::chrf_ascii("abcd", "abce")).epsilon(1e-12));
  CHECK(chrf("abcd", "abce") == Approx(47.917).epsilon(1e-5));
  CHECK(chrf("ab cd", "abcd") == 100.0);  // whitespace is ignored
  CHECK_THROWS_AS(chrf("", "x"), Error);
}

TEST_CASE("chrf beta weights recall") {
  // hyp "ab", ref "abcd": P = 1, R = 1/2 at order 1; P = 1, R = 1/3 at order 2.
  auto f = [](double p, double r, double b) { return (1 + b * b) * p * r / (b * b * p + r); };
  CHECK(chrf("ab", "abcd", 6, 2.0) == Approx(100.0 * (f(1, 0.5, 2) + f(1, 1.0 / 3, 2)) / 2));
  CHECK(chrf("ab", "abcd", 6, 1.0) == Approx(100.0 * (f(1, 0.5, 1) + f(1, 1.0 / 3, 1)) / 2));
}

TEST_CASE("rouge_l") {
  const auto x = toks({"a", "b", "c"});
  CHECK(rouge_l(x, x) == 100.0);
  CHECK(rouge_l(toks({"a", "x", "b"}), toks({"a", "b", "c"})) == Approx(200.0 / 3.0).epsilon(1e-12));
  CHECK(rouge_l(toks({"a", "x", "b"}), toks({"a", "b", "c"})) == Approx(66.67).epsilon(1e-4));
  CHECK(rouge_l(toks({"p"}), toks({"q"})) == 0.0);
  CHECK(lcs_length(std::vector<std::string>{"a", "b", "c", "b"},
                   std::vector<std::string>{"b", "c", "a", "b"}) == 3);
}

TEST_CASE("bleu_chrf and combinations") {
  CHECK(bleu_chrf(49.26, 42.68) == Approx(45.97).epsilon(1e-12));
  CHECK(bleu_chrf(0, 0) == 0.0);
  CHECK(bleu_chrf(37.5, 37.5) == 37.5);
  CHECK_THROWS_AS(bleu_chrf(101, 0), Error);
  CHECK_THROWS_AS(bleu_chrf(50, -1), Error);

  CHECK(combine(4, 9, Combination::Geometric) == 6.0);
  CHECK(combine(50, 40, Combination::W46) == Approx(44.0));
  CHECK(combine(50, 40, Combination::W64) == Approx(46.0));
  CHECK(combine(49.26, 42.68, Combination::Equal) == bleu_chrf(49.26, 42.68));
  CHECK(parse_combination("w46") == Combination::W46);
  CHECK(to_string(Combination::Geometric) == "geometric");
  CHECK_THROWS_AS(parse_combination("harmonic"), Error);
}

TEST_CASE("spearman") {
  const std::vector<double> a{1, 2, 3, 4, 5};
  const std::vector<double> b{5, 4, 3, 2, 1};
  CHECK(spearman(a, a) == Approx(1.0));
  CHECK(spearman(a, b) == Approx(-1.0));
  const std::vector<double> x{1, 2, 2, 3, 5, 5, 5};
  const std::vector<double> y{3, 1, 4, 1, 5, 9, 2};
  CHECK(spearman(x, y) == Approx(oracle::spearman_brute(x, y)).epsilon(1e-12));
  CHECK(average_ranks(x) == oracle::ranks_by_counting(x));
  const std::vector<double> flat{2, 2, 2};
  const std::vector<double> three{1, 2, 3};
  CHECK_THROWS_AS(spearman(flat, three), Error);
  CHECK_THROWS_AS(spearman(a, three), Error);
}

TEST_CASE("corpus-level evaluation pools statistics") {
  const std::vector<std::string> hyps{"我 喜欢 猫", "今天 天气 很 好"};
  const std::vector<std::string> refs{"我 喜欢 狗", "今天 天气 好"};
  const auto rep = evaluate_corpus(hyps, refs);
  BleuStats pooled = bleu_stats(tokenize_target(hyps[0]), tokenize_target(refs[0]));
  pooled += bleu_stats(tokenize_target(hyps[1]), tokenize_target(refs[1]));
  CHECK(rep.bleu4 == bleu_from_stats(pooled));
  CHECK(rep.bleu_chrf == Approx((rep.bleu4 + rep.chrf) / 2));
  CHECK(rep.segments == 2);
  CHECK(rep.corpus_level);

  const std::vector<std::string> one{"x"};
  CHECK_THROWS_AS(evaluate_corpus(hyps, one), Error);
  const std::vector<std::string> none;
  CHECK_THROWS_AS(evaluate_corpus(none, none), Error);

  const auto s = evaluate_sentence("我 喜欢 猫", "我 喜欢 猫");
  CHECK(s.bleu4 == 100.0);
  CHECK(s.chrf == 100.0);
  CHECK(s.rouge_l == 100.0);
  CHECK_FALSE(s.corpus_level);
}
