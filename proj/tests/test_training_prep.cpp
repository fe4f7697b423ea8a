#include <cmath>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "merit/error.hpp"
#include "merit/training_prep.hpp"
#include "oracles.hpp"

using namespace merit;
using doctest::Approx;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string rendered_table(const PromptTemplate& tpl) {
  std::string out;
  for (auto lang : kSourceLanguages)
    out += std::string(to_code(lang)) + "\t" + tpl.render(lang) + "\n";
  return out;
}

}  // namespace

TEST_CASE("prompt rendering") {
  PromptTemplate tpl;
  CHECK(tpl.render(LanguageTag::lo) == "Translate lo language into Chinese: ");
  CHECK_THROWS_AS(tpl.render(LanguageTag::zh), Error);
  CHECK_THROWS_AS(PromptTemplate("Translate into Chinese: "), Error);
  CHECK_THROWS_AS(PromptTemplate("{lang} {lang}"), Error);
  PromptTemplate named("From {lang}: ", LanguageNaming::EnglishName);
  CHECK(render_prompt(named, LanguageTag::my) == "From Burmese: ");
}

TEST_CASE("rendered prompts match the golden files byte for byte") {
  const std::string root = MERIT_SOURCE_DIR;
  const auto iso = PromptTemplate::load(root + "/config/prompt_template.txt");
  CHECK(iso.text() == PromptTemplate().text());
  CHECK(rendered_table(iso) == slurp(root + "/tests/golden/prompts_iso.tsv"));
  const auto english =
      PromptTemplate::load(root + "/config/prompt_template.txt", LanguageNaming::EnglishName);
  CHECK(rendered_table(english) == slurp(root + "/tests/golden/prompts_english.tsv"));
  CHECK_THROWS_AS(PromptTemplate::load(root + "/config/does_not_exist.txt"), Error);
}

TEST_CASE("language tokens") {
  CHECK(language_token(LanguageTag::vi) == "⟨vi⟩");
  const auto vocab = Vocabulary::with_language_tokens();
  CHECK(vocab.size() == 5);
  for (auto lang : kSourceLanguages) CHECK(vocab.contains(language_token(lang)));
  CHECK_FALSE(vocab.contains(language_token(LanguageTag::zh)));
  CHECK_THROWS_AS(vocab.id("nope"), Error);
  Vocabulary v;
  CHECK(v.add("x") == 0);
  CHECK(v.add("y") == 1);
  CHECK(v.add("x") == 0);
}

TEST_CASE("build_ltp_input ordering") {
  const auto vocab = Vocabulary::with_language_tokens();
  const std::vector<std::string> prompt{"p1", "p2"};
  const std::vector<std::string> source{"x1", "x2", "x3"};
  CHECK(build_ltp_input(prompt, LanguageTag::vi, source, vocab) ==
        std::vector<std::string>{"p1", "p2", "⟨vi⟩", "x1", "x2", "x3"});
  const std::vector<std::string> empty;
  CHECK_THROWS_AS(build_ltp_input(prompt, LanguageTag::vi, empty, vocab), Error);
  Vocabulary bare;
  try {
    build_ltp_input(prompt, LanguageTag::vi, source, bare);
    FAIL("expected UnregisteredLanguage");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnregisteredLanguage);
  }
}

TEST_CASE("make_sft_record") {
  const SentencePair p{"SNT.1", LanguageTag::id, "Selamat pagi", "早上好", ""};
  const auto rec = make_sft_record(p, PromptTemplate(), Vocabulary::with_language_tokens());
  CHECK(rec.prompt_length == 5);
  REQUIRE(rec.input_tokens.size() == 5 + 1 + 2);
  CHECK(rec.input_tokens[5] == "⟨id⟩");
  CHECK(rec.input_tokens[6] == "Selamat");
  CHECK(rec.target_tokens == std::vector<std::string>{"早", "上", "好"});
}

TEST_CASE("smoothed_target") {
  const auto one_hot = smoothed_target(2, 4, 0.0);
  CHECK(one_hot.q == std::vector<double>{0, 0, 1, 0});
  const auto q = smoothed_target(0, 2, 0.2);
  CHECK(q.q[0] == Approx(0.9).epsilon(1e-15));
  CHECK(q.q[1] == Approx(0.1).epsilon(1e-15));
  const auto ex = smoothed_target(0, 3, 0.2, SmoothingVariant::ExcludeTarget);
  CHECK(ex.q[0] == Approx(0.8));
  CHECK(ex.q[1] == Approx(0.1));
  CHECK_THROWS_AS(smoothed_target(4, 4, 0.1), Error);
  CHECK_THROWS_AS(smoothed_target(0, 4, 1.0), Error);
  CHECK_THROWS_AS(smoothed_target(0, 4, -0.1), Error);
}

TEST_CASE("sft_loss") {
  for (std::size_t v : {2u, 10u, 50u}) {
    const std::vector<double> uniform(v, 1.0 / static_cast<double>(v));
    CHECK(sft_loss(uniform, 1, 0.1) == Approx(std::log(static_cast<double>(v))).epsilon(1e-12));
  }
  CHECK(sft_loss(std::vector<double>{0.0, 1.0, 0.0}, 1, 0.0) == 0.0);
  const std::vector<double> p{0.8, 0.2};
  CHECK(sft_loss(p, 0, 0.2) ==
        Approx(-0.9 * std::log(0.8) - 0.1 * std::log(0.2)).epsilon(1e-14));
  CHECK_THROWS_AS(sft_loss(std::vector<double>{0.5, 0.6}, 0, 0.1), Error);
  CHECK_THROWS_AS(sft_loss(std::vector<double>{1.0, 0.0}, 0, 0.1), Error);
}

TEST_CASE("sft_loss_grad") {
  const std::vector<double> equal{0.3, 0.3};
  const auto g = sft_loss_grad(equal, 0, 0.0);
  CHECK(g[0] == Approx(-0.5));
  CHECK(g[1] == Approx(0.5));

  // When softmax already equals q', the gradient vanishes.
  const std::size_t v = 4;
  const double eps = 1.0 - 1.0 / static_cast<double>(v);
  const auto q = smoothed_target(1, v, eps).q;
  std::vector<double> logits;
  for (double qi : q) logits.push_back(std::log(qi));
  for (double gi : sft_loss_grad(logits, 1, eps)) CHECK(std::abs(gi) < 1e-12);

  CHECK(sft_loss_from_logits(logits, 1, eps) == Approx(sft_loss(softmax(logits), 1, eps)));
}

TEST_CASE("mle_loss") {
  CHECK(mle_loss(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(mle_loss(std::vector<double>{-std::log(2.0), -std::log(2.0)}) == Approx(2 * std::log(2.0)));
  const std::vector<double> lp{-0.1, -2.5, -1e-8, -7.25, -0.333};
  CHECK(mle_loss(lp) == Approx(-oracle::neumaier_sum(lp)).epsilon(1e-15));
  CHECK_THROWS_AS(mle_loss(std::vector<double>{-1.0, 0.5}), Error);
}
